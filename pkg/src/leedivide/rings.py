"""Coefficient rings for the deformed link homology theories.

Every homology group here is computed over a Euclidean integral domain R
carrying three distinguished elements h, t, c with

    c**2 == h**2 + 4*t  and  (h - c)/2, (h + c)/2 in R,

together with the derived elements u = (h - c)/2 and v = (h + c)/2.  Two
instances ship:

* ``Z2``  -- the integers with (h, t, c) = (0, 1, 2), i.e. integral Lee
  theory.  Elements are plain Python ints (arbitrary precision; Smith
  reduction blows past 64 bits on moderate diagrams).
* ``Qh``  -- Q[h] with (h, t, c) = (0, (h/2)**2, h), the degree-(-2)
  normalization of Bar-Natan theory.  Elements are dense tuples of
  ``fractions.Fraction`` coefficients, low degree first.

Two further descriptors exist for internal cross-checks: ``QhBN`` is
Q[h] with (h, 0, h) (same theory, other normalization) and ``Q`` is the
rationals with c = 2 invertible (used only for rank checks; divisibility
is degenerate there).

Ring elements are immutable values; descriptors are stateless and safe
to share between threads.
"""

from fractions import Fraction

from .errors import NotDivisibleError

LABEL_DEG = (0, -2)  # q-degrees of the module generators 1, X


class _Infinity:
    """Tagged valuation of zero; bigger than every integer, equal to itself."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("leedivide.INFINITY")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__


INFINITY = _Infinity()


# ---------------------------------------------------------------------------
# dense Q[h] polynomial helpers: tuples of Fraction, low degree first, no
# trailing zeros, () is the zero polynomial.

_F0 = Fraction(0)
_F1 = Fraction(1)


def _ptrim(c):
    n = len(c)
    while n and not c[n - 1]:
        n -= 1
    return tuple(c[:n])


def padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _ptrim(out)


def pneg(a):
    return tuple(-x for x in a)


def psub(a, b):
    out = list(a) + [_F0] * (len(b) - len(a))
    for i, x in enumerate(b):
        out[i] -= x
    return _ptrim(out)


def pmul(a, b):
    if not a or not b:
        return ()
    out = [_F0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _ptrim(out)


def pdivmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db, lb = len(b) - 1, b[-1]
    q = [_F0] * max(0, len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = r[i]
        if c:
            f = c / lb
            q[i - db] = f
            for j in range(db + 1):
                r[i - db + j] -= f * b[j]
    return _ptrim(q), _ptrim(r)


def pconst(x):
    f = Fraction(x)
    return (f,) if f else ()


def pmono(coef, exp):
    f = Fraction(coef)
    if not f:
        return ()
    return (_F0,) * exp + (f,)


def pfmt(a):
    if not a:
        return "0"
    parts = []
    for e in range(len(a) - 1, -1, -1):
        c = a[e]
        if not c:
            continue
        if e == 0:
            term = str(c)
        else:
            base = "h" if e == 1 else f"h^{e}"
            if c == 1:
                term = base
            elif c == -1:
                term = "-" + base
            else:
                term = f"{c}*{base}"
        parts.append(term)
    out = parts[0]
    for term in parts[1:]:
        out += ("+" + term) if not term.startswith("-") else term
    return out


# ---------------------------------------------------------------------------


class Ring:
    """Descriptor of a Euclidean integral domain with (h, t, c) fixed.

    Elements are opaque values; all arithmetic goes through the
    descriptor.  Subclasses fill in the raw element operations.
    """

    rid = None
    c_is_prime = True
    is_pid = True
    c_is_unit = False

    def __init__(self):
        # Condition on (h, t, c): c^2 = h^2 + 4t with (h +- c)/2 in R.
        lhs = self.mul(self.c, self.c)
        rhs = self.add(self.mul(self.h, self.h), self.mul(self.from_int(4), self.t))
        if lhs != rhs:
            raise ValueError(f"{self.rid}: c^2 != h^2 + 4t")
        self.u = self.exact_div(self.sub(self.h, self.c), self.from_int(2))
        self.v = self.exact_div(self.add(self.h, self.c), self.from_int(2))

    # -- raw ops supplied by subclasses ------------------------------------
    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def divmod(self, a, b):
        raise NotImplementedError

    def from_int(self, n):
        raise NotImplementedError

    def is_unit(self, a):
        raise NotImplementedError

    def size(self, a):
        """Euclidean size used for pivot preference (0 only for a == 0)."""
        raise NotImplementedError

    def normalize(self, a):
        """Return (assoc, unit) with assoc = unit * a the canonical associate."""
        raise NotImplementedError

    def inv_unit(self, a):
        raise NotImplementedError

    def fmt(self, a):
        raise NotImplementedError

    def monomial_qdegs(self, a):
        """q-degree shift of each monomial of a (coefficients may be graded)."""
        raise NotImplementedError

    # -- derived ops --------------------------------------------------------
    def is_zero(self, a):
        return a == self.zero

    def exact_div(self, a, b):
        if b == self.zero:
            raise ZeroDivisionError("exact division by zero")
        q, r = self.divmod(a, b)
        if r != self.zero:
            raise NotDivisibleError(f"{self.fmt(b)} does not divide {self.fmt(a)}")
        return q

    def gcd(self, a, b):
        while b != self.zero:
            a, b = b, self.divmod(a, b)[1]
        return self.normalize(a)[0]

    def c_valuation(self, a):
        """Largest k with c^k | a; INFINITY for a == 0."""
        if a == self.zero:
            return INFINITY
        if self.c_is_unit:
            return INFINITY
        k = 0
        while True:
            q, r = self.divmod(a, self.c)
            if r != self.zero:
                return k
            a = q
            k += 1

    def mul_cpow(self, a, k):
        for _ in range(k):
            a = self.mul(a, self.c)
        return a


class ZRing(Ring):
    """Integers with (h, t, c) = (0, 1, 2): integral Lee theory."""

    rid = "Z2"
    zero = 0
    one = 1
    h = 0
    t = 1
    c = 2

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def divmod(self, a, b):
        q, r = divmod(a, b)
        # symmetric remainder keeps Smith pivots small
        if r and 2 * r > abs(b):
            r -= abs(b)
            q += 1 if b > 0 else -1
        return q, r

    def from_int(self, n):
        return n

    def is_unit(self, a):
        return a in (1, -1)

    def size(self, a):
        return abs(a)

    def normalize(self, a):
        return (a, 1) if a >= 0 else (-a, -1)

    def inv_unit(self, a):
        return a

    def fmt(self, a):
        return str(a)

    def monomial_qdegs(self, a):
        return (0,)

    def c_valuation(self, a):
        if a == 0:
            return INFINITY
        return ((a if a > 0 else -a) & -(a if a > 0 else -a)).bit_length() - 1


class QhRing(Ring):
    """Q[h] with (h, t, c) = (0, (h/2)^2, h); deg h = -2, so bigraded."""

    rid = "Qh"
    zero = ()
    one = (_F1,)
    h = ()
    t = (_F0, _F0, Fraction(1, 4))
    c = (_F0, _F1)

    def add(self, a, b):
        return padd(a, b)

    def sub(self, a, b):
        return psub(a, b)

    def neg(self, a):
        return pneg(a)

    def mul(self, a, b):
        return pmul(a, b)

    def divmod(self, a, b):
        return pdivmod(a, b)

    def from_int(self, n):
        return pconst(n)

    def is_unit(self, a):
        return len(a) == 1

    def size(self, a):
        return len(a)  # 1 + degree; 0 only for zero

    def normalize(self, a):
        if not a:
            return (), (_F1,)
        lead = a[-1]
        if lead == 1:
            return a, (_F1,)
        inv = 1 / lead
        return tuple(x * inv for x in a), (inv,)

    def inv_unit(self, a):
        return (1 / a[0],)

    def fmt(self, a):
        return pfmt(a)

    def monomial_qdegs(self, a):
        return tuple(-2 * e for e, x in enumerate(a) if x)

    def c_valuation(self, a):
        if not a:
            return INFINITY
        k = 0
        while not a[k]:
            k += 1
        return k


class QhBNRing(QhRing):
    """Q[h] with (h, t, c) = (h, 0, h): the other normalization of Qh."""

    rid = "QhBN"
    h = (_F0, _F1)
    t = ()
    c = (_F0, _F1)


class QRing(Ring):
    """Rationals with c = 2 invertible.  Rank checks only."""

    rid = "Q"
    c_is_unit = True
    c_is_prime = False
    zero = _F0
    one = _F1
    h = _F0
    t = _F1
    c = Fraction(2)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def divmod(self, a, b):
        return a / b, _F0

    def from_int(self, n):
        return Fraction(n)

    def is_unit(self, a):
        return bool(a)

    def size(self, a):
        return 1 if a else 0

    def normalize(self, a):
        if not a:
            return _F0, _F1
        return _F1, 1 / a

    def inv_unit(self, a):
        return 1 / a

    def fmt(self, a):
        return str(a)

    def monomial_qdegs(self, a):
        return (0,)


Z2 = ZRing()
QH = QhRing()
QH_BN = QhBNRing()
QQ = QRing()

_RINGS = {"Z2": Z2, "Qh": QH, "QhBN": QH_BN, "Q": QQ}


def get_ring(rid):
    """Ring descriptor by string id.  Public ids: "Z2", "Qh"."""
    try:
        return _RINGS[rid]
    except KeyError:
        raise KeyError(f"unknown ring id {rid!r}; expected one of {sorted(_RINGS)}") from None
