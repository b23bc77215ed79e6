"""Top-level invariants: divisibility of the canonical class and friends.

k_c(D) is the c-divisibility of the canonical class in the free part of
degree-zero homology; the combination 2*k_c(D) + w(D) - r(D) + 1 is a
link invariant.  k~_c measures the divisibility before quotienting by
torsion.  Over Q[h] the degree-zero free part of a knot is generated by
a single class zeta together with X*zeta, which pins down k_h twice
over; the mirror pairing gives a third cross-check.
"""

import time
from dataclasses import dataclass

from .cube import L1, LX
from .diagram import ALPHA_COLOR, mirror
from .errors import BadArcError, NotAKnotError
from .homology import ChainComplex
from .lee import alpha_cycle, beta_cycle
from .rings import INFINITY, QH, get_ring


def degree_zero(diagram, ring, *, cycles=(), full=False, sign_rule="below",
                swap_colors=False):
    """ChainComplex and H^0 presentation with the canonical cycle first."""
    cx = ChainComplex(diagram, ring, sign_rule=sign_rule)
    deg, alpha = alpha_cycle(cx.slices, swap_colors=swap_colors)
    if deg != 0:
        raise AssertionError("canonical cycle must sit at degree 0")
    pres = cx.presentation(0, cycles=[alpha, *cycles], full=full)
    return cx, pres


def k_c(diagram, ring, **kw):
    """c-divisibility of the canonical class in H^0 modulo torsion."""
    _, pres = degree_zero(diagram, ring, **kw)
    return pres.class_valuation(0)


def k_tilde(diagram, ring, **kw):
    """c-divisibility of the canonical class in full H^0."""
    _, pres = degree_zero(diagram, ring, **kw)
    return pres.class_valuation_full(0)


def s_bar(diagram, ring, **kw):
    k = k_c(diagram, ring, **kw)
    if k is INFINITY:
        raise AssertionError("canonical class vanished in the free part")
    r = diagram.seifert().r
    return 2 * k + diagram.writhe - r + 1


@dataclass
class InvariantReport:
    name: str
    ring: str
    n: int
    w: int
    r: int
    k_c: object
    s_bar: int
    k_tilde: object
    torsion: list
    ms: float

    def to_json(self):
        def enc(v):
            return "infinity" if v is INFINITY else v
        return {"name": self.name, "ring": self.ring, "n": self.n,
                "w": self.w, "r": self.r, "k_c": enc(self.k_c),
                "s_bar": self.s_bar, "k_tilde": enc(self.k_tilde),
                "torsion": self.torsion, "ms": round(self.ms, 2)}


def invariant_report(diagram, ring, name=""):
    if isinstance(ring, str):
        ring = get_ring(ring)
    t0 = time.perf_counter()
    _, pres = degree_zero(diagram, ring)
    k = pres.class_valuation(0)
    kt = pres.class_valuation_full(0)
    r = diagram.seifert().r
    sb = 2 * k + diagram.writhe - r + 1
    ms = 1000 * (time.perf_counter() - t0)
    return InvariantReport(name=name, ring=ring.rid, n=diagram.n,
                           w=diagram.writhe, r=r, k_c=k, s_bar=sb,
                           k_tilde=kt,
                           torsion=[ring.fmt(d) for d in pres.torsion],
                           ms=ms)


# -- the X endomorphism ------------------------------------------------------------


class XEndomorphism:
    """Multiplication by X at a marked point, with the canonical sign fix.

    The raw operation multiplies the label of the circle through the
    marked arc; the sign is + when that arc is colored a in the Seifert
    coloring of the given orientation and - otherwise, which makes the
    operator independent of the marked point on homology.
    """

    def __init__(self, slices, arc=None):
        self.slices = slices
        D = slices.diagram
        sd = D.seifert()
        if arc is None or arc == 0:
            if D.free_loops == 0:
                raise BadArcError("diagram has no free loop; pass an arc id")
            self.loop = 0
            color = sd.colors[len(sd.circles)]
        else:
            if arc not in D.head:
                raise BadArcError(f"no arc {arc}")
            self.loop = None
            self.arc = arc
            color = sd.colors[sd.arc_to_circle[arc]]
        self.positive = (color == ALPHA_COLOR)

    def _circle_index(self, state):
        circles, arc_to, _r = self.slices.circles(state)
        if self.loop is not None:
            return len(circles) + self.loop
        return arc_to[self.arc]

    def apply(self, degree, vec):
        ring = self.slices.ring
        basis, index = self.slices.basis(degree)
        out = {}

        def add(idx, val):
            cur = ring.add(out.get(idx, ring.zero), val)
            if cur == ring.zero:
                out.pop(idx, None)
            else:
                out[idx] = cur

        for col, coef in vec.items():
            s, labels = basis[col]
            ci = self._circle_index(s)
            if not self.positive:
                coef = ring.neg(coef)
            if labels[ci] == L1:
                new = list(labels)
                new[ci] = LX
                add(index[(s, tuple(new))], coef)
            else:
                # X*X = h*X + t
                if ring.h != ring.zero:
                    add(index[(s, labels)], ring.mul(coef, ring.h))
                if ring.t != ring.zero:
                    new = list(labels)
                    new[ci] = L1
                    add(index[(s, tuple(new))], ring.mul(coef, ring.t))
        return out


# -- zeta generator over Q[h] ---------------------------------------------------------


def zeta_generator(diagram, ring=QH):
    """The canonical generator of the degree-zero free part of a knot.

    Returns (zeta_free_coords, k) where k = k_h(D), after verifying
    exactly that alpha = h^k (X zeta + (h/2) zeta) and
    beta = (-h)^k (X zeta - (h/2) zeta) and that {zeta, X zeta} is a
    basis of the free part.
    """
    if isinstance(ring, str):
        ring = get_ring(ring)
    if diagram.n_components != 1:
        raise NotAKnotError("zeta generator is defined for knots")
    cx = ChainComplex(diagram, ring)
    _, alpha = alpha_cycle(cx.slices)
    _, beta = beta_cycle(cx.slices)
    pres = cx.presentation(0, cycles=[alpha, beta], full=True)
    if pres.free_rank != 2:
        raise AssertionError(f"free rank {pres.free_rank} != 2 at degree 0")
    A = pres.class_free_coords(0)
    B = pres.class_free_coords(1)
    k = pres.class_valuation(0)
    if k is INFINITY or pres.class_valuation(1) != k:
        raise AssertionError("alpha and beta have different divisibility")
    h = ring.c
    hk = ring.mul_cpow(ring.one, k)
    sign = ring.one if k % 2 == 0 else ring.neg(ring.one)
    zeta = []
    for a, b in zip(A, B):
        s = ring.sub(ring.exact_div(a, hk),
                     ring.mul(sign, ring.exact_div(b, hk)))
        zeta.append(ring.exact_div(s, h))

    xmat = x_matrix_on_free(diagram, ring, cx, pres)
    half_h = ring.exact_div(h, ring.from_int(2))

    def mat_apply(zvec):
        return [ring.add(ring.mul(xmat[0][0], zvec[0]), ring.mul(xmat[0][1], zvec[1])),
                ring.add(ring.mul(xmat[1][0], zvec[0]), ring.mul(xmat[1][1], zvec[1]))]

    xz = mat_apply(zeta)
    for i in range(2):
        lhs = ring.mul(hk, ring.add(xz[i], ring.mul(half_h, zeta[i])))
        if lhs != A[i]:
            raise AssertionError("zeta identity for alpha failed")
        rhs = ring.mul(ring.mul(hk, sign),
                       ring.sub(xz[i], ring.mul(half_h, zeta[i])))
        if rhs != B[i]:
            raise AssertionError("zeta identity for beta failed")
    det = ring.sub(ring.mul(zeta[0], xz[1]), ring.mul(zeta[1], xz[0]))
    if not ring.is_unit(det):
        raise AssertionError("zeta, X*zeta do not form a basis of the free part")
    return zeta, k


def x_matrix_on_free(diagram, ring, cx=None, pres=None):
    """Matrix of the X action on the degree-zero free part (rank 2)."""
    if cx is None:
        cx = ChainComplex(diagram, ring)
        _, alpha = alpha_cycle(cx.slices)
        pres = cx.presentation(0, cycles=[alpha], full=True)
    arc = None if not diagram.arcs else min(diagram.arcs)
    endo = XEndomorphism(cx.slices, arc)
    cols = []
    for j in range(pres.free_rank):
        z = pres.lift_free(j)
        xz = endo.apply(0, z)
        free, _ = pres.project(xz)
        cols.append(free)
    return [[cols[j][i] for j in range(len(cols))] for i in range(pres.free_rank)]


# -- mirror pairing ----------------------------------------------------------------


def _pair_labels(ring, l, m):
    """<l, m> = counit(l * m) on the label algebra."""
    if l == LX and m == LX:
        return ring.h
    if l != m:
        return ring.one
    return ring.zero


def chain_pairing(slices, slices_bar, degree, vec, vec_bar):
    """The duality pairing C^i(D) x C^{-i}(mirror D) -> R.

    Matching states are complementary; the per-state sign
    (-1)^(sum of 1-bit positions) makes the pairing kill boundaries.
    """
    ring = slices.ring
    D = slices.diagram
    full = (1 << D.n) - 1
    basis, _ = slices.basis(degree)
    basis_bar, _ = slices_bar.basis(-degree)
    by_state = {}
    for idx, coef in vec_bar.items():
        s, labels = basis_bar[idx]
        by_state.setdefault(s, []).append((labels, coef))
    total = ring.zero
    for idx, coef in vec.items():
        s, labels = basis[idx]
        sc = full ^ s
        if sc not in by_state:
            continue
        circles, _, r = slices.circles(s)
        circles_bar, _, r_bar = slices_bar.circles(sc)
        assert circles == circles_bar and r == r_bar, "mirror circles differ"
        ones = [j for j in range(D.n) if (s >> j) & 1]
        sgn = -1 if sum(ones) & 1 else 1
        for labels_bar, coef_bar in by_state[sc]:
            val = ring.mul(coef, coef_bar)
            for l, m in zip(labels, labels_bar):
                val = ring.mul(val, _pair_labels(ring, l, m))
                if val == ring.zero:
                    break
            if val != ring.zero:
                if sgn < 0:
                    val = ring.neg(val)
                total = ring.add(total, val)
    return total


def mirror_pairing(diagram, ring=QH):
    """2x2 pairing matrix of (alpha, beta) against (alpha-bar, beta-bar).

    Exactly two entries are nonzero, both of the form +-h^r, and they
    sit on one diagonal; which diagonal depends only on the coloring
    convention for the mirror.  Returns the matrix.
    """
    if isinstance(ring, str):
        ring = get_ring(ring)
    if diagram.n_components != 1:
        raise NotAKnotError("mirror pairing implemented for knots")
    Dbar = mirror(diagram)
    cx = ChainComplex(diagram, ring)
    cxb = ChainComplex(Dbar, ring)
    _, a = alpha_cycle(cx.slices)
    _, b = beta_cycle(cx.slices)
    _, ab = alpha_cycle(cxb.slices)
    _, bb = beta_cycle(cxb.slices)
    mat = [[chain_pairing(cx.slices, cxb.slices, 0, x, y)
            for y in (ab, bb)] for x in (a, b)]
    r = diagram.seifert().r
    hr = ring.mul_cpow(ring.one, r)
    diag_main = mat[0][1] == ring.zero and mat[1][0] == ring.zero
    diag_anti = mat[0][0] == ring.zero and mat[1][1] == ring.zero
    nz = [v for row in mat for v in row if v != ring.zero]
    ok = (diag_main != diag_anti) and len(nz) == 2 and all(
        ring.normalize(v)[0] == ring.normalize(hr)[0] for v in nz)
    if not ok:
        raise AssertionError(f"unexpected pairing matrix {mat}")
    return mat
