"""The state cube and its folded chain complex.

States are bitmasks over the crossings (bit j = resolution at crossing
j).  The chain group at homological degree i is spanned by enhanced
states of weight i + n^- : a state together with a label 1 or X on each
of its circles.  Basis order: states ascending as integers, labels in
lexicographic order with circle 0 (minimal arc) most significant; free
loops sit after all arc circles.

Degree slices are built lazily and cached, so computing a divisibility
invariant touches only the two or three slices around degree zero.
"""

from functools import lru_cache

from .linalg import SparseMatrix
from .rings import INFINITY

MINUS_INFINITY = "-infinity"

L1, LX = 0, 1  # labels: 0 is the unit generator, 1 is X


def frobenius_apply(ring, op, labels):
    """Structure constants of A = R[X]/(X^2 - hX - t).

    op is one of "M", "DELTA", "UNIT", "COUNIT"; labels a tuple of 0/1
    (for 1/X).  Returns a list of (labels_out, coefficient).
    """
    one, h, t = ring.one, ring.h, ring.t
    if op == "M":
        a, b = labels
        if a == L1 and b == L1:
            return [((L1,), one)]
        if a == LX and b == LX:
            out = []
            if h != ring.zero:
                out.append(((LX,), h))
            if t != ring.zero:
                out.append(((L1,), t))
            return out
        return [((LX,), one)]
    if op == "DELTA":
        (a,) = labels
        if a == L1:
            out = [((LX, L1), one), ((L1, LX), one)]
            if h != ring.zero:
                out.append(((L1, L1), ring.neg(h)))
            return out
        out = [((LX, LX), one)]
        if t != ring.zero:
            out.append(((L1, L1), t))
        return out
    if op == "UNIT":
        return [((L1,), one)]
    if op == "COUNIT":
        (a,) = labels
        return [((), one)] if a == LX else []
    raise ValueError(f"unknown Frobenius operation {op!r}")


class ChainSlices:
    """Lazy degree slices of the cube complex of one diagram over one ring."""

    def __init__(self, diagram, ring, sign_rule="below"):
        self.diagram = diagram
        self.ring = ring
        if sign_rule not in ("below", "above"):
            raise ValueError("sign_rule must be 'below' or 'above'")
        self.sign_rule = sign_rule
        self.n = diagram.n
        self.n_neg = diagram.n_neg
        self.n_pos = diagram.n_pos
        self._basis = {}
        self._matrix = {}
        self._circ = {}

    # -- states and circles ---------------------------------------------------

    def min_degree(self):
        return -self.n_neg

    def max_degree(self):
        return self.n_pos

    def states(self, weight):
        if weight < 0 or weight > self.n:
            return []
        from itertools import combinations
        out = [sum(1 << j for j in pos)
               for pos in combinations(range(self.n), weight)]
        out.sort()
        return out

    def circles(self, state):
        data = self._circ.get(state)
        if data is None:
            bits = tuple((state >> j) & 1 for j in range(self.n))
            data = self.diagram.circles_of_state(bits)
            self._circ[state] = data
        return data

    # -- basis ------------------------------------------------------------------

    def basis(self, i):
        cached = self._basis.get(i)
        if cached is not None:
            return cached
        w = i + self.n_neg
        elems = []
        from itertools import product
        for s in self.states(w):
            _, _, r = self.circles(s)
            for labels in product((L1, LX), repeat=r):
                elems.append((s, labels))
        index = {e: k for k, e in enumerate(elems)}
        self._basis[i] = (elems, index)
        return self._basis[i]

    def dim(self, i):
        return len(self.basis(i)[0])

    def edge_sign(self, state, j):
        if self.sign_rule == "below":
            ones = bin(state & ((1 << j) - 1)).count("1")
        else:
            ones = bin(state >> (j + 1)).count("1")
        return -1 if ones & 1 else 1

    def edge_images(self, state, j, labels):
        """Apply the cube edge at crossing j (bit 0 -> 1), unsigned.

        Returns (new_state, [(new_labels, coef), ...]).
        """
        D = self.diagram
        ring = self.ring
        s2 = state | (1 << j)
        circles, arc_to, r = self.circles(state)
        circles2, arc_to2, r2 = self.circles(s2)
        x = D.crossings[j]
        c1, c2 = arc_to[x[0]], arc_to[x[2]]
        narc, narc2 = len(circles), len(circles2)

        def target_of(k):
            if k >= narc:                       # free loop rides along
                return narc2 + (k - narc)
            return arc_to2[circles[k][0]]

        out = []
        if c1 != c2:
            tgt = arc_to2[x[0]]
            terms = frobenius_apply(ring, "M", (labels[c1], labels[c2]))
            for (lab_out,), coef in terms:
                new = [None] * r2
                new[tgt] = lab_out
                for k in range(r):
                    if k in (c1, c2):
                        continue
                    new[target_of(k)] = labels[k]
                out.append((tuple(new), coef))
        else:
            t1, t2 = arc_to2[x[0]], arc_to2[x[2]]
            if t1 == t2:
                raise AssertionError("edge neither merges nor splits")
            terms = frobenius_apply(ring, "DELTA", (labels[c1],))
            for (la, lb), coef in terms:
                new = [None] * r2
                new[t1], new[t2] = la, lb
                for k in range(r):
                    if k == c1:
                        continue
                    new[target_of(k)] = labels[k]
                out.append((tuple(new), coef))
        return s2, out

    # -- boundary ---------------------------------------------------------------

    def matrix(self, i):
        """The differential d^i: C^i -> C^{i+1} as a sparse matrix."""
        key = i
        m = self._matrix.get(key)
        if m is not None:
            return m
        ring = self.ring
        src, src_index = self.basis(i)
        dst, dst_index = self.basis(i + 1)
        mat = SparseMatrix(ring, len(dst), len(src))
        for col, (s, labels) in enumerate(src):
            for j in range(self.n):
                if (s >> j) & 1:
                    continue
                sign = self.edge_sign(s, j)
                s2, terms = self.edge_images(s, j, labels)
                for new_labels, coef in terms:
                    if sign < 0:
                        coef = ring.neg(coef)
                    row = dst_index[(s2, new_labels)]
                    cur = mat.get(row, col)
                    mat.set(row, col, ring.add(cur, coef))
        self._matrix[key] = mat
        return mat

    def apply_boundary(self, i, vec):
        """d^i applied to a sparse vector over basis(i)."""
        ring = self.ring
        src, _ = self.basis(i)
        _, dst_index = self.basis(i + 1)
        out = {}
        for col, coef in vec.items():
            s, labels = src[col]
            for j in range(self.n):
                if (s >> j) & 1:
                    continue
                sign = self.edge_sign(s, j)
                s2, terms = self.edge_images(s, j, labels)
                for new_labels, tcoef in terms:
                    val = ring.mul(coef, tcoef)
                    if sign < 0:
                        val = ring.neg(val)
                    row = dst_index[(s2, new_labels)]
                    cur = ring.add(out.get(row, ring.zero), val)
                    if cur == ring.zero:
                        out.pop(row, None)
                    else:
                        out[row] = cur
        return out

    # -- q-grading ---------------------------------------------------------------

    def qdeg_basis(self, state, labels):
        w = bin(state).count("1")
        _, _, r = self.circles(state)
        deg = -2 * sum(1 for l in labels if l == LX)
        return deg + w + r + self.n_pos - 2 * self.n_neg

    def qdeg_vector(self, i, vec):
        """Minimum q-degree over the support; MINUS_INFINITY for zero."""
        if not vec:
            return MINUS_INFINITY
        basis, _ = self.basis(i)
        best = None
        for idx, coef in vec.items():
            s, labels = basis[idx]
            q0 = self.qdeg_basis(s, labels)
            for shift in self.ring.monomial_qdegs(coef):
                q = q0 + shift
                if best is None or q < best:
                    best = q
        return best

    def dump(self, i):
        """Coordinate triplets (row, col, coefficient-string) of d^i."""
        mat = self.matrix(i)
        out = []
        for j in sorted(mat.col):
            for r in sorted(mat.col[j]):
                out.append((r, j, self.ring.fmt(mat.col[j][r])))
        out.sort(key=lambda t: (t[1], t[0]))
        return out
