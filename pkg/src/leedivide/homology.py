"""Homology presentations over the Euclidean coefficient rings.

For a degree i the presentation is computed in three steps:

1. column-reduce d^i unimodularly; the zero columns locate ker d^i as a
   direct summand, and the same operations (mirrored) rewrite any
   requested cycle and all columns of d^{i-1} in kernel coordinates;
2. Smith-reduce the rewritten d^{i-1} (the relation matrix), carrying
   the requested cycle coordinates through the row transform;
3. read off free rank, torsion divisors and per-cycle coordinates.

With ``full=True`` the transforms are materialized so that further
cycles can be projected later and free-part basis vectors can be lifted
back to honest cycles; the default mode materializes nothing beyond the
requested class coordinates, which is what the divisibility invariants
use on larger diagrams.
"""

from .cube import ChainSlices
from .errors import NotACycleError
from .linalg import SparseMatrix, column_echelon, mat_vec, smith_normal_form
from .rings import INFINITY


class HomologyPresentation:
    """H^i = ker d^i / im d^{i-1} with class coordinates."""

    def __init__(self, degree, ring, free_rows, tor_entries, class_coords,
                 machinery=None):
        self.degree = degree
        self.ring = ring
        self._free_rows = free_rows            # rows of the kernel coords
        self._tor_entries = tor_entries        # [(row, divisor)], nonunit
        self._class_coords = class_coords      # per cycle: (free list, tor list)
        self._m = machinery

    @property
    def free_rank(self):
        return len(self._free_rows)

    @property
    def torsion(self):
        return [d for (_, d) in self._tor_entries]

    def torsion_is_c_power(self):
        ring = self.ring
        for d in self.torsion:
            e = ring.c_valuation(d)
            if e is INFINITY:
                return False
            power = ring.normalize(ring.mul_cpow(ring.one, e))[0]
            if ring.normalize(d)[0] != power:
                return False
        return True

    def to_json(self):
        return {"degree": self.degree,
                "free_rank": self.free_rank,
                "torsion": [self.ring.fmt(d) for d in self.torsion]}

    # -- class coordinate access ------------------------------------------------

    def class_free_coords(self, idx):
        return self._class_coords[idx][0]

    def class_torsion_coords(self, idx):
        return self._class_coords[idx][1]

    def class_is_zero(self, idx):
        free, tor = self._class_coords[idx]
        zero = self.ring.zero
        return all(v == zero for v in free) and all(v == zero for (v, _) in tor)

    def class_valuation(self, idx):
        """c-divisibility of the class in the free quotient."""
        ring = self.ring
        vals = [ring.c_valuation(v) for v in self._class_coords[idx][0]]
        return min(vals, default=INFINITY)

    def class_valuation_full(self, idx):
        """c-divisibility in the full module, torsion included."""
        ring = self.ring
        bound = self.class_valuation(idx)
        for (v, d) in self._class_coords[idx][1]:
            val = ring.c_valuation(v)
            e = ring.c_valuation(d)
            if val is INFINITY or (e is not INFINITY and val >= e):
                continue
            if val < bound:
                bound = val
        return bound

    # -- full-mode operations -----------------------------------------------------

    def _require_full(self):
        if self._m is None:
            raise RuntimeError("presentation was not built with full=True")

    def project(self, vec):
        """Class coordinates (free list, torsion list) of a cycle in C^i."""
        self._require_full()
        ring = self.ring
        m = self._m
        w = mat_vec(ring, m["W"], vec)
        for c in m["pivot_cols"]:
            if w.get(c, ring.zero) != ring.zero:
                raise NotACycleError(f"vector is not a cycle at degree {self.degree}")
        x = {}
        for knew, kold in enumerate(m["kernel_cols"]):
            val = w.get(kold, ring.zero)
            if val != ring.zero:
                x[knew] = val
        y = mat_vec(ring, m["U"], x)
        free = [y.get(r, ring.zero) for r in self._free_rows]
        tor = [(ring.divmod(y.get(r, ring.zero), d)[1], d)
               for (r, d) in self._tor_entries]
        return free, tor

    def lift_free(self, j):
        """A cycle representing the j-th free-part basis vector."""
        self._require_full()
        ring = self.ring
        m = self._m
        r = self._free_rows[j]
        xhat = m["Uinv"].column(r)
        out = {}
        for knew, val in xhat.items():
            kold = m["kernel_cols"][knew]
            colv = m["V"].col.get(kold)
            if colv:
                for i, v in colv.items():
                    cur = ring.add(out.get(i, ring.zero), ring.mul(val, v))
                    if cur == ring.zero:
                        out.pop(i, None)
                    else:
                        out[i] = cur
        return out


class ChainComplex:
    """Cached homology machine for one diagram over one ring."""

    def __init__(self, diagram, ring, sign_rule="below"):
        self.diagram = diagram
        self.ring = ring
        self.slices = ChainSlices(diagram, ring, sign_rule)

    def matrix(self, i):
        return self.slices.matrix(i)

    def presentation(self, i, cycles=(), full=False):
        ring = self.ring
        k = self.slices.dim(i)
        A = self.slices.matrix(i).copy()
        lo = self.slices.min_degree()
        if i - 1 >= lo:
            B = self.slices.matrix(i - 1)
        else:
            B = SparseMatrix(ring, k, 0)
        ncyc = len(cycles)
        aug = SparseMatrix(ring, k, ncyc + B.cols)
        for c, vec in enumerate(cycles):
            aug.set_column(c, vec)
        for j, colv in B.col.items():
            aug.set_column(ncyc + j, colv)

        pivots, V, W = column_echelon(A, aug=aug, track=full)
        pivot_cols = {c for (_r, c) in pivots}
        kernel_cols = sorted(set(range(k)) - pivot_cols)
        pos_of = {kold: knew for knew, kold in enumerate(kernel_cols)}

        # cycles and boundaries must have no component along the pivot columns
        for c in range(ncyc + B.cols):
            for r in list(aug.col.get(c, {})):
                if r in pivot_cols:
                    if c < ncyc:
                        raise NotACycleError(
                            f"cycle {c} is not in ker d^{i}")
                    raise AssertionError("d o d != 0: boundary left the kernel")

        M = SparseMatrix(ring, len(kernel_cols), B.cols)
        Y = SparseMatrix(ring, len(kernel_cols), ncyc)
        for c in range(ncyc + B.cols):
            colv = aug.col.get(c)
            if not colv:
                continue
            for r, val in colv.items():
                if c < ncyc:
                    Y.set(pos_of[r], c, val)
                else:
                    M.set(pos_of[r], c - ncyc, val)

        snf = smith_normal_form(M, aug=Y, track_u=full, track_uinv=full)
        pivot_rows = {r for (r, _c, _d) in snf.entries}
        free_rows = sorted(set(range(len(kernel_cols))) - pivot_rows)
        tor_entries = [(r, d) for (r, _c, d) in snf.entries
                       if not ring.is_unit(d)]

        class_coords = []
        for c in range(ncyc):
            colv = Y.col.get(c, {})
            free = [colv.get(r, ring.zero) for r in free_rows]
            tor = [(ring.divmod(colv.get(r, ring.zero), d)[1], d)
                   for (r, d) in tor_entries]
            class_coords.append((free, tor))

        machinery = None
        if full:
            machinery = {"V": V, "W": W, "pivots": pivots,
                         "pivot_cols": pivot_cols, "kernel_cols": kernel_cols,
                         "U": snf.U, "Uinv": snf.Uinv}
        return HomologyPresentation(i, ring, free_rows, tor_entries,
                                    class_coords, machinery)

    def homology_at(self, i, cycles=(), full=False):
        return self.presentation(i, cycles=cycles, full=full)

    def total_free_rank(self):
        lo, hi = self.slices.min_degree(), self.slices.max_degree()
        return sum(self.presentation(i).free_rank for i in range(lo, hi + 1))
