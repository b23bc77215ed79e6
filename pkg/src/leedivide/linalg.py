"""Sparse exact linear algebra over the Euclidean ring descriptors.

Matrices are column-major dicts of dicts; vectors are dicts mapping
index to a nonzero ring element.  All eliminations use unimodular
operations only, so kernels come out as direct summands and Smith
divisors are honest invariant factors.

Transforms are materialized only on request: the homology pipeline
instead passes an augmented block through the elimination, which keeps
the footprint at roughly twice the input matrix.
"""


class SparseMatrix:
    """Column-major sparse matrix over a ring descriptor."""

    __slots__ = ("ring", "rows", "cols", "col", "rownz")

    def __init__(self, ring, rows, cols):
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self.col = {}            # j -> {i: val}
        self.rownz = {}          # i -> set of j

    @classmethod
    def identity(cls, ring, n):
        m = cls(ring, n, n)
        for i in range(n):
            m.set(i, i, ring.one)
        return m

    @classmethod
    def from_dense(cls, ring, entries):
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        m = cls(ring, rows, cols)
        for i, row in enumerate(entries):
            for j, val in enumerate(row):
                if val != ring.zero:
                    m.set(i, j, val)
        return m

    def to_dense(self):
        zero = self.ring.zero
        out = [[zero] * self.cols for _ in range(self.rows)]
        for j, colv in self.col.items():
            for i, val in colv.items():
                out[i][j] = val
        return out

    def copy(self):
        m = SparseMatrix(self.ring, self.rows, self.cols)
        m.col = {j: dict(c) for j, c in self.col.items()}
        m.rownz = {i: set(s) for i, s in self.rownz.items()}
        return m

    def get(self, i, j):
        return self.col.get(j, {}).get(i, self.ring.zero)

    def set(self, i, j, val):
        colv = self.col.get(j)
        if val == self.ring.zero:
            if colv and i in colv:
                del colv[i]
                if not colv:
                    del self.col[j]
                s = self.rownz.get(i)
                s.discard(j)
                if not s:
                    del self.rownz[i]
            return
        if colv is None:
            colv = self.col[j] = {}
        colv[i] = val
        self.rownz.setdefault(i, set()).add(j)

    def set_column(self, j, vec):
        for i, val in list(self.col.get(j, {}).items()):
            self.set(i, j, self.ring.zero)
        for i, val in vec.items():
            if val != self.ring.zero:
                self.set(i, j, val)

    def column(self, j):
        return dict(self.col.get(j, {}))

    def row(self, i):
        return {j: self.col[j][i] for j in self.rownz.get(i, ())}

    def nnz(self):
        return sum(len(c) for c in self.col.values())

    # -- elementary unimodular operations -----------------------------------

    def col_axpy(self, dst, src, q):
        """col_dst -= q * col_src."""
        ring = self.ring
        srcv = self.col.get(src)
        if not srcv or q == ring.zero:
            return
        for i, val in list(srcv.items()):
            self.set(i, dst, ring.sub(self.get(i, dst), ring.mul(q, val)))

    def col_scale(self, j, unit):
        ring = self.ring
        colv = self.col.get(j)
        if not colv:
            return
        for i in list(colv):
            colv[i] = ring.mul(unit, colv[i])

    def col_swap(self, j1, j2):
        if j1 == j2:
            return
        c1, c2 = self.column(j1), self.column(j2)
        self.set_column(j1, c2)
        self.set_column(j2, c1)

    def row_axpy(self, dst, src, q):
        """row_dst -= q * row_src."""
        ring = self.ring
        if q == ring.zero:
            return
        for j in list(self.rownz.get(src, ())):
            val = self.col[j].get(src)
            if val is not None:
                self.set(dst, j, ring.sub(self.get(dst, j), ring.mul(q, val)))

    def row_addmul(self, dst, src, q):
        """row_dst += q * row_src."""
        ring = self.ring
        if q == ring.zero:
            return
        for j in list(self.rownz.get(src, ())):
            val = self.col[j].get(src)
            if val is not None:
                self.set(dst, j, ring.add(self.get(dst, j), ring.mul(q, val)))

    def row_scale(self, i, unit):
        ring = self.ring
        for j in list(self.rownz.get(i, ())):
            self.col[j][i] = ring.mul(unit, self.col[j][i])

    def row_swap(self, i1, i2):
        if i1 == i2:
            return
        for j in set(self.rownz.get(i1, ())) | set(self.rownz.get(i2, ())):
            colv = self.col[j]
            v1, v2 = colv.get(i1), colv.get(i2)
            zero = self.ring.zero
            self.set(i1, j, v2 if v2 is not None else zero)
            self.set(i2, j, v1 if v1 is not None else zero)


# -- vectors ------------------------------------------------------------------


def vec_addmul(ring, acc, vec, coef):
    """acc += coef * vec, in place; acc and vec are {index: value} dicts."""
    if coef == ring.zero:
        return acc
    for i, val in vec.items():
        new = ring.add(acc.get(i, ring.zero), ring.mul(coef, val))
        if new == ring.zero:
            acc.pop(i, None)
        else:
            acc[i] = new
    return acc


def vec_scale(ring, vec, coef):
    if coef == ring.zero:
        return {}
    return {i: ring.mul(coef, v) for i, v in vec.items()}


def mat_vec(ring, mat, vec):
    out = {}
    for j, coef in vec.items():
        colv = mat.col.get(j)
        if colv:
            vec_addmul(ring, out, colv, coef)
    return out


# -- column echelon ------------------------------------------------------------


def column_echelon(A, aug=None, track=False):
    """Unimodular column reduction of A, in place.

    After the call a column of A is either a pivot column or identically
    zero; the pivot columns are independent over the (domain) ring, so
    the zero columns locate a direct-summand basis of ker A.

    Returns ``(pivots, V, W)``: pivots is a list of (row, col); with
    ``track`` set, V collects the column operations (A_in @ V = A_out)
    and W = V**-1.

    ``aug``, when given, must have A.cols rows.  It is carried through
    as W @ aug, i.e. if it enters holding vectors expressed in the old
    column basis it leaves holding their coordinates in the new one.
    """
    ring = A.ring
    V = SparseMatrix.identity(ring, A.cols) if track else None
    W = SparseMatrix.identity(ring, A.cols) if track else None

    def axpy(dst, src, q):
        A.col_axpy(dst, src, q)
        if aug is not None:
            aug.row_addmul(src, dst, q)
        if track:
            V.col_axpy(dst, src, q)
            W.row_addmul(src, dst, q)

    def scale(j, unit):
        A.col_scale(j, unit)
        inv = ring.inv_unit(unit)
        if aug is not None:
            aug.row_scale(j, inv)
        if track:
            V.col_scale(j, unit)
            W.row_scale(j, inv)

    live = set(range(A.cols))
    order = sorted(A.rownz.keys(), key=lambda r: (len(A.rownz[r]), r))
    pivots = []
    for r in order:
        while True:
            cols_r = [j for j in A.rownz.get(r, ()) if j in live]
            if not cols_r:
                break
            if len(cols_r) == 1:
                c0 = cols_r[0]
                _, unit = ring.normalize(A.col[c0][r])
                if unit != ring.one:
                    scale(c0, unit)
                pivots.append((r, c0))
                live.discard(c0)
                break
            c0 = min(cols_r, key=lambda j: (ring.size(A.col[j][r]), j))
            piv = A.col[c0][r]
            for j in cols_r:
                if j == c0:
                    continue
                q, _ = ring.divmod(A.col[j][r], piv)
                if q != ring.zero:
                    axpy(j, c0, q)
    return pivots, V, W


# -- Smith normal form -----------------------------------------------------------


class SmithForm:
    """Diagonal data of a Smith reduction.

    ``entries`` is a list of (row, col, divisor), unit-normalized, with
    the divisor chain ascending.  U/Uinv are tracked on request only; V
    never is (column operations do not affect quotient coordinates).
    """

    def __init__(self, ring, shape, entries, U=None, Uinv=None):
        self.ring = ring
        self.shape = shape
        self.entries = entries
        self.U = U
        self.Uinv = Uinv

    @property
    def rank(self):
        return len(self.entries)

    @property
    def divisors(self):
        return [d for (_, _, d) in self.entries]

    @property
    def row_divisor(self):
        return {r: d for (r, _, d) in self.entries}

    def torsion(self):
        return [d for d in self.divisors if not self.ring.is_unit(d)]


def smith_normal_form(M, aug=None, track_u=False, track_uinv=False):
    """Smith reduction of M in place by unimodular row/column operations.

    Pivots are Markowitz-style: a sparsest live column first, then the
    entry of smallest Euclidean size.  Cube differentials are extremely
    sparse and naive pivot choices explode the intermediate entries.

    ``aug`` must have M.rows rows and is carried through as U @ aug.
    """
    ring = M.ring
    U = SparseMatrix.identity(ring, M.rows) if track_u else None
    Uinv = SparseMatrix.identity(ring, M.rows) if track_uinv else None

    def row_op(dst, src, q):
        M.row_axpy(dst, src, q)
        if aug is not None:
            aug.row_axpy(dst, src, q)
        if track_u:
            U.row_axpy(dst, src, q)
        if track_uinv:
            Uinv.col_axpy(src, dst, ring.neg(q))

    def row_swap(i1, i2):
        M.row_swap(i1, i2)
        if aug is not None:
            aug.row_swap(i1, i2)
        if track_u:
            U.row_swap(i1, i2)
        if track_uinv:
            Uinv.col_swap(i1, i2)

    def row_scale(i, unit):
        M.row_scale(i, unit)
        if aug is not None:
            aug.row_scale(i, unit)
        if track_u:
            U.row_scale(i, unit)
        if track_uinv:
            inv = ring.inv_unit(unit)
            for r, val in list(Uinv.col.get(i, {}).items()):
                Uinv.set(r, i, ring.mul(inv, val))

    live_rows = set(M.rownz.keys())
    live_cols = set(M.col.keys())
    positions = []

    while True:
        live_cols = {j for j in live_cols if M.col.get(j)}
        if not live_cols:
            break
        c = min(live_cols, key=lambda j: (len(M.col[j]), j))
        colv = M.col[c]
        r = min(colv, key=lambda i: (len(M.rownz[i]), ring.size(colv[i]), i))
        while True:
            # clear column c by row operations
            colv = M.col.get(c, {})
            for i in [i for i in colv if i != r]:
                q, _ = ring.divmod(M.col[c][i], M.col[c][r])
                row_op(i, r, q)
            colv = M.col.get(c, {})
            rest = [i for i in colv if i != r]
            if rest:
                i = min(rest, key=lambda i: (ring.size(colv[i]), i))
                row_swap(r, i)
                continue
            # clear row r by column operations
            rowjs = [j for j in M.rownz.get(r, ()) if j != c]
            for j in rowjs:
                q, _ = ring.divmod(M.col[j][r], M.col[c][r])
                M.col_axpy(j, c, q)
            rowjs = [j for j in M.rownz.get(r, ()) if j != c]
            if rowjs:
                j = min(rowjs, key=lambda j: (ring.size(M.col[j][r]), j))
                M.col_swap(c, j)
                continue
            if len(M.col.get(c, {})) == 1:
                break
        _, unit = ring.normalize(M.col[c][r])
        if unit != ring.one:
            row_scale(r, unit)
        positions.append((r, c))
        live_rows.discard(r)
        live_cols.discard(c)

    # enforce the divisor chain d_i | d_j on the recorded diagonal
    changed = True
    while changed:
        changed = False
        for ii in range(len(positions)):
            for jj in range(len(positions)):
                if ii == jj:
                    continue
                ri, ci = positions[ii]
                rj, cj = positions[jj]
                di = M.col[ci][ri]
                dj = M.col[cj][rj]
                if ring.divmod(dj, di)[1] == ring.zero:
                    continue
                changed = True
                M.col_axpy(ci, cj, ring.neg(ring.one))   # col ci += col cj
                while True:
                    a = M.col.get(ci, {}).get(ri, ring.zero)
                    b = M.col.get(ci, {}).get(rj, ring.zero)
                    if b == ring.zero:
                        break
                    if a == ring.zero or ring.size(b) < ring.size(a):
                        row_swap(ri, rj)
                        continue
                    q, _ = ring.divmod(a, b)
                    if q == ring.zero:
                        row_swap(ri, rj)
                        continue
                    row_op(ri, rj, q)
                g = M.col[ci][ri]
                stray = M.col.get(cj, {}).get(ri, ring.zero)
                if stray != ring.zero:
                    q = ring.exact_div(stray, g)
                    M.col_axpy(cj, ci, q)
                for (r0, c0) in ((ri, ci), (rj, cj)):
                    val = M.col.get(c0, {}).get(r0, ring.zero)
                    if val != ring.zero:
                        _, unit = ring.normalize(val)
                        if unit != ring.one:
                            row_scale(r0, unit)

    entries = [(r, c, M.col[c][r]) for (r, c) in positions]
    entries.sort(key=lambda e: (ring.size(e[2]), e[0]))
    return SmithForm(ring, (M.rows, M.cols), entries, U=U, Uinv=Uinv)
