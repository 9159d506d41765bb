"""Exact rational dense linear algebra with deterministic leftmost pivoting.

Matrices are lists of lists of Fraction.  All routines pick pivots as the
topmost unused row in the leftmost nonzero column, so kernels, witnesses and
echelon forms depend only on the input ordering.
"""

from __future__ import annotations

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def zeros(m, n):
    return [[ZERO] * n for _ in range(m)]


def identity(n):
    mat = zeros(n, n)
    for i in range(n):
        mat[i][i] = ONE
    return mat


def copy_matrix(mat):
    return [row[:] for row in mat]


def mat_mul(a, b):
    m = len(a)
    n = len(b[0]) if b else 0
    k = len(b)
    out = zeros(m, n)
    for i in range(m):
        arow = a[i]
        orow = out[i]
        for t in range(k):
            x = arow[t]
            if x:
                brow = b[t]
                for j in range(n):
                    if brow[j]:
                        orow[j] += x * brow[j]
    return out


def mat_add(a, b, scale=ONE):
    return [[x + scale * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, c):
    return [[c * x for x in row] for row in a]


def mat_vec(a, v):
    return [sum((x * y for x, y in zip(row, v) if x and y), ZERO) for row in a]


def is_zero_matrix(a):
    return all(not x for row in a for x in row)


def rref(mat):
    """Reduced row echelon form; returns (rref matrix, pivot column list)."""
    a = copy_matrix(mat)
    m = len(a)
    n = len(a[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        sel = None
        for i in range(r, m):
            if a[i][c]:
                sel = i
                break
        if sel is None:
            continue
        a[r], a[sel] = a[sel], a[r]
        inv = ONE / a[r][c]
        if inv != ONE:
            a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                ari = a[i]
                arr = a[r]
                for j in range(c, n):
                    if arr[j]:
                        ari[j] -= f * arr[j]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(mat):
    return len(rref(mat)[1])


def solve(mat, rhs):
    """One solution x of mat @ x = rhs, or None if rhs is not in the image.

    The witness is the one with zero free variables (leftmost-pivot
    convention), so it is deterministic.
    """
    m = len(mat)
    n = len(mat[0]) if m else 0
    aug = [mat[i][:] + [rhs[i]] for i in range(m)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    x = [ZERO] * n
    for r, c in enumerate(pivots):
        x[c] = red[r][n]
    return x


def kernel_basis(mat):
    """Basis of the right kernel; one vector per non-pivot column."""
    m = len(mat)
    n = len(mat[0]) if m else 0
    red, pivots = rref(mat)
    pivset = set(pivots)
    basis = []
    for free in range(n):
        if free in pivset:
            continue
        v = [ZERO] * n
        v[free] = ONE
        for r, c in enumerate(pivots):
            v[c] = -red[r][free]
        basis.append(v)
    return basis


def column_space_basis(mat):
    """Indices of a column basis of the image (leftmost choice)."""
    _, pivots = rref(mat)
    return pivots


def invert(mat):
    n = len(mat)
    aug = [mat[i][:] + identity(n)[i] for i in range(n)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return [row[n:] for row in red]


def in_span(vectors, target):
    """Is target a linear combination of the given vectors (as rows)?"""
    if not vectors:
        return all(not x for x in target)
    cols = len(vectors[0])
    mat = [[vectors[j][i] for j in range(len(vectors))] for i in range(cols)]
    return solve(mat, list(target)) is not None


# ---------------------------------------------------------------------------
# sparse elimination over arbitrary orderable row labels


class SparseEliminator:
    """Incremental exact Gaussian elimination on sparse columns.

    Row labels may be any orderable hashables; pivoting is deterministic
    (smallest label of the reduced column).
    """

    def __init__(self, track_combos=False):
        self.pivots = {}
        self.combos = {} if track_combos else None
        self._count = 0

    @property
    def rank(self):
        return len(self.pivots)

    def add(self, col):
        """Feed one column; returns True if it increased the rank."""
        idx = self._count
        self._count += 1
        col = dict(col)
        combo = {idx: ONE} if self.combos is not None else None
        # pivot columns only touch labels >= their lead, so always reducing
        # at the smallest reducible label terminates
        while True:
            live = [k for k in col if col[k] and k in self.pivots]
            if not live:
                break
            key = min(live)
            piv = self.pivots[key]
            c = col[key]
            for k, v in piv.items():
                cur = col.get(k, ZERO) - c * v
                if cur:
                    col[k] = cur
                elif k in col:
                    del col[k]
            if combo is not None:
                for j, v in self.combos[key].items():
                    cur = combo.get(j, ZERO) - c * v
                    if cur:
                        combo[j] = cur
                    elif j in combo:
                        del combo[j]
        col = {k: v for k, v in col.items() if v}
        if not col:
            return False
        lead = min(col)
        inv = ONE / col[lead]
        self.pivots[lead] = {k: v * inv for k, v in col.items()}
        if combo is not None:
            self.combos[lead] = {j: v * inv for j, v in combo.items()}
        return True

    def express(self, rhs):
        """Coefficients over the fed columns with sum = rhs, or None."""
        if self.combos is None:
            raise ValueError("eliminator built without combo tracking")
        rhs = dict(rhs)
        combo = {}
        while True:
            live = [k for k in rhs if rhs[k] and k in self.pivots]
            if not live:
                break
            key = min(live)
            piv = self.pivots[key]
            c = rhs[key]
            for k, v in piv.items():
                cur = rhs.get(k, ZERO) - c * v
                if cur:
                    rhs[k] = cur
                elif k in rhs:
                    del rhs[k]
            for j, v in self.combos[key].items():
                cur = combo.get(j, ZERO) + c * v
                if cur:
                    combo[j] = cur
                elif j in combo:
                    del combo[j]
        if any(rhs.values()):
            return None
        return combo


def sparse_rank(columns):
    elim = SparseEliminator()
    for col in columns:
        elim.add(col)
    return elim.rank
