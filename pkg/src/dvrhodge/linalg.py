"""Dense matrices over a DVR and Smith normal form by valuation pivoting.

All submodules of a free module ``R^n`` are carried as generator matrices
whose columns span them.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import fp
from .errors import DimensionMismatchError
from .ring import INF


class Matrix:
    """An ``nrows x ncols`` matrix with entries in ``ring``.

    Treated as immutable; every operation returns a fresh matrix.
    """

    __slots__ = ("ring", "rows", "nrows", "ncols")

    def __init__(self, ring, rows, ncols=None):
        self.ring = ring
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        if ncols is None:
            if not self.rows:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(self.rows[0])
        self.ncols = ncols
        for r in self.rows:
            if len(r) != ncols:
                raise DimensionMismatchError("ragged matrix rows")

    @classmethod
    def zeros(cls, ring, m, n):
        z = ring.zero
        return cls(ring, [[z] * n for _ in range(m)], n)

    @classmethod
    def identity(cls, ring, n):
        z, o = ring.zero, ring.one
        return cls(ring, [[o if i == j else z for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_ints(cls, ring, rows, ncols=None):
        return cls(ring, [[ring.from_int(x) for x in r] for r in rows], ncols)

    @classmethod
    def column(cls, ring, entries):
        return cls(ring, [[x] for x in entries], 1)

    @classmethod
    def diagonal(cls, ring, entries, m=None, n=None):
        k = len(entries)
        m = k if m is None else m
        n = k if n is None else n
        out = cls.zeros(ring, m, n)
        for i, x in enumerate(entries):
            out.rows[i][i] = x
        return out

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def copy(self):
        return Matrix(self.ring, self.rows, self.ncols)

    @property
    def T(self):
        return Matrix(self.ring, [list(c) for c in zip(*self.rows)] if self.nrows else
                      [[] for _ in range(self.ncols)], self.nrows)

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise DimensionMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        z = self.ring.zero
        cols = list(zip(*other.rows)) if other.nrows else [()] * other.ncols
        out = []
        for r in self.rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            row = []
            for c in cols:
                s = z
                for k, a in nz:
                    b = c[k]
                    if b:
                        s = s + a * b
                row.append(s)
            out.append(row)
        return Matrix(self.ring, out, other.ncols)

    def __add__(self, other):
        self._same_shape(other)
        return Matrix(self.ring, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other):
        self._same_shape(other)
        return Matrix(self.ring, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self):
        return Matrix(self.ring, [[-a for a in r] for r in self.rows], self.ncols)

    def scale(self, c):
        return Matrix(self.ring, [[c * a for a in r] for r in self.rows], self.ncols)

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise DimensionMismatchError(f"shape {self.shape} vs {other.shape}")

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, tuple(tuple(r) for r in self.rows)))

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)

    def take_cols(self, idx):
        idx = list(idx)
        return Matrix(self.ring, [[r[j] for j in idx] for r in self.rows], len(idx))

    def take_rows(self, idx):
        return Matrix(self.ring, [self.rows[i] for i in idx], self.ncols)

    def col(self, j):
        return self.take_cols([j])

    def column_list(self, j):
        return [r[j] for r in self.rows]

    def min_valuation(self):
        v = self.ring.valuation
        return min((v(a) for r in self.rows for a in r if a), default=INF)

    def format_rows(self):
        f = self.ring.format
        return [[f(a) for a in r] for r in self.rows]

    def __repr__(self):
        return f"Matrix({self.format_rows()!r})"


def hstack(ring, mats, nrows=None):
    mats = list(mats)
    if not mats:
        return Matrix(ring, [[] for _ in range(nrows or 0)], 0)
    m = mats[0].nrows
    for x in mats:
        if x.nrows != m:
            raise DimensionMismatchError("hstack row mismatch")
    rows = [sum((x.rows[i] for x in mats), []) for i in range(m)]
    return Matrix(ring, rows, sum(x.ncols for x in mats))


def vstack(ring, mats, ncols=None):
    mats = list(mats)
    if not mats:
        return Matrix(ring, [], ncols or 0)
    n = mats[0].ncols
    for x in mats:
        if x.ncols != n:
            raise DimensionMismatchError("vstack column mismatch")
    return Matrix(ring, [r for x in mats for r in x.rows], n)


def block_diag(ring, mats):
    m = sum(x.nrows for x in mats)
    n = sum(x.ncols for x in mats)
    out = Matrix.zeros(ring, m, n)
    i0 = j0 = 0
    for x in mats:
        for i, r in enumerate(x.rows):
            out.rows[i0 + i][j0:j0 + x.ncols] = r
        i0 += x.nrows
        j0 += x.ncols
    return out


@dataclass(frozen=True)
class SnfResult:
    """``P A Q = D`` and ``A = U D V`` with ``U = P^-1``, ``V = Q^-1``.

    ``exponents[i]`` is the valuation of ``D[i][i]`` for the nonzero diagonal
    entries; ``D[i][i] == pi**exponents[i]`` exactly.
    """

    U: Matrix
    D: Matrix
    V: Matrix
    exponents: tuple
    P: Matrix
    Q: Matrix

    @property
    def rank(self) -> int:
        return len(self.exponents)


def snf(A: Matrix, transforms=True) -> SnfResult:
    """Smith normal form; pivots on a minimal-valuation entry (lowest row, then column)."""
    R = A.ring
    m, n = A.shape
    val = R.valuation
    div = R.div
    D = [list(r) for r in A.rows]
    if transforms:
        z, o = R.zero, R.one
        P = [[o if i == j else z for j in range(m)] for i in range(m)]
        U = [[o if i == j else z for j in range(m)] for i in range(m)]
        Q = [[o if i == j else z for j in range(n)] for i in range(n)]
        V = [[o if i == j else z for j in range(n)] for i in range(n)]
    exps = []
    k = 0
    while k < m and k < n:
        best = INF
        bi = bj = -1
        for i in range(k, m):
            row = D[i]
            for j in range(k, n):
                a = row[j]
                if a:
                    v = val(a)
                    if v < best:
                        best, bi, bj = v, i, j
                        if v == 0:
                            break
            if best == 0:
                break
        if bi < 0:
            break
        if bi != k:
            D[k], D[bi] = D[bi], D[k]
            if transforms:
                P[k], P[bi] = P[bi], P[k]
                for r in U:
                    r[k], r[bi] = r[bi], r[k]
        if bj != k:
            for r in D:
                r[k], r[bj] = r[bj], r[k]
            if transforms:
                for r in Q:
                    r[k], r[bj] = r[bj], r[k]
                V[k], V[bj] = V[bj], V[k]
        pk = R.pi_power(best)
        unit = div(D[k][k], pk)
        if unit != R.one:
            uinv = div(R.one, unit)
            D[k] = [x * uinv if x else x for x in D[k]]
            D[k][k] = pk
            if transforms:
                P[k] = [x * uinv if x else x for x in P[k]]
                for r in U:
                    if r[k]:
                        r[k] = r[k] * unit
        rowk = D[k]
        for i in range(k + 1, m):
            a = D[i][k]
            if not a:
                continue
            c = div(a, pk)
            ri = D[i]
            for j in range(k + 1, n):
                b = rowk[j]
                if b:
                    ri[j] = ri[j] - c * b
            ri[k] = R.zero
            if transforms:
                Pk, Pi = P[k], P[i]
                for j in range(m):
                    b = Pk[j]
                    if b:
                        Pi[j] = Pi[j] - c * b
                for r in U:
                    if r[i]:
                        r[k] = r[k] + c * r[i]
        for j in range(k + 1, n):
            a = rowk[j]
            if not a:
                continue
            c = div(a, pk)
            rowk[j] = R.zero
            if transforms:
                for r in Q:
                    if r[k]:
                        r[j] = r[j] - c * r[k]
                Vk, Vj = V[k], V[j]
                for t in range(n):
                    b = Vj[t]
                    if b:
                        Vk[t] = Vk[t] + c * b
        exps.append(int(best))
        k += 1
    Dm = Matrix(R, D, n)
    if transforms:
        return SnfResult(Matrix(R, U, m), Dm, Matrix(R, V, n), tuple(exps), Matrix(R, P, m), Matrix(R, Q, n))
    return SnfResult(None, Dm, None, tuple(exps), None, None)


def elementary_divisors(A: Matrix):
    return snf(A, transforms=False).exponents


def rank(A: Matrix) -> int:
    """Rank over the fraction field."""
    return len(elementary_divisors(A))


def kernel_basis(A: Matrix, s: SnfResult = None) -> Matrix:
    """Columns freely generate ``ker(A)``; the span is saturated in ``R^ncols``."""
    s = s or snf(A)
    return s.Q.take_cols(range(s.rank, A.ncols))


def cokernel_invariants(A: Matrix):
    """``(free_rank, exponents)`` of ``R^nrows / im(A)`` with unit divisors dropped."""
    ex = elementary_divisors(A)
    return A.nrows - len(ex), tuple(e for e in ex if e > 0)


def solve(A: Matrix, B: Matrix, s: SnfResult = None):
    """``X`` with ``A X = B`` exactly, or ``None`` if there is no solution over R."""
    if A.nrows != B.nrows:
        raise DimensionMismatchError("solve: row mismatch")
    R = A.ring
    s = s or snf(A)
    Y = s.P @ B
    r = s.rank
    for i in range(r, A.nrows):
        if any(Y.rows[i]):
            return None
    Xp = []
    for i in range(r):
        e = s.exponents[i]
        row = Y.rows[i]
        if e:
            if any(x and R.valuation(x) < e for x in row):
                return None
            pe = R.pi_power(e)
            row = [R.div(x, pe) if x else x for x in row]
        Xp.append(row)
    z = R.zero
    for _ in range(r, A.ncols):
        Xp.append([z] * B.ncols)
    return s.Q @ Matrix(R, Xp, B.ncols)


def solve_vector(A: Matrix, b, s: SnfResult = None):
    X = solve(A, Matrix.column(A.ring, b), s)
    return None if X is None else X.column_list(0)


def image_basis(A: Matrix, s: SnfResult = None) -> Matrix:
    """A free basis of the column span of ``A``."""
    s = s or snf(A)
    R = A.ring
    cols = s.U.take_cols(range(s.rank))
    return Matrix(R, [[x * R.pi_power(e) if e else x for x, e in zip(r, s.exponents)]
                      for r in cols.rows], s.rank)


def saturation(A: Matrix, s: SnfResult = None) -> Matrix:
    """Basis of ``(span A) tensor K  cap  R^nrows``."""
    s = s or snf(A)
    return s.U.take_cols(range(s.rank))


def contains(A: Matrix, B: Matrix) -> bool:
    """True when every column of ``B`` lies in the span of ``A``."""
    return solve(A, B) is not None


def intersect_submodules(B1: Matrix, B2: Matrix) -> Matrix:
    if B1.nrows != B2.nrows:
        raise DimensionMismatchError("submodules live in different free modules")
    R = B1.ring
    K = kernel_basis(hstack(R, [B1, -B2]))
    top = K.take_rows(range(B1.ncols))
    return image_basis(B1 @ top)


def preimage(A: Matrix, S: Matrix) -> Matrix:
    """Basis of ``{x : A x in span S}``."""
    R = A.ring
    K = kernel_basis(hstack(R, [A, -S]))
    return image_basis(K.take_rows(range(A.ncols)))


def residue_reduce(A: Matrix):
    """Entrywise reduction into the residue field, as a list of int rows."""
    res = A.ring.residue
    return [[res(x) for x in r] for r in A.rows]


def lift_residue(ring, rows, ncols=None) -> Matrix:
    return Matrix(ring, [[ring.lift_residue(x) for x in r] for r in rows], ncols)


def det(A: Matrix):
    """Determinant by elimination, pivoting on a minimal-valuation entry so every
    quotient stays in the ring."""
    if A.nrows != A.ncols:
        raise DimensionMismatchError("det of a non-square matrix")
    R = A.ring
    M = [list(r) for r in A.rows]
    n = A.nrows
    d = R.one
    for k in range(n):
        live = [i for i in range(k, n) if M[i][k]]
        if not live:
            return R.zero
        piv = min(live, key=lambda i: R.valuation(M[i][k]))
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            d = -d
        pk = M[k][k]
        d = d * pk
        for i in range(k + 1, n):
            if M[i][k]:
                c = M[i][k] / pk
                M[i] = [a - c * b for a, b in zip(M[i], M[k])]
    return d


def is_unimodular(A: Matrix) -> bool:
    return A.nrows == A.ncols and (A.nrows == 0 or A.ring.valuation(det(A)) == 0)


def fp_rank(A: Matrix) -> int:
    return fp.rank(residue_reduce(A), A.ring.p)
