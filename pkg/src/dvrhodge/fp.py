"""Dense linear algebra over the residue field F_p.

Vectors are lists of ints in ``range(p)``; a subspace is given by a list of
spanning vectors. Matrices are lists of rows acting on column vectors.
"""

from __future__ import annotations


def echelon(vectors, p):
    """Reduced row echelon basis of the span of ``vectors``."""
    rows = [[x % p for x in v] for v in vectors]
    basis = []
    pivots = []
    for v in rows:
        for b, c in zip(basis, pivots):
            if v[c]:
                f = v[c]
                v = [(x - f * y) % p for x, y in zip(v, b)]
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            continue
        inv = pow(v[lead], -1, p)
        v = [(x * inv) % p for x in v]
        for k, b in enumerate(basis):
            if b[lead]:
                f = b[lead]
                basis[k] = [(x - f * y) % p for x, y in zip(b, v)]
        basis.append(v)
        pivots.append(lead)
    order = sorted(range(len(basis)), key=pivots.__getitem__)
    return [basis[i] for i in order]


def dim(vectors, p) -> int:
    return len(echelon(vectors, p))


def rank(matrix, p) -> int:
    return len(echelon(matrix, p))


def columns(matrix):
    if not matrix:
        return []
    return [list(c) for c in zip(*matrix)]


def nullspace(matrix, ncols, p):
    """Basis of ``{x : matrix @ x = 0}`` for a matrix with ``ncols`` columns."""
    rref = echelon(matrix, p)
    pivots = [next(i for i, x in enumerate(r) if x) for r in rref]
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for r, c in zip(rref, pivots):
            x[c] = (-r[f]) % p
        basis.append(x)
    return basis


def intersect(U, W, n, p):
    """Basis of span(U) ∩ span(W) inside F_p^n (Zassenhaus)."""
    if not U or not W:
        return []
    rows = [list(u) + list(u) for u in U] + [list(w) + [0] * n for w in W]
    out = []
    for r in echelon(rows, p):
        if not any(r[:n]):
            out.append(r[n:])
    return out


def contains(U, W, p) -> bool:
    """True when span(W) ⊂ span(U)."""
    return dim(list(U) + list(W), p) == dim(U, p)


def same_span(U, W, p) -> bool:
    d = dim(list(U) + list(W), p)
    return d == dim(U, p) == dim(W, p)


def matvec(matrix, v, p):
    return [sum(a * b for a, b in zip(row, v)) % p for row in matrix]


def matmul(A, B, p):
    Bt = columns(B)
    return [[sum(a * b for a, b in zip(row, col)) % p for col in Bt] for row in A]
