"""Seeded random instances for the property suites.

Every generator takes a ``random.Random``; suites derive one per instance from
``(seed, suite, index)`` so results do not depend on execution order.
"""

from __future__ import annotations

import random

from .complexes import FreeComplex, direct_sum
from .linalg import Matrix, hstack, image_basis, intersect_submodules, solve
from .modules import Module, ModuleMap, is_injective, residue_injective
from .ring import KINDS, make_ring
from .spectral import FilteredComplex

PRIMES = {"p-local-int": (2, 3, 5, 7), "t-local-poly": (2, 3, 5), "ramified-quadratic": (3, 5, 7)}


def instance_rng(seed: int, suite: str, index: int) -> random.Random:
    return random.Random(f"{seed}:{suite}:{index}")


def random_ring(rng, kind=None):
    kind = kind or rng.choice(KINDS)
    return make_ring(kind, rng.choice(PRIMES[kind]))


def random_matrix(rng, R, nrows, ncols, max_valuation=3, zero_prob=0.3) -> Matrix:
    return Matrix(R, [[R.random_element(rng, max_valuation, zero_prob) for _ in range(ncols)]
                      for _ in range(nrows)], ncols)


def random_unimodular(rng, R, n, max_valuation=2) -> Matrix:
    """Unit-lower-triangular times unit-upper-triangular times a permutation."""
    L = Matrix.identity(R, n)
    U = Matrix.identity(R, n)
    for i in range(n):
        U.rows[i][i] = R.random_unit(rng)
        for j in range(i):
            L.rows[i][j] = R.random_element(rng, max_valuation, 0.4)
            U.rows[j][i] = R.random_element(rng, max_valuation, 0.4)
    perm = list(range(n))
    rng.shuffle(perm)
    P = Matrix.zeros(R, n, n)
    for i, j in enumerate(perm):
        P.rows[i][j] = R.one
    return L @ U @ P


# ---------------------------------------------------------------- modules


def random_injection(rng, R, max_gens=4, max_exp=5, tries=200) -> ModuleMap:
    """A torsion injection ``N -> M`` that stays injective mod pi."""
    for _ in range(tries):
        m = rng.randint(1, max_gens)
        k = rng.randint(1, m)
        M = Module(R, sorted(rng.randint(1, max_exp) for _ in range(m)))
        N = Module(R, sorted(rng.randint(1, max_exp) for _ in range(k)))
        rows = []
        for i, mi in enumerate(M.orders):
            row = []
            for j, nj in enumerate(N.orders):
                low = max(0, mi - nj)
                if rng.random() < 0.25:
                    row.append(R.zero)
                else:
                    row.append(R.pi_power(low + rng.randint(0, 1)) * R.random_unit(rng))
            rows.append(row)
        f = ModuleMap(N, M, M.reduce(Matrix(R, rows, k)))
        if residue_injective(f) and is_injective(f):
            return f
    raise RuntimeError("could not draw an injection")


# ---------------------------------------------------------------- complexes


def _pieces_complex(rng, R, lo, width, max_rank, max_exp, levels=None):
    """Direct sum of ``R`` and ``R --pi^k--> R`` pieces with per-piece levels."""
    hi = lo + width - 1
    ranks = [0] * width
    cols = []   # (degree, level, target index or None, exponent)
    basis = {n: [] for n in range(lo, hi + 1)}
    budget = rng.randint(min(2, max_rank * width), max_rank * width)
    for _ in range(budget):
        n = rng.randint(lo, hi)
        lev = rng.choice(levels) if levels else 0
        if n < hi and rng.random() < 0.6:
            if ranks[n - lo] >= max_rank or ranks[n + 1 - lo] >= max_rank:
                continue
            k = rng.randint(0, max_exp)
            basis[n].append(lev)
            basis[n + 1].append(lev)
            ranks[n - lo] += 1
            ranks[n + 1 - lo] += 1
            cols.append((n, len(basis[n]) - 1, len(basis[n + 1]) - 1, k))
        else:
            if ranks[n - lo] >= max_rank:
                continue
            basis[n].append(lev)
            ranks[n - lo] += 1
    diffs = []
    for n in range(lo, hi):
        d = Matrix.zeros(R, ranks[n + 1 - lo], ranks[n - lo])
        for (m, src, tgt, k) in cols:
            if m == n:
                d.rows[tgt][src] = R.pi_power(k)
        diffs.append(d)
    C = FreeComplex(R, lo, ranks, diffs, check=False)
    return C, {n: basis[n] for n in basis}


def random_perfect_complex(rng, R, max_width=3, max_rank=3, max_exp=4) -> FreeComplex:
    width = rng.randint(1, max_width)
    lo = rng.randint(-2, 1)
    C, _ = _pieces_complex(rng, R, lo, width, max_rank, max_exp)
    G = {n: random_unimodular(rng, R, C.rank(n)) for n in C.degrees}
    diffs = []
    for n in range(C.lo, C.hi):
        Ginv = solve(G[n], Matrix.identity(R, C.rank(n)))
        diffs.append(G[n + 1] @ C.d(n) @ Ginv)
    return FreeComplex(R, C.lo, C.ranks, diffs)


def filtered_base_change(rng, FC: FilteredComplex) -> FilteredComplex:
    """Conjugate by random filtration-preserving automorphisms."""
    C = FC.ambient
    R = C.ring
    G = {}
    for n in C.degrees:
        lev = FC.levels[n]
        m = len(lev)
        g = Matrix.identity(R, m)
        for t in range(m):
            g.rows[t][t] = R.random_unit(rng)
            for k in range(m):
                if t != k and lev[t] >= lev[k] and (lev[t] > lev[k] or t > k):
                    g.rows[t][k] = R.random_element(rng, 2, 0.5)
        G[n] = g
    diffs = []
    for n in range(C.lo, C.hi):
        Ginv = solve(G[n], Matrix.identity(R, C.rank(n)))
        diffs.append(G[n + 1] @ C.d(n) @ Ginv)
    amb = FreeComplex(R, C.lo, C.ranks, diffs, check=False)
    return FilteredComplex(amb, FC.levels, FC.orientation)


def random_split_filtered(rng, R, max_width=4, max_rank=3, max_exp=4, max_level=2) -> FilteredComplex:
    width = rng.randint(1, max_width)
    C, lev = _pieces_complex(rng, R, 0, width, max_rank, max_exp, list(range(max_level + 1)))
    return FilteredComplex(C, lev)


def random_rank_additive(rng, R, max_width=4, max_rank=3, max_exp=4, max_level=2) -> FilteredComplex:
    """A lattice inside a split filtered complex, with the induced filtration.

    Rationally nothing changes, so ranks stay additive; integrally the torsion
    and the position of the filtration are scrambled.
    """
    base = random_split_filtered(rng, R, max_width, max_rank, max_exp, max_level)
    C = base.ambient
    L = {}
    for n in C.degrees:
        N = C.rank(n)
        gens = [C.d(n - 1) @ L[n - 1]] if n - 1 in L else []
        for _ in range(20):
            extra = random_matrix(rng, R, N, N, 2, 0.3)
            cand = image_basis(hstack(R, gens + [extra], N)) if N else Matrix.zeros(R, 0, 0)
            if cand.ncols == N:
                break
        else:
            cand = image_basis(hstack(R, gens + [Matrix.identity(R, N)], N))
        L[n] = cand
    diffs = [solve(L[n + 1], C.d(n) @ L[n]) for n in range(C.lo, C.hi)]
    amb = FreeComplex(R, C.lo, C.ranks, diffs, check=False)
    lo, hi = base.level_range
    steps = {}
    for p in range(lo + 1, hi + 1):
        steps[p] = {}
        for n in C.degrees:
            idx = [k for k, l in enumerate(base.levels[n]) if l >= p]
            V = Matrix.zeros(R, C.rank(n), len(idx))
            for c, k in enumerate(idx):
                V.rows[k][c] = R.one
            meet = intersect_submodules(L[n], V)
            steps[p][n] = solve(L[n], meet)
    return FilteredComplex.from_steps(amb, steps)


def _block(R, lo, ranks, diffs, levels):
    return FilteredComplex(FreeComplex(R, lo, ranks, diffs), levels)


def saturated_not_split_block(R, n=1) -> FilteredComplex:
    """``H^{n+1} = R/pi^2`` with ``Fil^1`` inducing ``pi (R/pi^2)``."""
    z, o, pi = R.zero, R.one, R.pi
    d = Matrix(R, [[pi, pi * pi, z], [-o, z, pi]])
    return _block(R, n, [3, 2], [d], {n: [0, 0, 1], n + 1: [0, 1]})


def defective_block(R, n=0) -> FilteredComplex:
    """``dx = pi y + z``: degenerate with a length defect, virtual != rational."""
    return _block(R, n, [1, 2], [Matrix(R, [[R.pi], [R.one]])], {n: [0], n + 1: [0, 1]})


def filtered_sum(R, blocks) -> FilteredComplex:
    C = direct_sum(R, [b.ambient for b in blocks])
    levels = {}
    for n in C.degrees:
        levels[n] = [l for b in blocks for l in b.levels.get(n, ())]
    return FilteredComplex(C, levels)


def random_saturated(rng, R) -> FilteredComplex:
    """Saturated degenerate by construction: split pieces, optionally a saturated-not-split block."""
    blocks = [random_split_filtered(rng, R, 3, 2, 3, 2)]
    if rng.random() < 0.4:
        blocks.append(saturated_not_split_block(R, rng.randint(0, 2)))
    return filtered_base_change(rng, filtered_sum(R, blocks))


def random_defective(rng, R) -> FilteredComplex:
    blocks = [defective_block(R, rng.randint(0, 1))]
    if rng.random() < 0.7:
        blocks.append(random_split_filtered(rng, R, 3, 2, 3, 1))
    return filtered_base_change(rng, filtered_sum(R, blocks))


def random_corpus_instance(rng, R) -> FilteredComplex:
    """Mixed corpus member: lattice instances plus the two constructed families."""
    roll = rng.random()
    if roll < 0.6:
        return random_rank_additive(rng, R)
    if roll < 0.8:
        return random_saturated(rng, R)
    return random_defective(rng, R)
