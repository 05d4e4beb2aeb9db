"""Partitions and Littlewood-Richardson coefficients.

Over a DVR a module of type ``lam`` has a submodule of type ``mu`` with
quotient of type ``nu`` exactly when ``c^lam_{mu,nu} > 0`` (Hall polynomials
are nonzero precisely on LR support). Types are partitions of torsion
exponents, written in decreasing order.
"""

from __future__ import annotations

from functools import lru_cache


def as_partition(exponents) -> tuple:
    return tuple(sorted((int(x) for x in exponents if x), reverse=True))


def contained(mu, lam) -> bool:
    if len(mu) > len(lam):
        return False
    return all(a <= b for a, b in zip(mu, lam))


@lru_cache(maxsize=None)
def lr_coefficient(lam: tuple, mu: tuple, nu: tuple) -> int:
    """Number of LR tableaux of shape ``lam/mu`` and content ``nu``."""
    if sum(lam) != sum(mu) + sum(nu) or not contained(mu, lam) or not contained(nu, lam):
        return 0
    rows = len(lam)
    mu = tuple(mu) + (0,) * (rows - len(mu))
    k = len(nu)
    nu = tuple(nu)
    count = 0

    def rec(r, prev_row, used):
        nonlocal count
        if r == rows:
            if used == nu:
                count += 1
            return
        length = lam[r] - mu[r]
        top = min(r + 1, k)
        for counts in _compositions(length, top, tuple(n - u for n, u in zip(nu, used))):
            row = []
            for letter, c in enumerate(counts, start=1):
                row += [letter] * c
            # column strictness against the row above
            ok = True
            for idx, letter in enumerate(row):
                col = mu[r] + idx
                if prev_row is not None:
                    pmu, pfill = prev_row
                    if pmu <= col < pmu + len(pfill) and pfill[col - pmu] >= letter:
                        ok = False
                        break
            if not ok:
                continue
            # lattice condition reading the row right to left
            cur = list(used)
            for letter in reversed(row):
                cur[letter - 1] += 1
                if letter > 1 and cur[letter - 1] > cur[letter - 2]:
                    ok = False
                    break
            if ok:
                rec(r + 1, (mu[r], row), tuple(cur))

    rec(0, None, (0,) * k)
    return count


def _compositions(total, parts, caps):
    """Tuples of ``parts`` nonnegative ints summing to ``total`` bounded by ``caps``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, caps[0]) + 1):
        for rest in _compositions(total - first, parts - 1, caps[1:]):
            yield (first,) + rest


def _between(lower, upper, size):
    """Partitions ``p`` with ``lower <= p <= upper`` (as diagrams) of the given size."""
    n = len(upper)
    lower = tuple(lower) + (0,) * (n - len(lower))

    def rec(i, prev, remaining):
        if i == n:
            if remaining == 0:
                yield ()
            return
        hi = min(upper[i], prev, remaining)
        for x in range(hi, lower[i] - 1, -1):
            for rest in rec(i + 1, x, remaining - x):
                yield (x,) + rest

    for p in rec(0, upper[0] if upper else 0, size):
        yield tuple(x for x in p if x)


def admits_filtration(lam, pieces) -> bool:
    """Does a module of type ``lam`` admit a filtration with graded pieces ``pieces``?"""
    lam = as_partition(lam)
    pieces = [as_partition(p) for p in pieces]
    if sum(lam) != sum(sum(p) for p in pieces):
        return False
    reach = {()}
    for mu in pieces:
        size = sum(next(iter(reach))) + sum(mu) if reach else sum(mu)
        nxt = set()
        for sigma in reach:
            for cand in _between(sigma, lam, size):
                if cand not in nxt and lr_coefficient(cand, sigma, mu) > 0:
                    nxt.add(cand)
        reach = nxt
        if not reach:
            return False
    return lam in reach
