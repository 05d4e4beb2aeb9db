"""Bounded cochain complexes of finite free modules over a DVR."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import fp
from .errors import DimensionMismatchError, NotAComplexError, PreconditionError
from .linalg import (
    Matrix,
    cokernel_invariants,
    kernel_basis,
    rank as rank_K,
    residue_reduce,
)
from .modules import FinModule, Module, ModuleMap, Subquotient, is_injective


class FreeComplex:
    """``C^lo -> ... -> C^hi``; ``diffs[k]`` maps degree ``lo+k`` to ``lo+k+1``.

    Degrees outside the window are zero.
    """

    def __init__(self, ring, lo: int, ranks, diffs, check=True):
        self.ring = ring
        self.lo = lo
        self.ranks = tuple(ranks)
        self.diffs = list(diffs)
        if len(self.diffs) != max(len(self.ranks) - 1, 0):
            raise DimensionMismatchError("need one differential between consecutive degrees")
        for k, d in enumerate(self.diffs):
            if d.shape != (self.ranks[k + 1], self.ranks[k]):
                raise DimensionMismatchError(
                    f"d^{lo + k} has shape {d.shape}, expected {(self.ranks[k + 1], self.ranks[k])}")
        if check:
            for k in range(len(self.diffs) - 1):
                if not (self.diffs[k + 1] @ self.diffs[k]).is_zero():
                    raise NotAComplexError(f"d^{lo + k + 1} o d^{lo + k} != 0")

    @property
    def hi(self) -> int:
        return self.lo + len(self.ranks) - 1

    @property
    def degrees(self):
        return range(self.lo, self.hi + 1)

    def rank(self, i: int) -> int:
        if self.lo <= i <= self.hi:
            return self.ranks[i - self.lo]
        return 0

    def d(self, i: int) -> Matrix:
        """Differential out of degree ``i`` (a zero matrix outside the window)."""
        if self.lo <= i < self.hi:
            return self.diffs[i - self.lo]
        return Matrix.zeros(self.ring, self.rank(i + 1), self.rank(i))

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * self.rank(i) for i in self.degrees)

    def __eq__(self, other):
        return (isinstance(other, FreeComplex) and self.ring == other.ring and self.lo == other.lo
                and self.ranks == other.ranks and self.diffs == other.diffs)

    def __repr__(self):
        return f"FreeComplex(lo={self.lo}, ranks={self.ranks})"


def complex_from_diffs(ring, lo, diffs, ranks=None) -> FreeComplex:
    if ranks is None:
        ranks = [diffs[0].ncols] + [d.nrows for d in diffs]
    return FreeComplex(ring, lo, ranks, diffs)


class ComplexMap:
    def __init__(self, source: FreeComplex, target: FreeComplex, mats: dict, check=True):
        self.source = source
        self.target = target
        R = source.ring
        self.mats = {}
        for i in set(source.degrees) | set(target.degrees):
            m = mats.get(i)
            if m is None:
                m = Matrix.zeros(R, target.rank(i), source.rank(i))
            if m.shape != (target.rank(i), source.rank(i)):
                raise DimensionMismatchError(f"f^{i} has the wrong shape")
            self.mats[i] = m
        if check:
            for i in self.mats:
                lhs = self.at(i + 1) @ source.d(i)
                rhs = target.d(i) @ self.at(i)
                if lhs != rhs:
                    raise PreconditionError(f"f does not commute with d in degree {i}")

    def at(self, i: int) -> Matrix:
        m = self.mats.get(i)
        if m is None:
            return Matrix.zeros(self.source.ring, self.target.rank(i), self.source.rank(i))
        return m


@dataclass
class HDegree:
    """``H^i`` with cocycle representatives and a coordinate map on cocycles."""

    module: Module
    reps: Matrix
    sq: Subquotient = field(repr=False)

    @property
    def invariants(self) -> FinModule:
        return self.module.invariants

    def coords(self, cocycles: Matrix) -> Matrix:
        return self.sq.coords(cocycles)


class CohomologyRecord:
    def __init__(self, C: FreeComplex, degrees: dict):
        self.complex = C
        self.degrees = degrees

    def __getitem__(self, i) -> HDegree:
        return self.degrees[i]

    def module(self, i) -> FinModule:
        if i not in self.degrees:
            return FinModule()
        return self.degrees[i].invariants

    def summary(self) -> dict:
        return {i: h.invariants for i, h in sorted(self.degrees.items())}


def cohomology_degree(C: FreeComplex, i: int) -> HDegree:
    Z = kernel_basis(C.d(i))
    sq = Subquotient(C.ring, Z, C.d(i - 1))
    return HDegree(sq.module, sq.reps, sq)


def cohomology(C: FreeComplex, degrees=None) -> CohomologyRecord:
    degrees = C.degrees if degrees is None else degrees
    return CohomologyRecord(C, {i: cohomology_degree(C, i) for i in degrees})


def induced_map(f: ComplexMap, HU: HDegree, HV: HDegree, i: int) -> ModuleMap:
    img = f.at(i) @ HU.reps
    return ModuleMap(HU.module, HV.module, HV.coords(img), check=False)


def dualize(C: FreeComplex) -> FreeComplex:
    """``Hom(C, R)`` with ``d_V^i = (-1)^(i+1) (d_C^(-i-1))^T``."""
    lo = -C.hi
    ranks = list(reversed(C.ranks))
    diffs = []
    for i in range(lo, -C.lo):
        t = C.d(-i - 1).T
        diffs.append(-t if (i + 1) % 2 else t)
    return FreeComplex(C.ring, lo, ranks, diffs)


def shift(C: FreeComplex, k: int) -> FreeComplex:
    """``C[k]`` with the usual sign on the differential."""
    diffs = [-d if k % 2 else d for d in C.diffs]
    return FreeComplex(C.ring, C.lo - k, C.ranks, diffs, check=False)


def direct_sum(ring, complexes) -> FreeComplex:
    from .linalg import block_diag

    complexes = list(complexes)
    lo = min(c.lo for c in complexes)
    hi = max(c.hi for c in complexes)
    ranks = [sum(c.rank(i) for c in complexes) for i in range(lo, hi + 1)]
    diffs = [block_diag(ring, [c.d(i) for c in complexes]) for i in range(lo, hi)]
    return FreeComplex(ring, lo, ranks, diffs, check=False)


# ---------------------------------------------------------------- mod pi


class ResidueComplex:
    """``C / pi`` as a complex of F_p vector spaces with cycle/boundary spans."""

    def __init__(self, C: FreeComplex):
        self.source = C
        self.p = C.ring.p
        self._d = {i: residue_reduce(C.d(i)) for i in range(C.lo - 1, C.hi + 1)}

    def d(self, i):
        return self._d.get(i) or []

    def cycles(self, i):
        n = self.source.rank(i)
        rows = self.d(i)
        if not rows:
            return [[int(a == b) for a in range(n)] for b in range(n)]
        return fp.nullspace(rows, n, self.p)

    def boundaries(self, i):
        rows = self.d(i - 1)
        if not rows or not rows[0]:
            return []
        return fp.echelon(fp.columns(rows), self.p)

    def dim_h(self, i) -> int:
        return len(self.cycles(i)) - len(self.boundaries(i))


def mod_pi(C: FreeComplex) -> ResidueComplex:
    return ResidueComplex(C)


def _reduce_cols(M: Matrix):
    return fp.columns(residue_reduce(M)) if M.nrows else [[] for _ in range(M.ncols)]


@dataclass(frozen=True)
class CompareResult:
    degree: int
    dim_source: int
    dim_target: int
    image_dim: int

    @property
    def injective(self) -> bool:
        return self.image_dim == self.dim_source


def compare_map(C: FreeComplex, i: int, H: HDegree = None, Cb: ResidueComplex = None) -> CompareResult:
    """``H^i(C)/pi -> H^i(C/pi)``."""
    H = H or cohomology_degree(C, i)
    Cb = Cb or mod_pi(C)
    p = C.ring.p
    B = Cb.boundaries(i)
    reps = _reduce_cols(H.reps)
    img = fp.dim(B + reps, p) - fp.dim(B, p)
    res = CompareResult(i, H.module.ngens, Cb.dim_h(i), img)
    if not res.injective:
        raise AssertionError(f"H^{i}(C)/pi -> H^{i}(C/pi) is not injective")
    return res


def _image_in_residue_h(f: ComplexMap, Cb_U: ResidueComplex, n: int):
    p = f.source.ring.p
    Zu = Cb_U.cycles(n)
    fm = residue_reduce(f.at(n))
    if not fm or not Zu:
        return []
    return [fp.matvec(fm, z, p) for z in Zu]


def identification_sides(f: ComplexMap, n: int, HU=None, HV=None):
    """Both sides of the identification lemma as spans in ``V^n / pi``.

    Each side is given together with the residue boundaries of ``V``.
    """
    U, V = f.source, f.target
    p = U.ring.p
    HU = HU or cohomology_degree(U, n)
    HV = HV or cohomology_degree(V, n)
    Vb = mod_pi(V)
    B = Vb.boundaries(n)
    lhs = B + _reduce_cols(f.at(n) @ HU.reps)
    image = B + _image_in_residue_h(f, mod_pi(U), n)
    hv = B + _reduce_cols(HV.reps)
    rhs = fp.intersect(image, hv, V.rank(n), p)
    return lhs, rhs, B, HV


def _require_next_injective(f: ComplexMap, n: int):
    HU = cohomology_degree(f.source, n + 1)
    HV = cohomology_degree(f.target, n + 1)
    if not is_injective(induced_map(f, HU, HV, n + 1)):
        raise PreconditionError(f"H^{n + 1}(U) -> H^{n + 1}(V) is not injective")


def identification_check(f: ComplexMap, n: int) -> bool:
    _require_next_injective(f, n)
    lhs, rhs, _, _ = identification_sides(f, n)
    return fp.same_span(lhs, rhs, f.source.ring.p)


def dimension_equality(f: ComplexMap, n: int):
    """``(dim_K Im(H^n(U) -> H^n(V))[1/pi], dim of the double-image subspace)``."""
    _require_next_injective(f, n)
    HU = cohomology_degree(f.source, n)
    HV = cohomology_degree(f.target, n)
    phi = induced_map(f, HU, HV, n)
    free_v = HV.module.free_indices
    tf_img = phi.matrix.take_rows(free_v)
    if cokernel_invariants(tf_img)[1]:
        raise PreconditionError(f"image of H^{n}(U) in H^{n}(V)_tf is not saturated")
    lhs = rank_K(tf_img) if tf_img.nrows and tf_img.ncols else 0
    _, rhs_span, B, _ = identification_sides(f, n, HU, HV)
    p = f.source.ring.p
    tor = B + _reduce_cols(HV.reps.take_cols(HV.module.torsion_indices))
    rhs = fp.dim(rhs_span + tor, p) - fp.dim(tor, p)
    return lhs, rhs


def koszul(ring, a, b) -> FreeComplex:
    """Koszul complex of ``(a, b)`` in degrees 0..2."""
    d0 = Matrix(ring, [[a], [b]])
    d1 = Matrix(ring, [[-b, a]])
    return FreeComplex(ring, 0, [1, 2, 1], [d0, d1])
