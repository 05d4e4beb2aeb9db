"""Finitely generated modules over a DVR in canonical Smith coordinates.

A :class:`Module` is ``R^g`` modulo ``pi^{d_i}`` in coordinate ``i``; the
orders ``d_i`` list torsion generators first (ascending), then free ones
(``None``). Elements are coordinate columns. Every construction (kernels,
cokernels, subquotients) lands back in this canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import fp
from .errors import (
    DimensionMismatchError,
    InvalidFiltrationError,
    NotInjectiveError,
    NotTorsionError,
    NotTorsionFreeError,
    PreconditionError,
)
from .linalg import (
    Matrix,
    cokernel_invariants,
    hstack,
    image_basis,
    kernel_basis,
    residue_reduce,
    snf,
    solve,
)
from .ring import INF


@dataclass(frozen=True)
class FinModule:
    """Isomorphism class ``R^free_rank + sum R/pi^n``."""

    free_rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        t = tuple(sorted(int(x) for x in self.torsion))
        if any(x <= 0 for x in t):
            raise ValueError("torsion exponents must be positive")
        object.__setattr__(self, "torsion", t)

    @property
    def length(self) -> int:
        """Length of the torsion part."""
        return sum(self.torsion)

    @property
    def width(self) -> int:
        """``dim_kappa`` of the torsion part mod pi."""
        return len(self.torsion)

    @property
    def dim_mod_pi(self) -> int:
        return self.free_rank + len(self.torsion)

    def is_torsion(self) -> bool:
        return self.free_rank == 0

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def tor(self) -> "FinModule":
        return FinModule(0, self.torsion)

    def tf(self) -> "FinModule":
        return FinModule(self.free_rank, ())

    def __add__(self, other: "FinModule") -> "FinModule":
        return FinModule(self.free_rank + other.free_rank, self.torsion + other.torsion)

    def to_dict(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("R" if self.free_rank == 1 else f"R^{self.free_rank}")
        parts += [f"R/pi^{n}" if n > 1 else "R/pi" for n in self.torsion]
        return " + ".join(parts) if parts else "0"


def direct_sum(mods) -> FinModule:
    out = FinModule()
    for m in mods:
        out = out + m
    return out


class Module:
    """``R^g / (pi^{d_i} e_i)`` with ``orders[i] = d_i`` or ``None`` for free."""

    __slots__ = ("ring", "orders")

    def __init__(self, ring, orders):
        orders = tuple(orders)
        tors = [d for d in orders if d is not None]
        if tors != sorted(tors) or any(d <= 0 for d in tors):
            raise ValueError("orders must be positive and ascending")
        if None in orders and any(d is not None for d in orders[orders.index(None):]):
            raise ValueError("torsion generators must precede free ones")
        self.ring = ring
        self.orders = orders

    @classmethod
    def from_fin(cls, ring, M: FinModule) -> "Module":
        return cls(ring, list(M.torsion) + [None] * M.free_rank)

    @classmethod
    def free(cls, ring, n) -> "Module":
        return cls(ring, [None] * n)

    @property
    def ngens(self) -> int:
        return len(self.orders)

    @property
    def invariants(self) -> FinModule:
        return FinModule(sum(d is None for d in self.orders), [d for d in self.orders if d is not None])

    @property
    def torsion_indices(self):
        return [i for i, d in enumerate(self.orders) if d is not None]

    @property
    def free_indices(self):
        return [i for i, d in enumerate(self.orders) if d is None]

    def relations(self) -> Matrix:
        R = self.ring
        idx = self.torsion_indices
        out = Matrix.zeros(R, self.ngens, len(idx))
        for c, i in enumerate(idx):
            out.rows[i][c] = R.pi_power(self.orders[i])
        return out

    def entry_is_zero(self, i, x) -> bool:
        if not x:
            return True
        d = self.orders[i]
        return d is not None and self.ring.valuation(x) >= d

    def is_zero_vector(self, vec) -> bool:
        return all(self.entry_is_zero(i, x) for i, x in enumerate(vec))

    def is_zero_matrix(self, A: Matrix) -> bool:
        return all(self.entry_is_zero(i, x) for i, r in enumerate(A.rows) for x in r)

    def reduce(self, A: Matrix) -> Matrix:
        """Entrywise zero out coordinates that vanish in the module."""
        z = self.ring.zero
        return Matrix(self.ring, [[z if self.entry_is_zero(i, x) else x for x in r]
                                  for i, r in enumerate(A.rows)], A.ncols)

    def __eq__(self, other):
        return isinstance(other, Module) and self.ring == other.ring and self.orders == other.orders

    def __hash__(self):
        return hash(self.orders)

    def __repr__(self):
        return f"Module({self.invariants})"


class ModuleMap:
    """``source -> target`` given on canonical generators; well-definedness checked."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: Module, target: Module, matrix: Matrix, check=True):
        if matrix.shape != (target.ngens, source.ngens):
            raise DimensionMismatchError(
                f"map matrix {matrix.shape} vs modules {target.ngens}x{source.ngens}")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check:
            R = source.ring
            for j, d in enumerate(source.orders):
                if d is None:
                    continue
                pd = R.pi_power(d)
                for i in range(target.ngens):
                    x = matrix.rows[i][j]
                    if x and not target.entry_is_zero(i, x * pd):
                        raise PreconditionError(
                            f"map does not respect relations (generator {j}, coordinate {i})")

    @property
    def ring(self):
        return self.source.ring

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(other.source, self.target, self.matrix @ other.matrix, check=False)

    def is_zero(self) -> bool:
        return self.target.is_zero_matrix(self.matrix)


def identity_map(M: Module) -> ModuleMap:
    return ModuleMap(M, M, Matrix.identity(M.ring, M.ngens), check=False)


def zero_module(ring) -> Module:
    return Module(ring, [])


class Subquotient:
    """``L / Rel`` for a free submodule ``L`` (basis ``gens``) of ``R^n``.

    ``module`` is its canonical form, ``reps`` the ambient vectors of the
    canonical generators; :meth:`coords` maps elements of ``L`` to canonical
    coordinates.
    """

    def __init__(self, ring, gens: Matrix, rel: Matrix):
        self.ring = ring
        self.gens = gens
        self._gsnf = snf(gens)
        rel_l = solve(gens, rel, self._gsnf)
        if rel_l is None:
            raise PreconditionError("relations do not lie in the generated submodule")
        self.module, self._proj, lift = canonical_from_relations(ring, gens.ncols, rel_l)
        self.reps = gens @ lift

    def coords(self, vectors: Matrix) -> Matrix:
        x = solve(self.gens, vectors, self._gsnf)
        if x is None:
            raise PreconditionError("vector not in the generated submodule")
        return self.module.reduce(self._proj @ x)

    def try_coords(self, vectors: Matrix):
        x = solve(self.gens, vectors, self._gsnf)
        return None if x is None else self.module.reduce(self._proj @ x)


def canonical_from_relations(ring, n: int, rel: Matrix):
    """Canonical form of ``R^n / im(rel)``.

    Returns ``(module, proj, lift)``: ``proj`` sends old coordinates to new,
    ``lift`` sends new generators back to old coordinates.
    """
    if rel.ncols == 0:
        I = Matrix.identity(ring, n)
        return Module.free(ring, n), I, I
    s = snf(rel)
    keep = [i for i, e in enumerate(s.exponents) if e > 0] + list(range(s.rank, n))
    orders = [s.exponents[i] for i in keep if i < s.rank] + [None] * (n - s.rank)
    return Module(ring, orders), s.P.take_rows(keep), s.U.take_cols(keep)


def presented(ring, rel: Matrix) -> FinModule:
    free, ex = cokernel_invariants(rel)
    return FinModule(free, ex)


def _span_with_relations(M: Module, A: Matrix) -> Matrix:
    return hstack(M.ring, [A, M.relations()], A.nrows)


def kernel(f: ModuleMap):
    """``(K, inclusion)`` for the kernel of ``f``."""
    R = f.ring
    N, M = f.source, f.target
    big = hstack(R, [f.matrix, -M.relations()], M.ngens)
    K = kernel_basis(big)
    top = K.take_rows(range(N.ngens))
    L = image_basis(hstack(R, [top, N.relations()], N.ngens))
    sq = Subquotient(R, L, N.relations())
    return sq.module, ModuleMap(sq.module, N, N.reduce(sq.reps), check=False)


def cokernel(f: ModuleMap):
    """``(Q, projection)`` for the cokernel of ``f``."""
    R = f.ring
    M = f.target
    Q, proj, _ = canonical_from_relations(R, M.ngens, _span_with_relations(M, f.matrix))
    return Q, ModuleMap(M, Q, Q.reduce(proj), check=False)


def image(f: ModuleMap):
    """``(I, inclusion)`` for the image of ``f``."""
    R = f.ring
    M = f.target
    L = image_basis(_span_with_relations(M, f.matrix))
    sq = Subquotient(R, L, M.relations())
    return sq.module, ModuleMap(sq.module, M, M.reduce(sq.reps), check=False)


def submodule(M: Module, gens: Matrix):
    """The submodule generated by the columns ``gens`` (coordinates of M)."""
    f = ModuleMap(Module.free(M.ring, gens.ncols), M, gens, check=False)
    return image(f)


def quotient(M: Module, gens: Matrix):
    f = ModuleMap(Module.free(M.ring, gens.ncols), M, gens, check=False)
    return cokernel(f)


def is_injective(f: ModuleMap) -> bool:
    return kernel(f)[0].ngens == 0


def is_surjective(f: ModuleMap) -> bool:
    return cokernel(f)[0].ngens == 0


def homology(d_in: ModuleMap, d_out: ModuleMap):
    """``ker d_out / im d_in`` as ``(module, reps, coords)``.

    ``reps`` are coordinates in the middle module of the canonical generators;
    ``coords(v)`` sends a cycle (column in middle coordinates) to homology
    coordinates.
    """
    R = d_out.ring
    E = d_out.source
    Kmod, inc = kernel(d_out)
    z = solve(_span_with_relations(E, inc.matrix), d_in.matrix)
    if z is None:
        raise PreconditionError("d o d != 0: image not contained in kernel")
    a = z.take_rows(range(Kmod.ngens))
    H, proj = cokernel(ModuleMap(d_in.source, Kmod, Kmod.reduce(a), check=False))
    lift = _section(proj)
    reps = E.reduce(inc.matrix @ lift)

    def coords(v: Matrix) -> Matrix:
        y = solve(_span_with_relations(E, inc.matrix), v)
        if y is None:
            raise PreconditionError("not a cycle")
        return H.reduce(proj.matrix @ y.take_rows(range(Kmod.ngens)))

    return H, reps, coords


def _section(proj: ModuleMap) -> Matrix:
    """Generator lifts for a surjection onto a canonical module."""
    R = proj.ring
    X = solve(_span_with_relations(proj.target, proj.matrix), Matrix.identity(R, proj.target.ngens))
    return X.take_rows(range(proj.source.ngens))


# ---------------------------------------------------------------- polygons


@dataclass(frozen=True)
class CharPolygon:
    vertices: tuple
    exponents: tuple

    @property
    def width(self) -> int:
        return len(self.exponents)

    @property
    def length(self) -> int:
        return sum(self.exponents)

    def value(self, x) -> Fraction:
        """Piecewise-linear function, extended as a constant past the width."""
        x = Fraction(x)
        if x >= self.width:
            return Fraction(self.length)
        k = int(x)
        y0 = self.vertices[k][1]
        return y0 + (x - k) * self.exponents[k]

    def to_text(self) -> str:
        return " ".join(f"({a},{b})" for a, b in self.vertices)

    def to_svg(self, scale: int = 40, pad: int = 20) -> str:
        """SVG 1.1 drawing: the polygon with its vertices, y pointing up."""
        w = max(self.width, 1) * scale + 2 * pad
        h = max(self.length, 1) * scale + 2 * pad
        pts = [(pad + a * scale, h - pad - b * scale) for a, b in self.vertices]
        path = " ".join(f"{x},{y}" for x, y in pts)
        dots = "".join(f'<circle cx="{x}" cy="{y}" r="3" fill="black"/>' for x, y in pts)
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
            f'viewBox="0 0 {w} {h}">\n'
            f'<line x1="{pad}" y1="{h - pad}" x2="{w - pad}" y2="{h - pad}" stroke="gray"/>\n'
            f'<line x1="{pad}" y1="{h - pad}" x2="{pad}" y2="{pad}" stroke="gray"/>\n'
            f'<polyline points="{path}" fill="none" stroke="black" stroke-width="2"/>\n'
            f"{dots}\n</svg>\n"
        )


def char_polygon(M: FinModule) -> CharPolygon:
    if M.free_rank:
        raise NotTorsionError(f"{M} is not torsion")
    pts = [(0, 0)]
    for n in M.torsion:
        pts.append((pts[-1][0] + 1, pts[-1][1] + n))
    return CharPolygon(tuple(pts), M.torsion)


@dataclass(frozen=True)
class PolygonOrder:
    leq: bool
    equal: bool

    def __bool__(self):
        return self.leq


def polygon_leq(P: CharPolygon, Q: CharPolygon) -> PolygonOrder:
    """Pointwise ``P <= Q`` on ``[0, min width]`` with constant extension."""
    if P.length != Q.length:
        raise DimensionMismatchError(f"polygon lengths differ: {P.length} vs {Q.length}")
    top = min(P.width, Q.width)
    # both functions are linear between integer points
    leq = all(P.value(x) <= Q.value(x) for x in range(top + 1))
    return PolygonOrder(leq, P.exponents == Q.exponents)


# ---------------------------------------------------------------- splitting


def _require_injective(f: ModuleMap):
    if not is_injective(f):
        raise NotInjectiveError("map is not injective")


def splits_retraction(f: ModuleMap, check=True) -> bool:
    """Does ``f: N -> M`` admit ``r`` with ``r o f = id``?

    Each row of ``r`` is an independent exact linear system over R.
    """
    if check:
        _require_injective(f)
    R = f.ring
    N, M = f.source, f.target
    gN, gM = N.ngens, M.ngens
    for i, dn in enumerate(N.orders):
        # r[i][j] = pi^{c_j} s_j; forced zero when N_i is free and M_j torsion
        shifts = []
        for dm in M.orders:
            if dm is None:
                shifts.append(0)
            elif dn is None:
                shifts.append(None)
            else:
                shifts.append(max(0, dn - dm))
        cols = [j for j in range(gM) if shifts[j] is not None]
        rows = []
        for k in range(gN):
            row = [R.pi_power(shifts[j]) * f.matrix.rows[j][k] for j in cols]
            if dn is not None:
                row += [-R.pi_power(dn) if kk == k else R.zero for kk in range(gN)]
            rows.append(row)
        ncol = len(cols) + (gN if dn is not None else 0)
        A = Matrix(R, rows, ncol)
        b = Matrix.column(R, [R.one if k == i else R.zero for k in range(gN)])
        if solve(A, b) is None:
            return False
    return True


def residue_injective(f: ModuleMap) -> bool:
    """Is ``N/pi -> M/pi`` injective?"""
    return fp.rank(residue_reduce(f.matrix), f.ring.p) == f.source.ngens


def splits_polygon(f: ModuleMap) -> bool:
    """Polygon criterion for ``N in M`` with ``M`` torsion and ``N/pi -> M/pi`` injective."""
    M = f.target.invariants
    if M.free_rank:
        raise NotTorsionError("target is not torsion")
    if not residue_injective(f):
        raise PreconditionError("N/pi -> M/pi is not injective; use splits_retraction")
    Q, _ = cokernel(f)
    return polygon_leq(char_polygon(M), char_polygon(f.source.invariants + Q.invariants)).equal


def classify_cyclic_extension(ring, l: int, m: int, c) -> FinModule:
    """Middle term of ``0 -> R/pi^l -> M -> R/pi^m -> 0`` with class ``c``."""
    if l < 1 or m < 1:
        raise ValueError("l, m must be positive")
    rel = Matrix(ring, [[ring.pi_power(l), c], [ring.zero, ring.pi_power(m)]])
    return presented(ring, rel)


def is_saturated_inclusion(f: ModuleMap) -> bool:
    if f.source.invariants.torsion or f.target.invariants.torsion:
        raise NotTorsionFreeError("saturation is defined for torsion-free modules")
    _require_injective(f)
    return not cokernel_invariants(f.matrix)[1]


def tf_projection(M: Module, A: Matrix) -> Matrix:
    """Images in ``M_tf`` (free coordinates) of the columns ``A``."""
    return A.take_rows(M.free_indices)


def _chain(M: Module, steps):
    mods = []
    prev = None
    for k, g in enumerate(steps):
        if g.nrows != M.ngens:
            raise InvalidFiltrationError(f"step {k}: wrong ambient size")
        if prev is not None and solve(_span_with_relations(M, g), prev) is None:
            raise InvalidFiltrationError(f"step {k - 1} is not contained in step {k}")
        prev = g
        mods.append(g)
    if not mods or not is_surjective(ModuleMap(Module.free(M.ring, mods[-1].ncols), M, mods[-1], check=False)):
        raise InvalidFiltrationError("filtration does not exhaust the module")
    return mods


def graded_pieces(M: Module, steps):
    """Graded pieces of an increasing chain ``steps[0] in ... in steps[-1] = M``.

    The chain implicitly starts at 0, so the first piece is ``steps[0]``.
    """
    steps = _chain(M, steps)
    R = M.ring
    out = []
    prev = None
    for g in steps:
        if prev is None:
            piece, _ = submodule(M, g)
        else:
            Q, proj = quotient(M, prev)
            piece, _ = submodule(Q, proj.matrix @ g)
        out.append(piece.invariants)
        prev = g
    return out


def saturation_defect(M: Module, steps):
    """``(length M_tor, sum length Gr_tor, all steps tf-saturated)``."""
    gr = graded_pieces(M, steps)
    lhs = M.invariants.length
    rhs = sum(g.length for g in gr)
    sat = True
    for g in steps:
        proj = tf_projection(M, g)
        if cokernel_invariants(proj)[1]:
            sat = False
    return lhs, rhs, sat


def multifiltration_split_check(M: Module, steps) -> bool:
    if M.invariants.free_rank:
        raise NotTorsionError("module is not torsion")
    gr = graded_pieces(M, steps)
    if direct_sum(gr) != M.invariants:
        raise PreconditionError("M is not isomorphic to the sum of its graded pieces")
    for g in steps:
        sub, inc = submodule(M, g)
        if not splits_retraction(inc, check=False):
            return False
    return True


def dim_reading(f: ModuleMap):
    """``(rank N, dim Im(N/pi -> M_tf/pi))`` for ``N_tf in M_tf`` saturated."""
    _require_injective(f)
    M = f.target
    proj = tf_projection(M, f.matrix)
    if cokernel_invariants(proj)[1]:
        raise PreconditionError("N_tf is not saturated in M_tf")
    lhs = f.source.invariants.free_rank
    rows = residue_reduce(proj)
    rhs = fp.rank(rows, f.ring.p) if rows and proj.ncols else 0
    return lhs, rhs
