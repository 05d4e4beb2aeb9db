"""Filtered complexes, spectral sequence pages and degeneracy classifiers.

Internally every filtration is decreasing and carried by an adapted basis:
basis vector ``k`` of ``C^n`` has level ``levels[n][k]`` and
``Fil^p C^n`` is spanned by the vectors of level ``>= p``. Increasing
filtrations ``Fil_j`` are stored with ``p = -j``. Pages are keyed
``(p, q)`` with ``E_1^{p,q} = H^{p+q}(Gr^p)`` and ``d_r`` of bidegree
``(r, 1-r)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .complexes import (
    ComplexMap,
    FreeComplex,
    HDegree,
    cohomology_degree,
    induced_map,
)
from .errors import InvalidFiltrationError, NotAComplexError, PreconditionError
from .linalg import (
    Matrix,
    cokernel_invariants,
    hstack,
    image_basis,
    kernel_basis,
    snf,
    solve,
)
from .modules import (
    FinModule,
    Module,
    ModuleMap,
    Subquotient,
    direct_sum,
    graded_pieces,
    homology,
    is_injective,
    splits_retraction,
)

ORIENTATIONS = ("decreasing", "increasing")


class FilteredComplex:
    def __init__(self, ambient: FreeComplex, levels: dict, orientation="decreasing", check=True):
        if orientation not in ORIENTATIONS:
            raise InvalidFiltrationError(f"unknown orientation {orientation!r}")
        self.ambient = ambient
        self.orientation = orientation
        self.levels = {n: tuple(levels.get(n, ())) for n in ambient.degrees}
        for n in ambient.degrees:
            if len(self.levels[n]) != ambient.rank(n):
                raise InvalidFiltrationError(f"degree {n}: need one level per basis vector")
        if check:
            for n in ambient.degrees:
                d = ambient.d(n)
                src, tgt = self.levels[n], self.levels.get(n + 1, ())
                for t, row in enumerate(d.rows):
                    for k, x in enumerate(row):
                        if x and tgt[t] < src[k]:
                            raise InvalidFiltrationError(
                                f"Fil^{self.user_index(src[k])} is not a subcomplex in degree {n}")

    @property
    def ring(self):
        return self.ambient.ring

    def user_index(self, p: int) -> int:
        return p if self.orientation == "decreasing" else -p

    def internal_index(self, j: int) -> int:
        return j if self.orientation == "decreasing" else -j

    @property
    def level_range(self):
        allv = [x for v in self.levels.values() for x in v]
        if not allv:
            return (0, 0)
        return (min(allv), max(allv))

    @property
    def jumps(self):
        """Internal indices ``p`` at which ``Gr^p`` can be nonzero."""
        lo, hi = self.level_range
        return range(lo, hi + 1)

    def _select(self, pred):
        C = self.ambient
        idx = {n: [k for k, l in enumerate(self.levels[n]) if pred(l)] for n in C.degrees}
        diffs = [C.d(n).take_rows(idx[n + 1]).take_cols(idx[n]) for n in range(C.lo, C.hi)]
        sub = FreeComplex(C.ring, C.lo, [len(idx[n]) for n in C.degrees], diffs, check=False)
        return sub, idx

    def fil(self, p: int):
        """``(Fil^p, inclusion into the ambient complex)``."""
        sub, idx = self._select(lambda l: l >= p)
        C = self.ambient
        R = C.ring
        mats = {}
        for n in C.degrees:
            m = Matrix.zeros(R, C.rank(n), len(idx[n]))
            for c, k in enumerate(idx[n]):
                m.rows[k][c] = R.one
            mats[n] = m
        return sub, ComplexMap(sub, C, mats, check=False)

    def gr(self, p: int) -> FreeComplex:
        return self._select(lambda l: l == p)[0]

    @classmethod
    def from_steps(cls, ambient: FreeComplex, steps: dict, orientation="decreasing"):
        """Build from explicit submodules ``steps[j][n]`` (generator matrices in ``C^n``).

        For a decreasing filtration ``Fil^j = C`` below the smallest key and ``0``
        above the largest; for an increasing one the reverse.
        """
        R = ambient.ring
        if orientation not in ORIENTATIONS:
            raise InvalidFiltrationError(f"unknown orientation {orientation!r}")
        sign = 1 if orientation == "decreasing" else -1
        internal = {sign * j: v for j, v in steps.items()}
        ps = sorted(internal)
        bases = {}
        levels = {}
        for n in ambient.degrees:
            N = ambient.rank(n)
            cur = Matrix.zeros(R, N, 0)
            cols, lev = [], []
            for p in reversed(ps):
                S = internal[p].get(n)
                if S is None:
                    S = Matrix.zeros(R, N, 0)
                if S.nrows != N:
                    raise InvalidFiltrationError(
                        f"Fil^{sign * p} in degree {n}: expected {N} rows, got {S.nrows}")
                S = image_basis(S) if S.ncols else S
                if cokernel_invariants(S)[1]:
                    raise InvalidFiltrationError(f"Fil^{sign * p} is not saturated in degree {n}")
                comp = _complement(R, cur, S, f"Fil^{sign * p} in degree {n}")
                cols.append(comp)
                lev += [p] * comp.ncols
                cur = hstack(R, [cur, comp], N)
            top = ps[0] - 1 if ps else 0
            comp = _complement(R, cur, Matrix.identity(R, N), f"degree {n}")
            cols.append(comp)
            lev += [top] * comp.ncols
            bases[n] = hstack(R, cols, N)
            levels[n] = lev
        diffs = []
        for n in range(ambient.lo, ambient.hi):
            new = solve(bases[n + 1], ambient.d(n) @ bases[n])
            diffs.append(new)
        C = FreeComplex(R, ambient.lo, ambient.ranks, diffs, check=False)
        fc = cls(C, levels, orientation)
        fc.basis_change = bases
        return fc

    def __repr__(self):
        return f"FilteredComplex({self.ambient!r}, {self.orientation}, levels={self.levels})"


def _complement(R, cur: Matrix, S: Matrix, where: str) -> Matrix:
    """Vectors of ``S`` completing the basis ``cur`` (saturated in ``S``)."""
    if cur.ncols == 0:
        return S
    X = solve(S, cur)
    if X is None:
        raise InvalidFiltrationError(f"{where}: filtration steps are not nested")
    s = snf(X)
    if any(s.exponents) or s.rank != cur.ncols:
        raise InvalidFiltrationError(f"{where}: filtration steps are not nested saturated submodules")
    return S @ s.U.take_cols(range(s.rank, S.ncols))


def filtered_from_levels(ring, lo, diffs, levels, orientation="decreasing", ranks=None):
    from .complexes import complex_from_diffs

    C = complex_from_diffs(ring, lo, diffs, ranks)
    return FilteredComplex(C, levels, orientation)


# ---------------------------------------------------------------- pages


@dataclass
class PageData:
    r: int
    entries: dict                      # (p, q) -> Module
    differentials: dict = field(default_factory=dict)   # (p, q) -> ModuleMap
    labels: dict = field(default_factory=dict)          # (p, q) -> list of str

    def invariants(self) -> dict:
        return {k: m.invariants for k, m in sorted(self.entries.items()) if m.ngens}

    def nonzero_differentials(self):
        return sorted(k for k, d in self.differentials.items() if not d.is_zero())

    def total(self, n: int) -> list:
        return [m.invariants for (a, b), m in sorted(self.entries.items()) if a + b == n and m.ngens]


class _PageEngine:
    def __init__(self, FC: FilteredComplex):
        self.FC = FC
        self.C = FC.ambient
        self._z = {}

    def z(self, p, n, r) -> Matrix:
        """Basis of ``{x in Fil^p C^n : dx in Fil^{p+r}}``."""
        key = (p, n, r)
        if key not in self._z:
            C, lev = self.C, self.FC.levels
            R = C.ring
            src = [k for k, l in enumerate(lev.get(n, ())) if l >= p]
            bad = [t for t, l in enumerate(lev.get(n + 1, ())) if l < p + r]
            sub = C.d(n).take_rows(bad).take_cols(src)
            K = kernel_basis(sub) if bad else Matrix.identity(R, len(src))
            out = Matrix.zeros(R, C.rank(n), K.ncols)
            for c, k in enumerate(src):
                out.rows[k] = list(K.rows[c])
            self._z[key] = out
        return self._z[key]

    def entry(self, p, n, r) -> Subquotient:
        R = self.C.ring
        Z = self.z(p, n, r)
        rel = hstack(R, [self.z(p + 1, n, r - 1), self.C.d(n - 1) @ self.z(p - r + 1, n - 1, r - 1)],
                     self.C.rank(n))
        return Subquotient(R, Z, rel)

    def page(self, r) -> PageData:
        FC = self.FC
        sqs = {}
        for n in self.C.degrees:
            for p in FC.jumps:
                sq = self.entry(p, n, r)
                sqs[(p, n - p)] = sq
        diffs = {}
        for (p, q), sq in sqs.items():
            tgt = sqs.get((p + r, q - r + 1))
            n = p + q
            if tgt is None:
                continue
            img = self.C.d(n) @ sq.reps
            diffs[(p, q)] = ModuleMap(sq.module, tgt.module, tgt.coords(img), check=False)
        return PageData(r, {k: s.module for k, s in sqs.items()}, diffs)


def stable_page_index(FC: FilteredComplex) -> int:
    lo, hi = FC.level_range
    return hi - lo + 2


def pages(FC: FilteredComplex, r_max: int = None):
    eng = _PageEngine(FC)
    r_inf = stable_page_index(FC)
    r_max = r_inf if r_max is None else r_max
    return [eng.page(r) for r in range(1, r_max + 1)]


def infinity_page(FC: FilteredComplex) -> PageData:
    return _PageEngine(FC).page(stable_page_index(FC))


def page_homology(page: PageData) -> dict:
    """``ker d_r / im d_r`` at every spot, as FinModules."""
    R = None
    out = {}
    r = page.r
    for (p, q), E in page.entries.items():
        R = E.ring
        d_out = page.differentials.get((p, q))
        if d_out is None:
            d_out = ModuleMap(E, Module(R, []), Matrix.zeros(R, 0, E.ngens), check=False)
        src = (p - r, q + r - 1)
        d_in = page.differentials.get(src)
        if d_in is None:
            d_in = ModuleMap(Module(R, []), E, Matrix.zeros(R, E.ngens, 0), check=False)
        out[(p, q)] = homology(d_in, d_out)[0].invariants
    return out


# ---------------------------------------------------------------- page mode


@dataclass
class PageRun:
    pages: list
    stable_from: Optional[int]

    @property
    def final(self) -> PageData:
        return self.pages[-1]


def run_page_sequence(start: PageData, rules: dict, r_stop: int) -> PageRun:
    """Iterate homology pages from an explicit page.

    ``start.labels[(x, y)]`` names the canonical generators of each entry.
    ``rules[r]`` maps a start-page label to ``{label: coefficient}`` (the value
    of ``d_r`` on it, written in start-page generators); missing ``r`` means
    ``d_r = 0``.
    """
    R = next(iter(start.entries.values())).ring if start.entries else None
    r0 = start.r
    index = {k: {lab: i for i, lab in enumerate(v)} for k, v in start.labels.items()}
    # per spot: reps (start coords of current generators) and a coordinate map
    state = {}
    for k, M in start.entries.items():
        state[k] = (M, Matrix.identity(R, M.ngens), lambda v, M=M: M.reduce(v))
    out = []
    for r in range(r0, r_stop + 1):
        rule = rules.get(r)
        diffs = {}
        for (x, y), (M, reps, _) in state.items():
            tk = (x + r, y + 1 - r)
            if tk not in state:
                continue
            T, _, tcoords = state[tk]
            labels = start.labels[(x, y)]
            tstart = start.entries[tk]
            cols = []
            for g in range(M.ngens):
                w = [R.zero] * tstart.ngens
                if rule is not None:
                    for s, coeff in enumerate(reps.column_list(g)):
                        if not coeff:
                            continue
                        for lab, c in (rule(labels[s]) or {}).items():
                            c = R.from_int(c) if isinstance(c, int) else c
                            if lab not in index[tk]:
                                raise NotAComplexError(f"d_{r}({labels[s]}) names unknown {lab!r} at {tk}")
                            w[index[tk][lab]] = w[index[tk][lab]] + coeff * c
                cols.append(w)
            W = Matrix(R, [list(c) for c in zip(*cols)] if cols else [[] for _ in range(tstart.ngens)], M.ngens)
            diffs[(x, y)] = ModuleMap(M, T, tcoords(W), check=False)
        page = PageData(r, {k: s[0] for k, s in state.items()}, diffs,
                        {k: _labels(start.labels[k], s[1], R) for k, s in state.items()})
        for k, d in diffs.items():
            nxt = diffs.get((k[0] + r, k[1] + 1 - r))
            if nxt is not None and not (nxt @ d).is_zero():
                raise NotAComplexError(f"d_{r} o d_{r} != 0 at {k}")
        out.append(page)
        if r == r_stop:
            break
        new = {}
        for k, (M, reps, coords) in state.items():
            d_out = diffs.get(k) or ModuleMap(M, Module(R, []), Matrix.zeros(R, 0, M.ngens), check=False)
            d_in = diffs.get((k[0] - r, k[1] + r - 1)) or ModuleMap(
                Module(R, []), M, Matrix.zeros(R, M.ngens, 0), check=False)
            H, hreps, hcoords = homology(d_in, d_out)
            new[k] = (H, reps @ hreps, lambda v, c=coords, h=hcoords: h(c(v)))
        state = new
    stable = None
    for i in range(len(out) - 1, -1, -1):
        if out[i].nonzero_differentials():
            break
        stable = out[i].r
    return PageRun(out, stable)


def _labels(names, reps: Matrix, R):
    out = []
    for g in range(reps.ncols):
        terms = [(c, names[s]) for s, c in enumerate(reps.column_list(g)) if c]
        if len(terms) == 1 and terms[0][0] == R.one:
            out.append(terms[0][1])
        else:
            out.append(" + ".join(f"{R.format(c)}*{n}" for c, n in terms))
    return out


def abutment_consistency(page_inf, claimed: dict):
    """Do the claimed ``H^n`` admit filtrations with the ``E_inf`` graded pieces?

    ``page_inf`` is a PageData or a mapping ``(x, y) -> FinModule``; the total
    degree of a spot is ``x + y``.
    """
    from .partitions import admits_filtration

    entries = page_inf.invariants() if isinstance(page_inf, PageData) else page_inf
    degrees = set(claimed) | {a + b for (a, b), m in entries.items() if not m.is_zero}
    details = {}
    for n in sorted(degrees):
        pieces = [m for (a, b), m in entries.items() if a + b == n]
        H = claimed.get(n, FinModule())
        details[n] = (sum(g.free_rank for g in pieces) == H.free_rank
                      and sum(g.length for g in pieces) == H.length
                      and admits_filtration(H.torsion, [g.torsion for g in pieces]))
    return all(details.values()), details


# ---------------------------------------------------------------- classifiers


@dataclass
class DegreeVerdict:
    degenerate: bool = True
    saturated: bool = True
    split: bool = True
    saturated_torsion: Optional[bool] = None
    split_torsion: Optional[bool] = None
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "degenerate": self.degenerate,
            "saturated": self.saturated,
            "split": self.split,
            "saturated_torsion": self.saturated_torsion,
            "split_torsion": self.split_torsion,
            "witness": self.witness,
        }


@dataclass
class DegeneracyReport:
    degrees: dict
    first_failure: Optional[dict]

    @property
    def degenerate(self) -> bool:
        return all(v.degenerate for v in self.degrees.values())

    @property
    def saturated(self) -> bool:
        return all(v.saturated for v in self.degrees.values())

    @property
    def split(self) -> bool:
        return all(v.split for v in self.degrees.values())

    @property
    def verdict(self) -> str:
        if self.split:
            return "split degenerate"
        if self.saturated:
            return "saturated degenerate"
        if self.degenerate:
            return "degenerate"
        return "not degenerate"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "first_failure": self.first_failure,
            "degrees": {str(n): v.to_dict() for n, v in sorted(self.degrees.items())},
        }


class Analysis:
    """Cached cohomology of ``C``, ``Fil^p`` and ``Gr^p`` for one filtered complex."""

    def __init__(self, FC: FilteredComplex):
        self.FC = FC
        self._h = {}
        self._fil = {}
        self._hf = {}
        self._gr = {}
        self._maps = {}

    def H(self, n) -> HDegree:
        if n not in self._h:
            self._h[n] = cohomology_degree(self.FC.ambient, n)
        return self._h[n]

    def fil(self, p):
        if p not in self._fil:
            self._fil[p] = self.FC.fil(p)
        return self._fil[p]

    def H_fil(self, p, n) -> HDegree:
        if (p, n) not in self._hf:
            self._hf[(p, n)] = cohomology_degree(self.fil(p)[0], n)
        return self._hf[(p, n)]

    def H_gr(self, p, n) -> FinModule:
        if (p, n) not in self._gr:
            self._gr[(p, n)] = cohomology_degree(self.FC.gr(p), n).invariants
        return self._gr[(p, n)]

    def fil_map(self, p, n) -> ModuleMap:
        """``H^n(Fil^p) -> H^n(C)``."""
        if (p, n) not in self._maps:
            self._maps[(p, n)] = induced_map(self.fil(p)[1], self.H_fil(p, n), self.H(n), n)
        return self._maps[(p, n)]

    @property
    def degrees(self):
        return self.FC.ambient.degrees

    @property
    def steps(self):
        """Internal indices whose inclusion is not the identity."""
        lo, hi = self.FC.level_range
        return range(lo + 1, hi + 1)

    def rank_additive(self, n=None) -> bool:
        ns = self.degrees if n is None else [n]
        return all(self.H(k).invariants.free_rank == sum(self.H_gr(p, k).free_rank for p in self.FC.jumps)
                   for k in ns)

    def gr_torsion(self, n) -> FinModule:
        return direct_sum(self.H_gr(p, n).tor() for p in self.FC.jumps)


def map_flags(phi: ModuleMap):
    """``(injective, tf-saturated, split)`` for ``H^n(Fil) -> H^n(C)``."""
    if not is_injective(phi):
        return False, False, False
    tf = phi.matrix.take_rows(phi.target.free_indices).take_cols(phi.source.free_indices)
    sat = not cokernel_invariants(tf)[1] if tf.nrows else True
    split = sat and splits_retraction(phi, check=False)
    return True, sat, split


def classify(FC: FilteredComplex, analysis: Analysis = None) -> DegeneracyReport:
    """Check ``H^i(Fil^j) -> H^i(C)`` for every degree ``i`` and step ``j``.

    The first failure is the earliest ``(i, j)`` (degree, then index) that
    breaks the strongest property the complex fails to have.
    """
    A = analysis or Analysis(FC)
    degrees = {}
    firsts = {}
    for n in A.degrees:
        v = DegreeVerdict()
        for p in A.steps:
            inj, sat, split = map_flags(A.fil_map(p, n))
            for tier, ok in (("injective", inj), ("saturated", sat), ("split", split)):
                if not ok and tier not in firsts:
                    firsts[tier] = {"i": n, "j": FC.user_index(p), "fails": tier}
            v.degenerate &= inj
            v.saturated &= sat
            v.split &= split
            if v.witness is None and not split:
                v.witness = {"i": n, "j": FC.user_index(p),
                             "fails": "injective" if not inj else "saturated" if not sat else "split"}
        if A.rank_additive(n):
            v.saturated_torsion, v.split_torsion = torsion_flags(A, n)
        degrees[n] = v
    first = next((firsts[t] for t in ("injective", "saturated", "split") if t in firsts), None)
    return DegeneracyReport(degrees, first)


def torsion_flags(A: Analysis, n: int):
    H = A.H(n).invariants.tor()
    G = A.gr_torsion(n)
    return H.length == G.length, H == G


@dataclass
class TorsionDegeneracy:
    saturated: bool
    split: bool
    lengths: dict

    def __iter__(self):
        return iter((self.saturated, self.split, self.lengths))


def torsion_degeneracy(FC: FilteredComplex, i: int, analysis: Analysis = None) -> TorsionDegeneracy:
    A = analysis or Analysis(FC)
    if not A.rank_additive(i):
        raise PreconditionError(f"not generically degenerate: ranks are not additive in degree {i}")
    sat, split = torsion_flags(A, i)
    lengths = {"H": A.H(i).invariants.length,
               "gr": {FC.user_index(p): A.H_gr(p, i).length for p in FC.jumps}}
    return TorsionDegeneracy(sat, split, lengths)


@dataclass
class CrosscheckReport:
    skipped: bool
    discrepancies: list

    def to_dict(self):
        return {"skipped": self.skipped, "discrepancies": self.discrepancies}


def criteria_crosscheck(FC: FilteredComplex, analysis: Analysis = None) -> CrosscheckReport:
    A = analysis or Analysis(FC)
    if not A.rank_additive():
        return CrosscheckReport(True, [])
    rep = classify(FC, A)
    bad = []
    sat_len = all(v.saturated_torsion for v in rep.degrees.values())
    split_iso = all(v.split_torsion for v in rep.degrees.values())
    if rep.saturated != sat_len:
        bad.append({"check": "saturated <=> length equality", "direct": rep.saturated, "criterion": sat_len})
    if rep.split != split_iso:
        bad.append({"check": "split <=> abstract isomorphism", "direct": rep.split, "criterion": split_iso})
    for n, v in rep.degrees.items():
        if v.saturated_torsion and not (v.degenerate and v.saturated):
            bad.append({"check": "saturated torsion => injective saturated", "degree": n})
        if v.split_torsion and not v.split:
            bad.append({"check": "split torsion => split", "degree": n})
    return CrosscheckReport(False, bad)


def induced_filtration(A: Analysis, n: int):
    """``Gr^p H^n(C)`` for the image filtration, keyed by internal index."""
    H = A.H(n).module
    ps = list(A.FC.jumps)
    steps = []
    for p in reversed(ps):
        steps.append(A.fil_map(p, n).matrix if p > ps[0] else Matrix.identity(H.ring, H.ngens))
    pieces = graded_pieces(H, steps) if H.ngens else [FinModule() for _ in ps]
    return dict(zip(reversed(ps), pieces))
