"""Virtual and rational Hodge numbers, the equality check and the condition ledger."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import fp
from .complexes import compare_map, identification_check, mod_pi, _reduce_cols
from .errors import PreconditionError
from .linalg import rank as rank_K, residue_reduce
from .spectral import Analysis, FilteredComplex, classify


@dataclass
class HodgeTable:
    """``entries[(i, j)]`` with ``i`` the filtration index and ``i + j`` the degree."""

    entries: dict
    provenance: dict = field(default_factory=dict)

    def get(self, i, j) -> int:
        return self.entries.get((i, j), 0)

    def degree_sum(self, n) -> int:
        return sum(v for (i, j), v in self.entries.items() if i + j == n)

    def to_dict(self) -> dict:
        return {
            "entries": {f"{i},{j}": v for (i, j), v in sorted(self.entries.items())},
            "provenance": {str(n): v for n, v in sorted(self.provenance.items())},
        }

    def grid(self, label="h") -> str:
        if not self.entries:
            return "(empty)"
        i_s = sorted({i for i, _ in self.entries})
        j_s = sorted({j for _, j in self.entries}, reverse=True)
        width = max(len(str(v)) for v in self.entries.values())
        head = "j\\i " + " ".join(str(i).rjust(width) for i in i_s)
        lines = [f"{label}^(i,j)", head]
        for j in j_s:
            lines.append(f"{str(j).rjust(3)} " + " ".join(str(self.get(i, j)).rjust(width) for i in i_s))
        return "\n".join(lines)


def _require_decreasing(FC: FilteredComplex):
    if FC.orientation != "decreasing":
        raise PreconditionError("Hodge numbers need a decreasing filtration")


def virtual_hodge_numbers(FC: FilteredComplex, analysis: Analysis = None) -> HodgeTable:
    _require_decreasing(FC)
    A = analysis or Analysis(FC)
    C = FC.ambient
    p = C.ring.p
    Cb = mod_pi(C)
    lo, hi = FC.level_range
    entries, prov = {}, {}
    for n in C.degrees:
        H = A.H(n)
        compare_map(C, n, H, Cb)
        N = C.rank(n)
        B = Cb.boundaries(n)
        T = fp.echelon(B + _reduce_cols(H.reps), p)
        tor = fp.echelon(B + _reduce_cols(H.reps.take_cols(H.module.torsion_indices)), p)
        dtor = len(tor)
        dims = {}
        for q in range(lo, hi + 2):
            sub, inc = A.fil(q)
            cyc = mod_pi(sub).cycles(n) if sub.rank(n) else []
            emb = inc.at(n)
            rows = [fp.matvec(residue_reduce(emb), z, p) for z in cyc]
            S = fp.echelon(B + rows, p)
            meet = fp.intersect(S, T, N, p)
            dims[q] = fp.dim(meet + tor, p) - dtor
        for q in range(lo, hi + 1):
            entries[(q, n - q)] = dims[q] - dims[q + 1]
        prov[n] = {
            "boundaries": len(B),
            "cohomology_mod_pi": len(T) - len(B),
            "torsion_mod_pi": dtor - len(B),
            "filtration_dims": {str(q): dims[q] for q in sorted(dims)},
        }
    return HodgeTable(entries, prov)


def rational_hodge_numbers(FC: FilteredComplex, analysis: Analysis = None) -> HodgeTable:
    _require_decreasing(FC)
    A = analysis or Analysis(FC)
    lo, hi = FC.level_range
    entries, prov = {}, {}
    for n in FC.ambient.degrees:
        H = A.H(n)
        dims = {}
        for q in range(lo, hi + 2):
            if q == lo:
                dims[q] = H.module.invariants.free_rank
                continue
            phi = A.fil_map(q, n)
            tf = phi.matrix.take_rows(H.module.free_indices)
            dims[q] = rank_K(tf) if tf.nrows and tf.ncols else 0
        for q in range(lo, hi + 1):
            entries[(q, n - q)] = dims[q] - dims[q + 1]
        prov[n] = {"filtration_ranks": {str(q): dims[q] for q in sorted(dims)}}
    return HodgeTable(entries, prov)


@dataclass
class EqualityReport:
    level: str                      # "saturated", "degenerate" or "none"
    virtual: HodgeTable
    rational: HodgeTable
    mismatches: list
    identification: Optional[bool] = None

    @property
    def equal(self) -> bool:
        return not self.mismatches

    @property
    def holds(self) -> bool:
        """Does the conclusion licensed by the hypothesis level hold?"""
        if self.level == "saturated":
            return self.equal
        if self.level == "degenerate":
            return bool(self.identification)
        return True

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "equal": self.equal,
            "holds": self.holds,
            "identification": self.identification,
            "mismatches": self.mismatches,
            "virtual": self.virtual.to_dict(),
            "rational": self.rational.to_dict(),
        }


def equality_theorem_check(FC: FilteredComplex, analysis: Analysis = None) -> EqualityReport:
    A = analysis or Analysis(FC)
    rep = classify(FC, A)
    v = virtual_hodge_numbers(FC, A)
    r = rational_hodge_numbers(FC, A)
    keys = sorted(set(v.entries) | set(r.entries))
    bad = [{"i": i, "j": j, "virtual": v.get(i, j), "rational": r.get(i, j)}
           for i, j in keys if v.get(i, j) != r.get(i, j)]
    level = "saturated" if rep.saturated else "degenerate" if rep.degenerate else "none"
    ident = None
    if level == "degenerate":
        ident = all(identification_check(A.fil(q)[1], n)
                    for n in FC.ambient.degrees for q in A.steps)
    return EqualityReport(level, v, r, bad, ident)


# ---------------------------------------------------------------- threshold / ledger


@dataclass(frozen=True)
class Threshold:
    p: int
    e: int
    T: int

    def to_dict(self):
        return {"p": self.p, "e": self.e, "T": self.T}


def threshold(p: int, e: int) -> Threshold:
    """Largest ``T`` with ``T * e < p - 1``."""
    if e < 1:
        raise PreconditionError("ramification index must be positive")
    T = 0
    while (T + 1) * e < p - 1:
        T += 1
    return Threshold(p, e, T)


CONDITIONS = {
    "C.1": "lifts to S/(E^2) (external input)",
    "C.2": "Hodge-Tate: split degenerate torsion up to degree T-1",
    "C.3": "Hodge-Tate: saturated degenerate torsion up to degree T-1",
    "C.4": "Hodge-de Rham: split degenerate torsion up to degree T-1",
    "C.5": "Hodge-de Rham: saturated degenerate torsion up to degree T-1",
    "C.6": "Hodge-de Rham degenerates splittingly",
    "C.7": "Hodge-de Rham degenerates saturatedly",
    "C.8": "virtual Hodge numbers equal Hodge numbers",
}

IMPLICATIONS = [("C.2", "C.3"), ("C.4", "C.5"), ("C.6", "C.7"), ("C.7", "C.8")]
EQUIVALENCES = [("C.2", "C.4"), ("C.3", "C.5")]


def torsion_window(A: Analysis, top: int):
    """``(saturated, split)`` torsion degeneracy in all degrees ``<= top``.

    A degree that is not rationally degenerate fails both.
    """
    sat = split = True
    for n in A.degrees:
        if n > top:
            continue
        if not A.rank_additive(n):
            return False, False
        H = A.H(n).invariants.tor()
        G = A.gr_torsion(n)
        sat &= H.length == G.length
        split &= H == G
    return sat, split


@dataclass
class ConditionLedger:
    threshold: Threshold
    status: dict
    violations: list
    notes: list

    def to_dict(self):
        return {
            "threshold": self.threshold.to_dict(),
            "status": dict(sorted(self.status.items())),
            "violations": self.violations,
            "notes": self.notes,
        }

    def render(self) -> str:
        lines = [f"p = {self.threshold.p}, e = {self.threshold.e}, T = {self.threshold.T}"]
        for key in sorted(CONDITIONS):
            val = self.status.get(key)
            mark = "n/a" if val is None else ("true" if val else "false")
            lines.append(f"{key} {mark:5} {CONDITIONS[key]}")
        for note in self.notes:
            lines.append(f"note: {note}")
        lines.append("implications: " + ("ok" if not self.violations else "; ".join(self.violations)))
        return "\n".join(lines)


def condition_ledger(fc_hdr: FilteredComplex, fc_ht: FilteredComplex = None, p: int = None,
                     e: int = None, c1: Optional[bool] = None) -> ConditionLedger:
    R = fc_hdr.ring
    p = R.p if p is None else p
    e = R.e if e is None else e
    th = threshold(p, e)
    top = th.T - 1
    A = Analysis(fc_hdr)
    status = {"C.1": c1}
    status["C.5"], status["C.4"] = torsion_window(A, top)
    rep = classify(fc_hdr, A)
    status["C.6"] = rep.split
    status["C.7"] = rep.saturated
    status["C.8"] = equality_theorem_check(fc_hdr, A).equal
    if fc_ht is not None:
        status["C.3"], status["C.2"] = torsion_window(Analysis(fc_ht), top)
    else:
        status["C.2"] = status["C.3"] = None
    notes = []
    if top < 0:
        notes.append("T = 0: the torsion conditions are vacuous")
    else:
        notes.append(f"torsion conditions checked in degrees <= {top}")
    bad = []
    for a, b in IMPLICATIONS:
        if status[a] and status[b] is False:
            bad.append(f"{a} holds but {b} fails")
    for a, b in EQUIVALENCES:
        if status[a] is not None and status[b] is not None and status[a] != status[b]:
            bad.append(f"{a} and {b} disagree")
    return ConditionLedger(th, status, bad, notes)
