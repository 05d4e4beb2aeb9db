"""Property suites behind ``randcheck``: deterministic, seed-driven, one record per instance."""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import cohomology, dualize
from .generators import (
    instance_rng,
    random_corpus_instance,
    random_defective,
    random_injection,
    random_matrix,
    random_perfect_complex,
    random_ring,
    random_saturated,
)
from .hodge import equality_theorem_check
from .linalg import Matrix, is_unimodular, snf
from .modules import splits_polygon, splits_retraction
from .ring import KINDS
from .spectral import Analysis, classify, criteria_crosscheck

SUITES = ("snf", "split-criterion", "duality", "crosscheck", "equality")


@dataclass
class SuiteResult:
    suite: str
    seed: int
    count: int
    records: list = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(1 for r in self.records if not r["ok"])

    def to_dict(self) -> dict:
        return {"suite": self.suite, "seed": self.seed, "count": self.count,
                "instances": len(self.records), "violations": self.violations,
                "records": self.records}

    def summary(self) -> str:
        return f"{self.suite}: {len(self.records)} instances, {self.violations} violations"


def _ring_tag(R) -> str:
    return f"{R.kind}/{R.p}"


def check_snf(A: Matrix) -> dict:
    R = A.ring
    s = snf(A)
    D = s.D
    diag_ok = all(
        (D.rows[i][j] == (R.pi_power(s.exponents[i]) if i == j and i < s.rank else R.zero))
        for i in range(D.nrows) for j in range(D.ncols))
    chain = all(a <= b for a, b in zip(s.exponents, s.exponents[1:]))
    return {
        "reconstructs": s.U @ D @ s.V == A,
        "unimodular": is_unimodular(s.U) and is_unimodular(s.V),
        "inverses": s.P @ s.U == Matrix.identity(R, A.nrows) and s.V @ s.Q == Matrix.identity(R, A.ncols),
        "diagonal": diag_ok,
        "divisibility": chain,
        "exponents": list(s.exponents),
    }


def _snf(seed, count):
    out = []
    for i in range(count):
        for kind in KINDS:
            rng = instance_rng(seed, f"snf/{kind}", i)
            R = random_ring(rng, kind)
            A = random_matrix(rng, R, rng.randint(1, 5), rng.randint(1, 5), 4, 0.3)
            res = check_snf(A)
            ok = all(v for k, v in res.items() if k != "exponents")
            out.append({"index": i, "ring": _ring_tag(R), "shape": list(A.shape),
                        "exponents": res["exponents"], "ok": ok})
    return out


def _split(seed, count):
    out = []
    for i in range(count):
        rng = instance_rng(seed, "split-criterion", i)
        R = random_ring(rng, KINDS[i % len(KINDS)])
        f = random_injection(rng, R)
        a, b = splits_polygon(f), splits_retraction(f)
        out.append({"index": i, "ring": _ring_tag(R), "source": list(f.source.orders),
                    "target": list(f.target.orders), "polygon": a, "retraction": b, "ok": a == b})
    return out


def duality_defects(U) -> list:
    """Degrees where the duality identities fail for ``V = Hom(U, R)``."""
    V = dualize(U)
    HU = cohomology(U, range(U.lo - 1, U.hi + 2))
    HV = cohomology(V, range(V.lo - 1, V.hi + 2))
    bad = []
    for i in range(U.lo - 1, U.hi + 2):
        if HV.module(-i + 1).tor() != HU.module(i).tor():
            bad.append({"degree": i, "part": "torsion"})
        if HV.module(-i).free_rank != HU.module(i).free_rank:
            bad.append({"degree": i, "part": "free"})
    return bad


def _duality(seed, count):
    out = []
    for i in range(count):
        rng = instance_rng(seed, "duality", i)
        R = random_ring(rng, KINDS[i % len(KINDS)])
        U = random_perfect_complex(rng, R)
        bad = duality_defects(U)
        out.append({"index": i, "ring": _ring_tag(R), "lo": U.lo, "ranks": list(U.ranks),
                    "failures": bad, "ok": not bad})
    return out


def _crosscheck(seed, count):
    out = []
    for i in range(count):
        rng = instance_rng(seed, "crosscheck", i)
        R = random_ring(rng, KINDS[i % len(KINDS)])
        FC = random_corpus_instance(rng, R)
        A = Analysis(FC)
        rep = criteria_crosscheck(FC, A)
        verdict = classify(FC, A).verdict
        out.append({"index": i, "ring": _ring_tag(R), "verdict": verdict, "skipped": rep.skipped,
                    "discrepancies": rep.discrepancies,
                    "ok": not rep.skipped and not rep.discrepancies})
    return out


def _equality(seed, count):
    out = []
    for i in range(count):
        rng = instance_rng(seed, "equality", i)
        R = random_ring(rng, KINDS[i % len(KINDS)])
        rep = equality_theorem_check(random_saturated(rng, R))
        out.append({"index": i, "family": "saturated", "ring": _ring_tag(R), "level": rep.level,
                    "mismatches": rep.mismatches, "ok": rep.level == "saturated" and rep.equal})
    for i in range(max(1, count // 4)):
        rng = instance_rng(seed, "equality/defective", i)
        R = random_ring(rng, KINDS[i % len(KINDS)])
        rep = equality_theorem_check(random_defective(rng, R))
        out.append({"index": i, "family": "defective", "ring": _ring_tag(R), "level": rep.level,
                    "mismatches": rep.mismatches, "ok": not rep.equal})
    return out


RUNNERS = {
    "snf": _snf,
    "split-criterion": _split,
    "duality": _duality,
    "crosscheck": _crosscheck,
    "equality": _equality,
}


def run_suite(name: str, seed: int, count: int) -> SuiteResult:
    """``snf`` draws ``count`` matrices per ring kind; ``equality`` adds ``count // 4``
    length-defective instances after the saturated ones."""
    if name not in RUNNERS:
        raise ValueError(f"unknown suite {name!r}")
    return SuiteResult(name, seed, count, RUNNERS[name](seed, count))
