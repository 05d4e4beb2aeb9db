"""The classifying stack of the order-p lift of alpha_p over Z_p[pi], pi^2 = p * unit.

Only the data the computation consumes is modelled: the ring, ``pi' = omega p / pi``,
the Hodge page ``(O_K[beta, u] (x) E(tau)) / (pi beta, pi u, pi tau)`` and the two
named differentials. Monomials ``beta^a u^b tau^eps`` sit in sheaf degree
``2a + b + 2 eps`` and form degree ``b + eps``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .complexes import FreeComplex, cohomology
from .errors import InputError
from .hodge import condition_ledger
from .linalg import Matrix
from .modules import FinModule, Module
from .ring import is_prime, make_ring
from .spectral import (
    Analysis,
    FilteredComplex,
    PageData,
    abutment_consistency,
    classify,
    infinity_page,
    pages,
    run_page_sequence,
)

KAPPA = FinModule(0, (1,))
OK = FinModule(1, ())
OK_MOD_P = FinModule(0, (2,))


@dataclass(frozen=True)
class BgParams:
    p: int
    max_degree: int = 10
    unit_multiplier: Fraction = Fraction(1)
    omega: Fraction = Fraction(1)
    p2_variant: bool = False

    def __post_init__(self):
        if not is_prime(self.p):
            raise InputError(f"p = {self.p} is not prime")
        if self.max_degree < 0:
            raise InputError("max degree must be nonnegative")
        if self.p == 2 and not self.p2_variant:
            raise InputError("p = 2 needs the tau^2 = beta u^2 variant (p2_variant=True)")
        if Fraction(self.omega) == 0 or Fraction(self.unit_multiplier) == 0:
            raise InputError("omega and the unit multiplier must be units")

    @property
    def ring(self):
        return make_ring("ramified-quadratic", self.p, self.unit_multiplier)

    @property
    def pi_prime(self):
        R = self.ring
        return R.div(R.from_int(self.p) * R.from_int(Fraction(self.omega)), R.pi)


# ---------------------------------------------------------------- monomials


@dataclass(frozen=True, order=True)
class Monomial:
    a: int
    b: int
    eps: int

    @property
    def form(self) -> int:
        return self.b + self.eps

    @property
    def sheaf(self) -> int:
        return 2 * self.a + self.b + 2 * self.eps

    @property
    def total(self) -> int:
        return self.form + self.sheaf

    @property
    def name(self) -> str:
        parts = []
        for sym, k in (("beta", self.a), ("u", self.b), ("tau", self.eps)):
            if k == 1:
                parts.append(sym)
            elif k > 1:
                parts.append(f"{sym}^{k}")
        return " ".join(parts) or "1"


def monomials(max_total: int):
    out = []
    for eps in (0, 1):
        for a in range(max_total // 2 + 1):
            for b in range(max_total // 2 + 1):
                m = Monomial(a, b, eps)
                if m.total <= max_total:
                    out.append(m)
    return sorted(out, key=lambda m: (m.total, m.form, m))


def _module(m: Monomial) -> FinModule:
    return OK if m.total == 0 else KAPPA


@dataclass
class BgHodgePage:
    """Hodge cohomology ``H^i(Omega^j)`` keyed ``(i, j)`` with named generators."""

    params: BgParams
    entries: dict
    labels: dict

    def total(self, n) -> list:
        return [m for (i, j), m in sorted(self.entries.items()) if i + j == n]

    def to_dict(self):
        return {f"{i},{j}": {"module": str(m), "generators": self.labels[(i, j)]}
                for (i, j), m in sorted(self.entries.items())}


def bg_hodge_E1(params: BgParams, max_total: int = None) -> BgHodgePage:
    D = params.max_degree if max_total is None else max_total
    entries, labels = {}, {}
    for m in monomials(D):
        key = (m.sheaf, m.form)
        entries[key] = entries.get(key, FinModule()) + _module(m)
        labels.setdefault(key, []).append(m.name)
    return BgHodgePage(params, entries, labels)


def bg_structure_cohomology(params: BgParams) -> list:
    """``H^i(BG, O)`` for ``i <= D`` from the 2-periodic resolution.

    Differentials alternate ``y -> 0`` and ``y^(p-1) - pi' -> -pi'`` at the identity
    section. One extra degree is built so the last reported group is not truncated.
    """
    R = params.ring
    D = params.max_degree
    neg = -params.pi_prime
    diffs = [Matrix(R, [[R.zero if i % 2 == 0 else neg]]) for i in range(D + 1)]
    C = FreeComplex(R, 0, [1] * (D + 2), diffs)
    rec = cohomology(C, range(0, D + 1))
    return [rec.module(i) for i in range(D + 1)]


def structure_case_formula(D: int) -> list:
    return [OK if i == 0 else KAPPA if i % 2 == 0 else FinModule() for i in range(D + 1)]


# ---------------------------------------------------------------- page runs


def _start_page(params: BgParams, key, r: int, twist=False) -> PageData:
    R = params.ring
    D = params.max_degree + 1
    entries, labels = {}, {}
    for m in monomials(D):
        k = key(m)
        entries.setdefault(k, [])
        name = m.name + (f"{{-{m.form}}}" if twist and m.form else "")
        entries[k].append((m, name))
    mods, names = {}, {}
    for k, lst in entries.items():
        lst.sort(key=lambda t: _module(t[0]).free_rank)
        orders = [None if m.total == 0 else 1 for m, _ in lst]
        mods[k] = Module(R, orders)
        names[k] = [n for _, n in lst]
    return PageData(r, mods, {}, names)


def _rule(shift, names_by_mono, max_total, twist=False):
    """``d(beta^a u^b tau) = beta^a u^b * shift`` as a label map; zero elsewhere."""

    def rule(label):
        m = names_by_mono.get(label.split("{")[0])
        if m is None or not m.eps:
            return {}
        t = Monomial(m.a + shift[0], m.b + shift[1], 0)
        if t.total > max_total:
            return {}
        name = t.name + (f"{{-{t.form}}}" if twist and t.form else "")
        return {name: 1}

    return rule


def _by_name(D):
    return {m.name: m for m in monomials(D)}


def reference_hdr_e2_table(D: int) -> dict:
    """The expected de Rham E_2 table, keyed (form i, sheaf j)."""
    table = {(0, 0): (OK, "1")}
    for n in range(1, D // 2 + 1):
        table[(0, 2 * n)] = (KAPPA, Monomial(n, 0, 0).name)
    for n in range(0, D):
        if 2 * n + 2 <= D:
            table[(1, 2 * n + 1)] = (KAPPA, Monomial(n, 1, 0).name)
    return table


def claimed_abutment(D: int) -> dict:
    """``O_K[x]/(p x)`` with ``x`` in degree 2, as per-degree modules."""
    return {n: (OK if n == 0 else OK_MOD_P if n % 2 == 0 else FinModule()) for n in range(D + 1)}


def _truncate(page: PageData, D: int) -> dict:
    return {k: m.invariants for k, m in page.entries.items() if sum(k) <= D and m.ngens}


def _no_room(table: dict, r_from: int, D: int) -> bool:
    """No spot of ``table`` can send or receive a ``d_r`` with ``r >= r_from``."""
    for (x, y) in table:
        for r in range(r_from, D + 3):
            if (x + r, y + 1 - r) in table or (x - r, y - 1 + r) in table:
                return False
    return True


def _mod_pi_bound(claimed: dict) -> bool:
    return all(M.dim_mod_pi <= 1 for M in claimed.values())


@dataclass
class BgRun:
    target: str
    params: BgParams
    start: dict
    final: dict
    labels: dict
    cohomology: dict
    checks: dict
    classification: dict
    witness: Optional[str] = None
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def table_lines(self) -> list:
        sub = {"dr": "dR", "ht": "HT"}[self.target]
        out = []
        for n, M in sorted(self.cohomology.items()):
            if M.free_rank and not M.torsion:
                desc = f"free rank {M.free_rank}"
            elif M.torsion and not M.free_rank:
                desc = f"torsion {list(M.torsion)}"
            elif M.is_zero:
                desc = "0"
            else:
                desc = f"free rank {M.free_rank}, torsion {list(M.torsion)}"
            out.append(f"H^{n}_{sub}: {desc}")
        return out

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "p": self.params.p,
            "max_degree": self.params.max_degree,
            "start_page": _page_json(self.start, self.labels.get("start", {})),
            "final_page": _page_json(self.final, self.labels.get("final", {})),
            "cohomology": {str(n): M.to_dict() for n, M in sorted(self.cohomology.items())},
            "checks": dict(sorted(self.checks.items())),
            "classification": self.classification,
            "witness": self.witness,
            **self.extra,
        }


def _page_json(entries, labels):
    return {f"{x},{y}": {"module": str(M), "generators": labels.get((x, y), [])}
            for (x, y), M in sorted(entries.items())}


def _run(params: BgParams, target: str, twist=False):
    D = params.max_degree
    names = _by_name(D + 1)
    if target == "dr":
        key = lambda m: (m.form, m.sheaf)
        start = _start_page(params, key, 1)
        rules = {1: _rule((0, 2), names, D + 1)}
        r_last = 2
    else:
        key = lambda m: (m.sheaf, m.form)
        start = _start_page(params, key, 2, twist)
        rules = {2: _rule((2, 0), names, D + 1, twist)}
        r_last = 3
    run = run_page_sequence(start, rules, r_last)
    return run, start


def bg_hdr_run(params: BgParams) -> BgRun:
    D = params.max_degree
    run, start = _run(params, "dr")
    E1, E2 = run.pages[0], run.pages[-1]
    final = _truncate(E2, D)
    final_labels = {k: v for k, v in E2.labels.items() if k in final}
    expected = {k: v[0] for k, v in reference_hdr_e2_table(D).items()}
    claimed = claimed_abutment(D)
    model = bg_filtered_model(params, "dr")
    view = classifier_view(model, D)
    checks = {
        "e2_matches_reference_table": final == expected,
        "e2_generators_match": all(final_labels[k] == [reference_hdr_e2_table(D)[k][1]] for k in expected),
        "degenerates_at_e2": _no_room(final, 2, D),
        "abutment_consistent": abutment_consistency(final, claimed)[0],
        "mod_pi_one_dimensional": _mod_pi_bound(claimed),
        "model_matches_pages": _model_pages_agree(model, E1, E2, D, lambda k: k),
        "onset_degree_3": view["onset_degree"] == 3 if D >= 4 else True,
        "degree_2_not_split": view["degree_2"] == "saturated, not split" if D >= 2 else True,
    }
    witness = ("0 -> k.u -> (O_K/p).beta' -> k.beta -> 0 is not split (pi.beta' = u)" if D >= 2 else None)
    return BgRun("dr", params, _truncate(E1, D), final,
                 {"start": E1.labels, "final": final_labels}, claimed, checks, view, witness)


def bg_ht_run(params: BgParams, twist=True) -> BgRun:
    D = params.max_degree
    run, start = _run(params, "ht", twist)
    E2, E3 = run.pages[0], run.pages[-1]
    final = _truncate(E3, D)
    claimed = claimed_abutment(D)
    model = bg_filtered_model(params, "ht")
    view = classifier_view(model, D)
    untwisted = _run(params, "ht", False)[0].pages[-1]
    survivors = {}
    for m in monomials(D):
        if m.eps == 0 and m.a <= 1:
            survivors[(m.sheaf, m.form)] = _module(m)
    beta2 = Monomial(2, 0, 0)
    checks = {
        "e3_survivors_u_b_and_beta_u_b": final == survivors,
        "beta_squared_dies": (beta2.total > D) or (beta2.sheaf, beta2.form) not in final,
        "degenerates_at_e3": _no_room(final, 3, D),
        "abutment_consistent": abutment_consistency(final, claimed)[0],
        "mod_pi_one_dimensional": _mod_pi_bound(claimed),
        "twist_labels_inert": _truncate(untwisted, D) == final,
        "model_matches_pages": _model_pages_agree(model, E2, E3, D, lambda k: (-k[1], k[0] + 2 * k[1])),
        "onset_degree_3": view["onset_degree"] == 3 if D >= 4 else True,
        "degree_2_not_split": view["degree_2"] == "saturated, not split" if D >= 2 else True,
    }
    witness = ("0 -> k.(beta) -> (O_K/p).u' -> k.u -> 0 is not split (beta = pi.u')" if D >= 2 else None)
    return BgRun("ht", params, _truncate(E2, D), final,
                 {"start": E2.labels, "final": {k: v for k, v in E3.labels.items() if k in final}},
                 claimed, checks, view, witness)


# ---------------------------------------------------------------- filtered models


def bg_filtered_model(params: BgParams, target: str) -> FilteredComplex:
    """A filtered complex whose first page is the Hodge page (dr) or the Hodge-Tate E_2 (ht).

    For ``ht`` the filtration is increasing in the form degree, so the named
    ``d_2`` becomes the model's first differential.
    """
    D = params.max_degree
    R = params.ring
    level = (lambda m: m.form) if target == "dr" else (lambda m: -m.form)
    basis = {}          # degree -> list of (name, level)
    rels = []           # (source name, source degree, {target name: coeff})

    def add(n, name, lev):
        basis.setdefault(n, []).append((name, lev))

    add(0, "1", 0)
    for m in range(1, (D + 1) // 2 + 1):
        if target == "dr":
            top, sub = Monomial(m, 0, 0), Monomial(m - 1, 1, 0)
        else:
            top, sub = Monomial(0, m, 0), Monomial(1, m - 1, 0)
        n = 2 * m
        la, lb = level(top), level(sub)
        add(n, top.name, la)
        add(n, sub.name, lb)
        add(n - 1, f"e[{top.name}]", la)
        add(n - 1, f"e[{sub.name}]", lb)
        rels.append((f"e[{top.name}]", n - 1, {top.name: R.pi, sub.name: -R.one}))
        rels.append((f"e[{sub.name}]", n - 1, {sub.name: R.pi}))
    shift = (0, 2) if target == "dr" else (2, 0)
    for s in monomials(D):
        if not s.eps:
            continue
        t = Monomial(s.a + shift[0], s.b + shift[1], 0)
        n, j, jt = s.total, level(s), level(t)
        xs, ys, xt, yt = f"x[{s.name}]", s.name, f"x[{t.name}]", t.name
        add(n - 1, xs, j)
        add(n, ys, j)
        add(n, xt, jt)
        add(n + 1, yt, jt)
        rels.append((xs, n - 1, {ys: R.pi, xt: -R.one}))
        rels.append((ys, n, {yt: R.one}))
        rels.append((xt, n, {yt: R.pi}))
    top = max(basis)
    index = {n: {name: k for k, (name, _) in enumerate(basis.get(n, []))} for n in range(top + 1)}
    ranks = [len(basis.get(n, [])) for n in range(top + 1)]
    diffs = [Matrix.zeros(R, ranks[n + 1], ranks[n]) for n in range(top)]
    for src, n, img in rels:
        k = index[n][src]
        for name, c in img.items():
            diffs[n].rows[index[n + 1][name]][k] = c
    C = FreeComplex(R, 0, ranks, diffs)
    levels = {n: [lev for _, lev in basis.get(n, [])] for n in range(top + 1)}
    fc = FilteredComplex(C, levels, "decreasing" if target == "dr" else "increasing")
    fc.names = {n: [name for name, _ in basis.get(n, [])] for n in range(top + 1)}
    return fc


def _model_pages_agree(model: FilteredComplex, first: PageData, final: PageData, D, relabel) -> bool:
    ps = pages(model, 1)
    mine1 = {k: v for k, v in ps[0].invariants().items() if sum(k) <= D}
    theirs1 = {relabel(k): v for k, v in _truncate(first, D).items()}
    inf = {k: v for k, v in infinity_page(model).invariants().items() if sum(k) <= D}
    theirs = {relabel(k): v for k, v in _truncate(final, D).items()}
    return mine1 == theirs1 and inf == theirs


def classifier_view(model: FilteredComplex, D: int) -> dict:
    """Classifier verdicts on a model, restricted to total degrees ``<= D``."""
    A = Analysis(model)
    rep = classify(model, A)
    onset = None
    for n in range(0, D + 1):
        if not A.rank_additive(n):
            onset = n
            break
        if A.H(n).invariants.tor().length != A.gr_torsion(n).length:
            onset = n
            break
    inj = [n for n, v in rep.degrees.items() if n <= D and not v.degenerate]
    d2 = rep.degrees.get(2)
    if d2 is None:
        deg2 = "absent"
    elif d2.split:
        deg2 = "split"
    elif d2.saturated:
        deg2 = "saturated, not split"
    else:
        deg2 = "not saturated"
    return {
        "verdict": rep.verdict,
        "onset_degree": onset,
        "first_injectivity_failure": min(inj) if inj else None,
        "first_failure": rep.first_failure,
        "degree_2": deg2,
        "degree_2_witness": d2.witness if d2 else None,
    }


# ---------------------------------------------------------------- ledger


def bg_condition_report(params: BgParams):
    e = 2
    hdr = bg_filtered_model(params, "dr")
    ht = bg_filtered_model(params, "ht")
    led = condition_ledger(hdr, ht, params.p, e, c1=False)
    led.notes.append("C.1 false: the lifting obstruction reduces to that of alpha_p over W_2")
    if led.threshold.T <= 3:
        led.notes.append(f"T = {led.threshold.T} leaves degree 3 outside the torsion window")
    return led
