"""Command-line entry point.

Exit codes: 0 success, 1 a violated check or failed contract, 2 bad input.
``DVRHODGE_OUTPUT=json`` makes structured output the default.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import document
from .bg import BgParams, bg_condition_report, bg_hdr_run, bg_hodge_E1, bg_ht_run, bg_structure_cohomology
from .complexes import cohomology, dualize
from .errors import DvrError, InputError
from .hodge import condition_ledger, equality_theorem_check
from .linalg import snf
from .modules import char_polygon
from .spectral import Analysis, classify, pages, run_page_sequence
from .suites import SUITES, run_suite


class _Failure(Exception):
    """Raised to exit with status 1 after output has been written."""


def _read(path: str) -> document.InputDocument:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(exc.strerror or str(exc), path) from None
    return document.parse(text)


def _fmt_rows(R, M) -> list:
    return [" ".join(R.format(x) for x in row) for row in M.rows]


def _emit(args, data, text):
    if args.json:
        sys.stdout.write(document.dumps(data))
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------- commands


def cmd_snf(args):
    doc = _read(args.input)
    A = doc.require("matrix")
    R = doc.ring
    s = snf(A)
    data = {"exponents": list(s.exponents), "rank": s.rank,
            "D": document._fmt_matrix(R, s.D), "U": document._fmt_matrix(R, s.U),
            "V": document._fmt_matrix(R, s.V)}
    lines = [f"exponents: {list(s.exponents)}", f"rank: {s.rank}"]
    for name in ("D", "U", "V"):
        lines.append(f"{name}:")
        lines += ["  " + r for r in _fmt_rows(R, getattr(s, name))]
    _emit(args, data, "\n".join(lines))


def _module_of(doc):
    if doc.module is not None:
        return doc.module.invariants
    if doc.matrix is not None:
        from .modules import presented

        return presented(doc.ring, doc.matrix)
    raise InputError("this command needs a 'module' or 'matrix' block")


def cmd_module_info(args):
    M = _module_of(_read(args.input))
    data = {**M.to_dict(), "length": M.length, "width": M.width, "dim_mod_pi": M.dim_mod_pi,
            "module": str(M)}
    lines = [f"module: {M}", f"free rank: {M.free_rank}", f"torsion exponents: {list(M.torsion)}",
             f"length: {M.length}", f"width: {M.width}", f"dim mod pi: {M.dim_mod_pi}"]
    if not M.free_rank:
        P = char_polygon(M)
        data["polygon"] = [list(v) for v in P.vertices]
        lines.append(f"polygon: {P.to_text()}")
    _emit(args, data, "\n".join(lines))


def cmd_polygon(args):
    M = _module_of(_read(args.input))
    P = char_polygon(M.tor() if args.torsion_part else M)
    if args.svg:
        svg = P.to_svg()
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(svg)
        else:
            sys.stdout.write(svg)
        return
    _emit(args, {"vertices": [list(v) for v in P.vertices], "width": P.width, "length": P.length},
          P.to_text())


def _cohomology_table(C):
    rec = cohomology(C)
    data = {str(i): M.to_dict() for i, M in rec.summary().items()}
    text = "\n".join(f"H^{i}: {M}" for i, M in rec.summary().items())
    return data, text


def cmd_cohomology(args):
    C = _read(args.input).require("complex")
    data, text = _cohomology_table(C)
    _emit(args, {"cohomology": data}, text)


def cmd_dualize(args):
    doc = _read(args.input)
    C = doc.require("complex")
    V = dualize(C)
    out = document.InputDocument(doc.ring, complex=V)
    data, text = _cohomology_table(V)
    structured = {"complex": document.serialize(out)["complex"], "cohomology": data}
    lines = [f"dual window: [{V.lo}, {V.hi}], ranks {list(V.ranks)}"]
    for k, d in enumerate(V.diffs):
        lines.append(f"d^{V.lo + k}: " + " | ".join(_fmt_rows(doc.ring, d)))
    _emit(args, structured, "\n".join(lines) + "\n" + text)


def _page_text(P, labels=None):
    lines = [f"E_{P.r}:"]
    for k, M in sorted(P.entries.items()):
        if not M.ngens:
            continue
        extra = f"  [{', '.join(P.labels[k])}]" if P.labels.get(k) else ""
        lines.append(f"  ({k[0]},{k[1]}): {M.invariants}{extra}")
    for k in P.nonzero_differentials():
        t = (k[0] + P.r, k[1] + 1 - P.r)
        lines.append(f"  d_{P.r}: ({k[0]},{k[1]}) -> ({t[0]},{t[1]}) nonzero")
    return lines


def _page_json(P):
    return {"r": P.r,
            "entries": {f"{a},{b}": str(M.invariants) for (a, b), M in sorted(P.entries.items()) if M.ngens},
            "labels": {f"{a},{b}": v for (a, b), v in sorted(P.labels.items())},
            "nonzero_differentials": [f"{a},{b}" for a, b in P.nonzero_differentials()]}


def cmd_pages(args):
    doc = _read(args.input)
    if doc.page is not None and doc.filtered is None:
        rules = {r: (lambda lab, t=t: t.get(lab, {})) for r, t in doc.page_rules.items()}
        run = run_page_sequence(doc.page, rules, args.r_max or doc.page_stop)
        ps = run.pages
        extra = {"stable_from": run.stable_from}
    else:
        FC = doc.require("filtration")
        ps = pages(FC, args.r_max)
        extra = {"orientation": FC.orientation}
    lines = [line for P in ps for line in _page_text(P)]
    if "stable_from" in extra:
        lines.append(f"stable from r = {extra['stable_from']}")
    _emit(args, {"pages": [_page_json(P) for P in ps], **extra}, "\n".join(lines))


def cmd_classify(args):
    FC = _read(args.input).require("filtration")
    rep = classify(FC)
    head = rep.verdict
    if rep.first_failure:
        w = rep.first_failure
        head += f"; first failure (i={w['i']}, j={w['j']})"
    lines = [head]
    for n, v in sorted(rep.degrees.items()):
        flags = ", ".join(k for k in ("degenerate", "saturated", "split") if getattr(v, k))
        tor = ""
        if v.saturated_torsion is not None:
            tor = f"; torsion saturated={v.saturated_torsion} split={v.split_torsion}"
        lines.append(f"  degree {n}: {flags or 'not degenerate'}{tor}")
    _emit(args, rep.to_dict(), "\n".join(lines))


def cmd_virtual_hodge(args):
    FC = _read(args.input).require("filtration")
    rep = equality_theorem_check(FC)
    lines = [rep.virtual.grid("virtual h"), rep.rational.grid("rational h"),
             f"hypothesis level: {rep.level}", f"equal: {rep.equal}"]
    if rep.identification is not None:
        lines.append(f"identification of filtrations: {rep.identification}")
    _emit(args, rep.to_dict(), "\n".join(lines))
    if not rep.holds:
        raise _Failure()


def _bool(text):
    if text is None:
        return None
    return text.lower() in ("1", "true", "yes")


def cmd_ledger(args):
    doc = _read(args.input)
    FC = doc.require("filtration")
    ht = _read(args.ht).require("filtration") if args.ht else None
    led = condition_ledger(FC, ht, args.p, args.e, _bool(args.c1))
    _emit(args, led.to_dict(), led.render())
    if led.violations:
        raise _Failure()


def cmd_bg_demo(args):
    params = BgParams(args.p, args.max_degree, omega=Fraction(args.omega), p2_variant=args.p2_variant)
    if args.target == "hodge":
        page = bg_hodge_E1(params)
        struct = bg_structure_cohomology(params)
        lines = ["Hodge cohomology H^i(Omega^j), keyed (i, j):"]
        for (i, j), M in sorted(page.entries.items()):
            lines.append(f"  ({i},{j}): {M}  [{', '.join(page.labels[(i, j)])}]")
        lines += [f"H^{i}(BG, O): {M}" for i, M in enumerate(struct)]
        data = {"hodge": page.to_dict(), "structure": {str(i): M.to_dict() for i, M in enumerate(struct)}}
        _emit(args, data, "\n".join(lines))
        return
    if args.target == "ledger":
        led = bg_condition_report(params)
        _emit(args, led.to_dict(), led.render())
        if led.violations:
            raise _Failure()
        return
    run = bg_hdr_run(params) if args.target == "dr" else bg_ht_run(params)
    lines = []
    for title, entries, labels in (("start page", run.start, run.labels["start"]),
                                   ("final page", run.final, run.labels["final"])):
        lines.append(f"{title}:")
        for k, M in sorted(entries.items()):
            lines.append(f"  ({k[0]},{k[1]}): {M}  [{', '.join(labels.get(k, []))}]")
    cv = run.classification
    lines.append(f"classifier: {cv['verdict']}; onset degree {cv['onset_degree']}; degree 2 {cv['degree_2']}")
    if run.witness:
        lines.append(f"witness: {run.witness}")
    for k, v in sorted(run.checks.items()):
        lines.append(f"check {k}: {'ok' if v else 'FAILED'}")
    lines += run.table_lines()
    _emit(args, run.to_dict(), "\n".join(lines))
    if not run.ok:
        raise _Failure()


def cmd_randcheck(args):
    res = run_suite(args.suite, args.seed, args.count)
    if args.json:
        sys.stdout.write(document.dumps(res.to_dict()))
    else:
        bad = [r for r in res.records if not r["ok"]]
        for r in bad[:20]:
            sys.stdout.write(f"violation: {r}\n")
        sys.stdout.write(f"{res.summary()}\n{res.violations} violations\n")
    if res.violations:
        raise _Failure()


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(add_help=False)
    top.add_argument("--json", action="store_true",
                     default=os.environ.get("DVRHODGE_OUTPUT", "").lower() == "json",
                     help="structured output (sorted keys)")
    # repeated after the subcommand; SUPPRESS keeps a flag given before it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="structured output (sorted keys)")
    parser = argparse.ArgumentParser(prog="dvrhodge", description="Spectral sequences over a DVR.",
                                     parents=[top])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, needs_input=True):
        p = sub.add_parser(name, help=help_text, parents=[common])
        if needs_input:
            p.add_argument("input", help="input document (JSON), '-' for stdin")
        p.set_defaults(func=func)
        return p

    add("snf", cmd_snf, "Smith normal form of the 'matrix' block")
    add("module-info", cmd_module_info, "invariants of a module")
    p = add("polygon", cmd_polygon, "characteristic polygon of a torsion module")
    p.add_argument("--svg", action="store_true", help="emit SVG instead of text")
    p.add_argument("--output", help="write the SVG to this file")
    p.add_argument("--torsion-part", action="store_true", help="use the torsion submodule")
    add("cohomology", cmd_cohomology, "cohomology of the 'complex' block")
    add("dualize", cmd_dualize, "Hom(C, R) and its cohomology")
    p = add("pages", cmd_pages, "spectral sequence pages")
    p.add_argument("--r-max", type=int, default=None)
    add("classify", cmd_classify, "degeneracy classification")
    add("virtual-hodge", cmd_virtual_hodge, "virtual and rational Hodge numbers")
    p = add("ledger", cmd_ledger, "conditions C.1-C.8 for a Hodge-de Rham filtered complex")
    p.add_argument("--ht", help="optional Hodge-Tate filtered complex document")
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--e", type=int, default=None)
    p.add_argument("--c1", default=None, help="external truth value of C.1")
    p = add("bg-demo", cmd_bg_demo, "the classifying stack example", needs_input=False)
    p.add_argument("--p", type=int, default=5)
    p.add_argument("--max-degree", type=int, default=10)
    p.add_argument("--target", choices=("hodge", "dr", "ht", "ledger"), default="dr")
    p.add_argument("--omega", default="1", help="the unit omega in pi * pi' = omega * p")
    p.add_argument("--p2-variant", action="store_true", help="allow p = 2 (tau^2 = beta u^2)")
    p = add("randcheck", cmd_randcheck, "seeded property suites", needs_input=False)
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except _Failure:
        return 1
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 2
    except DvrError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except AssertionError as exc:
        sys.stderr.write(f"contract failure: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
