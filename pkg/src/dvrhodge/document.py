"""The JSON input document shared by all CLI subcommands.

A document is an object with any of the blocks below; entries are ring
elements written as JSON numbers or strings in the ring's element grammar.

    {
      "ring": {"kind": "p-local-int", "p": 5},
      "matrix": [["pi", 1], [0, "5"]],
      "module": {"orders": [1, 2, null]}            or {"relations": [[...]]},
      "complex": {"lo": 0, "ranks": [1, 1], "differentials": [[["pi"]]]},
      "filtration": {"orientation": "decreasing",
                     "steps": {"1": {"0": [], "1": [["1"]]}}},
      "page": {"r": 1, "r_stop": 2,
               "entries": {"0,0": {"orders": [null], "labels": ["1"]}},
               "rules": {"1": {"x": {"y": "1"}}}}
    }

``steps[j][n]`` lists the rows of a matrix whose columns generate ``Fil^j``
in degree ``n``; ``[]`` is the zero submodule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .complexes import FreeComplex
from .errors import DvrError, InputError
from .linalg import Matrix
from .modules import Module
from .ring import RingSpec, ring_from_spec
from .spectral import FilteredComplex, PageData

BLOCKS = ("ring", "matrix", "module", "complex", "filtration", "page")


@dataclass
class InputDocument:
    ring: object
    matrix: Optional[Matrix] = None
    module: Optional[Module] = None
    complex: Optional[FreeComplex] = None
    filtered: Optional[FilteredComplex] = None
    page: Optional[PageData] = None
    page_rules: Optional[dict] = None
    page_stop: Optional[int] = None
    steps: Optional[dict] = None

    def require(self, what: str):
        value = {"matrix": self.matrix, "module": self.module, "complex": self.complex,
                 "filtration": self.filtered, "page": self.page}[what]
        if value is None:
            raise InputError(f"this command needs a {what!r} block")
        return value


def _obj(value, where, kind=dict):
    if not isinstance(value, kind):
        raise InputError(f"expected {'an object' if kind is dict else 'a list'}", where)
    return value


def _int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError("expected an integer", where)
    return value


def _element(R, value, where):
    if isinstance(value, bool):
        raise InputError("expected a ring element", where)
    if isinstance(value, int):
        return R.from_int(value)
    if isinstance(value, str):
        try:
            return R.parse(value, where)
        except InputError:
            raise
        except (DvrError, ValueError, ZeroDivisionError) as exc:
            raise InputError(str(exc), where) from None
    raise InputError("expected a number or a string", where)


def _matrix(R, rows, where, nrows=None, ncols=None) -> Matrix:
    rows = _obj(rows, where, list)
    if nrows is not None and not rows:
        # [] is the zero matrix of the expected shape
        return Matrix.zeros(R, nrows, 0 if ncols is None else ncols)
    out = []
    width = None
    for i, row in enumerate(rows):
        row = _obj(row, f"{where}[{i}]", list)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputError(f"row {i} has {len(row)} entries, expected {width}", where)
        out.append([_element(R, x, f"{where}[{i}][{j}]") for j, x in enumerate(row)])
    width = width or 0
    if nrows is not None and len(out) != nrows:
        raise InputError(f"expected {nrows} rows, got {len(out)}", where)
    if ncols is not None and width != ncols:
        raise InputError(f"expected {ncols} columns, got {width}", where)
    return Matrix(R, out, width)


def _ring(block):
    block = _obj(block, "ring")
    if "kind" not in block or "p" not in block:
        raise InputError("needs 'kind' and 'p'", "ring")
    try:
        spec = RingSpec(block["kind"], _int(block["p"], "ring.p"),
                        Fraction(str(block.get("unit_multiplier", 1))))
    except InputError:
        raise
    except (DvrError, ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc), "ring") from None
    return ring_from_spec(spec)


def _orders(value, where):
    value = _obj(value, where, list)
    out = []
    for i, x in enumerate(value):
        if x is None:
            out.append(None)
        else:
            x = _int(x, f"{where}[{i}]")
            if x < 0:
                raise InputError("orders are nonnegative exponents or null", f"{where}[{i}]")
            out.append(x)
    return out


def _module(R, block):
    block = _obj(block, "module")
    if "orders" in block:
        orders = _orders(block["orders"], "module.orders")
        tors = sorted(x for x in orders if x)
        return Module(R, tors + [None] * orders.count(None))
    if "relations" in block:
        from .modules import canonical_from_relations

        rel = _matrix(R, block["relations"], "module.relations")
        n = _int(block.get("generators", rel.nrows), "module.generators")
        if rel.nrows != n:
            raise InputError(f"relations need {n} rows", "module.relations")
        return canonical_from_relations(R, n, rel)[0]
    raise InputError("needs 'orders' or 'relations'", "module")


def _complex(R, block):
    block = _obj(block, "complex")
    lo = _int(block.get("lo", 0), "complex.lo")
    ranks = [_int(x, f"complex.ranks[{i}]") for i, x in enumerate(_obj(block.get("ranks"), "complex.ranks", list))]
    if any(r < 0 for r in ranks):
        raise InputError("ranks must be nonnegative", "complex.ranks")
    raw = _obj(block.get("differentials", []), "complex.differentials", list)
    if len(raw) != max(len(ranks) - 1, 0):
        raise InputError(f"expected {max(len(ranks) - 1, 0)} differentials, got {len(raw)}",
                         "complex.differentials")
    diffs = [_matrix(R, m, f"complex.differentials[{k}]", ranks[k + 1], ranks[k]) for k, m in enumerate(raw)]
    try:
        return FreeComplex(R, lo, ranks, diffs)
    except DvrError as exc:
        raise InputError(str(exc), "complex.differentials") from None


def _filtration(R, C, block):
    block = _obj(block, "filtration")
    orientation = block.get("orientation", "decreasing")
    raw = _obj(block.get("steps", {}), "filtration.steps")
    steps = {}
    for j, per in raw.items():
        try:
            jj = int(j)
        except ValueError:
            raise InputError("step keys are integers", f"filtration.steps.{j}") from None
        per = _obj(per, f"filtration.steps.{j}")
        steps[jj] = {}
        for n, rows in per.items():
            try:
                nn = int(n)
            except ValueError:
                raise InputError("degree keys are integers", f"filtration.steps.{j}.{n}") from None
            where = f"filtration.steps.{j}.{n}"
            if not C.lo <= nn <= C.hi:
                raise InputError(f"degree {nn} is outside the window", where)
            steps[jj][nn] = _matrix(R, rows, where, C.rank(nn))
    try:
        return FilteredComplex.from_steps(C, steps, orientation), steps
    except DvrError as exc:
        raise InputError(str(exc), "filtration") from None


def _key(text, where):
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise InputError("page keys look like 'x,y'", where) from None
    return (a, b)


def _page(R, block):
    block = _obj(block, "page")
    r = _int(block.get("r", 1), "page.r")
    stop = _int(block.get("r_stop", r + 1), "page.r_stop")
    mods, labels = {}, {}
    for k, ent in _obj(block.get("entries", {}), "page.entries").items():
        where = f"page.entries.{k}"
        key = _key(k, where)
        ent = _obj(ent, where)
        orders = _orders(ent.get("orders", []), f"{where}.orders")
        if orders != sorted(x for x in orders if x is not None) + [None] * orders.count(None) or 0 in orders:
            raise InputError("orders must be positive exponents ascending, then nulls", f"{where}.orders")
        mods[key] = Module(R, orders)
        names = ent.get("labels") or [f"g{key[0]}_{key[1]}_{i}" for i in range(len(orders))]
        if len(names) != len(orders):
            raise InputError("one label per generator", f"{where}.labels")
        labels[key] = [str(x) for x in names]
    known = {lab for v in labels.values() for lab in v}
    rules = {}
    for rk, spec in _obj(block.get("rules", {}), "page.rules").items():
        where = f"page.rules.{rk}"
        try:
            rr = int(rk)
        except ValueError:
            raise InputError("rule keys are page numbers", where) from None
        table = {}
        for src, img in _obj(spec, where).items():
            if src not in known:
                raise InputError(f"unknown generator {src!r}", where)
            img = _obj(img, f"{where}.{src}")
            table[src] = {t: _element(R, c, f"{where}.{src}.{t}") for t, c in img.items()}
        rules[rr] = table
    return PageData(r, mods, {}, labels), rules, stop


def from_dict(data: dict) -> InputDocument:
    data = _obj(data, "document")
    unknown = sorted(set(data) - set(BLOCKS))
    if unknown:
        raise InputError(f"unknown block {unknown[0]!r}", "document")
    if "ring" not in data:
        raise InputError("missing 'ring' block", "document")
    R = _ring(data["ring"])
    doc = InputDocument(R)
    if "matrix" in data:
        doc.matrix = _matrix(R, data["matrix"], "matrix")
    if "module" in data:
        doc.module = _module(R, data["module"])
    if "complex" in data:
        doc.complex = _complex(R, data["complex"])
    if "filtration" in data:
        if doc.complex is None:
            raise InputError("a filtration needs a 'complex' block", "filtration")
        doc.filtered, doc.steps = _filtration(R, doc.complex, data["filtration"])
    if "page" in data:
        doc.page, doc.page_rules, doc.page_stop = _page(R, data["page"])
    return doc


def parse(text: str) -> InputDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"syntax error: {exc.msg}", f"line {exc.lineno}, column {exc.colno}") from None
    return from_dict(data)


# ---------------------------------------------------------------- serialize


def _fmt_matrix(R, M: Matrix):
    return [[R.format(x) for x in row] for row in M.rows]


def serialize(doc: InputDocument) -> dict:
    R = doc.ring
    out = {"ring": R.spec.to_dict()}
    if doc.matrix is not None:
        out["matrix"] = _fmt_matrix(R, doc.matrix)
    if doc.module is not None:
        out["module"] = {"orders": list(doc.module.orders)}
    if doc.complex is not None:
        C = doc.complex
        out["complex"] = {"lo": C.lo, "ranks": list(C.ranks),
                          "differentials": [_fmt_matrix(R, d) for d in C.diffs]}
    if doc.filtered is not None:
        steps = {}
        for j, per in sorted((doc.steps or {}).items()):
            steps[str(j)] = {str(n): (_fmt_matrix(R, M) if M.ncols else []) for n, M in sorted(per.items())}
        out["filtration"] = {"orientation": doc.filtered.orientation, "steps": steps}
    if doc.page is not None:
        entries = {f"{a},{b}": {"orders": list(m.orders), "labels": doc.page.labels[(a, b)]}
                   for (a, b), m in sorted(doc.page.entries.items())}
        rules = {str(r): {s: {t: R.format(c) for t, c in img.items()} for s, img in tab.items()}
                 for r, tab in sorted((doc.page_rules or {}).items())}
        out["page"] = {"r": doc.page.r, "r_stop": doc.page_stop, "entries": entries, "rules": rules}
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
