import json

import pytest
from hypothesis import given

from conftest import ring_for, rngs
from dvrhodge.document import dumps, from_dict, parse, serialize
from dvrhodge.errors import InputError
from dvrhodge.generators import random_matrix, random_perfect_complex

MINIMAL = {"ring": {"kind": "p-local-int", "p": 5},
           "complex": {"lo": 0, "ranks": [1, 1], "differentials": [[["5"]]]}}


def test_minimal_document():
    doc = parse(json.dumps(MINIMAL))
    assert doc.complex.ranks == (1, 1)
    assert doc.require("complex") is doc.complex
    with pytest.raises(InputError, match="filtration"):
        doc.require("filtration")


def test_filtration_and_page_blocks():
    data = dict(MINIMAL)
    data["filtration"] = {"orientation": "decreasing", "steps": {"1": {"0": [], "1": [["1"]]}}}
    data["page"] = {"r": 1, "r_stop": 2,
                    "entries": {"0,0": {"orders": [None], "labels": ["a"]},
                                "1,0": {"orders": [None], "labels": ["b"]}},
                    "rules": {"1": {"a": {"b": "5"}}}}
    doc = from_dict(data)
    assert doc.filtered.levels == {0: (0,), 1: (1,)}
    assert doc.page.labels[(1, 0)] == ["b"]
    assert serialize(parse(dumps(serialize(doc)))) == serialize(doc)


def test_syntax_error_has_location():
    with pytest.raises(InputError, match="line 2, column"):
        parse('{"ring":\n  {"kind": }')


def test_pi_in_denominator():
    data = {"ring": {"kind": "p-local-int", "p": 5}, "matrix": [["1/5"]]}
    with pytest.raises(InputError, match=r"matrix\[0\]\[0\]"):
        from_dict(data)


def test_d_squared_nonzero_names_degrees():
    data = {"ring": {"kind": "p-local-int", "p": 5},
            "complex": {"ranks": [1, 1, 1], "differentials": [[["1"]], [["1"]]]}}
    with pytest.raises(InputError, match=r"d\^1 o d\^0"):
        from_dict(data)


def test_filtration_not_a_subcomplex():
    data = dict(MINIMAL)
    data["filtration"] = {"steps": {"1": {"0": [["1"]], "1": []}}}
    with pytest.raises(InputError, match="not a subcomplex"):
        from_dict(data)


@pytest.mark.parametrize("bad", [
    {"ring": {"kind": "p-local-int", "p": 5}, "extra": 1},
    {"matrix": [[1]]},
    {"ring": {"kind": "p-local-int", "p": 4}},
    {"ring": {"kind": "p-local-int", "p": 5}, "matrix": [[1, 2], [3]]},
    {"ring": {"kind": "p-local-int", "p": 5}, "module": {"orders": [-1]}},
    {"ring": {"kind": "p-local-int", "p": 5}, "complex": {"ranks": [1, 1], "differentials": []}},
    {"ring": {"kind": "p-local-int", "p": 5}, "page": {"entries": {"0,0": {"orders": [2, 1]}}}},
    {"ring": {"kind": "p-local-int", "p": 5},
     "page": {"entries": {"0,0": {"orders": [None], "labels": ["a"]}}, "rules": {"1": {"q": {}}}}},
])
def test_semantic_errors(bad):
    with pytest.raises(InputError):
        from_dict(bad)


def test_module_from_relations():
    doc = from_dict({"ring": {"kind": "ramified-quadratic", "p": 5},
                     "module": {"relations": [["pi", "0"], ["0", "5"]]}})
    assert doc.module.orders == (1, 2)


@given(rng=rngs())
def test_round_trip(rng):
    R = ring_for(rng.randint(0, 2))
    C = random_perfect_complex(rng, R)
    A = random_matrix(rng, R, 2, 3)
    data = {"ring": R.spec.to_dict(), "matrix": [[R.format(x) for x in r] for r in A.rows],
            "complex": {"lo": C.lo, "ranks": list(C.ranks),
                        "differentials": [[[R.format(x) for x in r] for r in d.rows] for d in C.diffs]}}
    once = serialize(parse(dumps(data)))
    assert serialize(parse(dumps(once))) == once
    assert parse(dumps(once)).complex.diffs == C.diffs
