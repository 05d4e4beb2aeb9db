import pytest
from hypothesis import given, strategies as st

from conftest import ring_for, rngs
from dvrhodge.complexes import FreeComplex, cohomology
from dvrhodge.errors import PreconditionError
from dvrhodge.generators import (
    defective_block,
    random_corpus_instance,
    random_defective,
    random_saturated,
    random_split_filtered,
)
from dvrhodge.hodge import (
    condition_ledger,
    equality_theorem_check,
    rational_hodge_numbers,
    threshold,
    virtual_hodge_numbers,
)
from dvrhodge.linalg import Matrix
from dvrhodge.ring import is_prime, make_ring
from dvrhodge.spectral import Analysis, FilteredComplex, classify


def nonzero(table):
    return {k: v for k, v in table.entries.items() if v}


@pytest.mark.parametrize("p,e,T", [(11, 2, 4), (5, 1, 3), (3, 2, 0), (5, 2, 1), (2, 1, 0)])
def test_threshold_examples(p, e, T):
    assert threshold(p, e).T == T


@given(p=st.integers(2, 200).filter(is_prime), e=st.integers(1, 12))
def test_threshold_bounds(p, e):
    T = threshold(p, e).T
    assert T * e < p - 1 <= (T + 1) * e or (T == 0 and p - 1 <= e)


def test_trivial_filtration(ring):
    R = ring
    C = FreeComplex(R, 0, [2, 2], [Matrix(R, [[R.pi, R.zero], [R.zero, R.zero]])])
    FC = FilteredComplex(C, {0: [0, 0], 1: [0, 0]})
    H = cohomology(C)
    expect = {(0, n): H.module(n).free_rank for n in C.degrees if H.module(n).free_rank}
    assert nonzero(virtual_hodge_numbers(FC)) == expect
    assert nonzero(rational_hodge_numbers(FC)) == expect


def test_zero_complex(ring):
    FC = FilteredComplex(FreeComplex(ring, 0, [0], []), {0: []})
    assert nonzero(virtual_hodge_numbers(FC)) == {}
    rep = equality_theorem_check(FC)
    assert rep.equal and rep.holds


def test_stupid_filtration_with_zero_differentials(ring):
    R = ring
    C = FreeComplex(R, 0, [2, 1, 3], [Matrix.zeros(R, 1, 2), Matrix.zeros(R, 3, 1)])
    FC = FilteredComplex(C, {n: [n] * C.rank(n) for n in C.degrees})
    assert nonzero(rational_hodge_numbers(FC)) == {(0, 0): 2, (1, 0): 1, (2, 0): 3}


def test_defective_block_shows_inequality(ring):
    rep = equality_theorem_check(defective_block(ring, 0))
    assert rep.level == "degenerate"
    assert not rep.equal and rep.identification


def test_hodge_numbers_need_decreasing(ring):
    R = ring
    C = FreeComplex(R, 0, [1], [])
    with pytest.raises(PreconditionError):
        virtual_hodge_numbers(FilteredComplex(C, {0: [0]}, "increasing"))


def test_ledger_split_control(ring):
    R = ring
    C = FreeComplex(R, 0, [2, 2], [Matrix.diagonal(R, [R.pi, R.pi_power(2)])])
    FC = FilteredComplex(C, {0: [0, 1], 1: [0, 1]})
    led = condition_ledger(FC, FC, p=11, e=2)
    assert all(led.status[k] for k in ("C.2", "C.3", "C.4", "C.5", "C.6", "C.7", "C.8"))
    assert led.status["C.1"] is None and led.violations == []
    assert "C.6 true" in led.render()


def test_ledger_window_follows_threshold():
    R = make_ring("p-local-int", 11)
    late = defective_block(R, 3)     # defect in degree 4, outside degrees <= T-1 = 3
    led = condition_ledger(late, p=11, e=2)
    assert led.status["C.4"] and led.status["C.5"]
    assert not led.status["C.7"] and not led.status["C.8"]
    assert led.violations == []
    early = defective_block(R, 1)    # defect in degree 2
    led = condition_ledger(early, p=11, e=2)
    assert not led.status["C.5"] and not led.status["C.4"]


@given(rng=rngs())
def test_virtual_numbers_partition_the_rank(rng):
    R = ring_for(rng.randint(0, 2))
    FC = random_corpus_instance(rng, R)
    A = Analysis(FC)
    v, r = virtual_hodge_numbers(FC, A), rational_hodge_numbers(FC, A)
    for n in FC.ambient.degrees:
        rk = A.H(n).invariants.free_rank
        assert v.degree_sum(n) == rk == r.degree_sum(n)
    assert all(x >= 0 for x in v.entries.values())


@given(rng=rngs())
def test_split_instances_read_graded_ranks(rng):
    R = ring_for(rng.randint(0, 2))
    FC = random_split_filtered(rng, R)
    A = Analysis(FC)
    v = virtual_hodge_numbers(FC, A)
    for n in FC.ambient.degrees:
        for p in FC.jumps:
            assert v.get(p, n - p) == A.H_gr(p, n).free_rank


@given(rng=rngs())
def test_equality_on_saturated_instances(rng):
    R = ring_for(rng.randint(0, 2))
    FC = random_saturated(rng, R)
    rep = equality_theorem_check(FC)
    assert rep.level == "saturated" and rep.equal


@given(rng=rngs())
def test_defective_instances_break_equality(rng):
    R = ring_for(rng.randint(0, 2))
    rep = equality_theorem_check(random_defective(rng, R))
    assert not rep.equal and rep.holds


@given(rng=rngs())
def test_ledger_implications_hold(rng):
    R = ring_for(rng.randint(0, 2))
    FC = random_corpus_instance(rng, R)
    led = condition_ledger(FC, FC, p=rng.choice([3, 5, 11, 13]), e=rng.randint(1, 2))
    assert led.violations == []
    if classify(FC).saturated:
        assert led.status["C.8"]
