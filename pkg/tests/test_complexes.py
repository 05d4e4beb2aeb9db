import pytest
from hypothesis import given

from conftest import ring_for, rngs
from dvrhodge.complexes import (
    ComplexMap,
    FreeComplex,
    cohomology,
    compare_map,
    dimension_equality,
    dualize,
    identification_check,
    koszul,
    mod_pi,
)
from dvrhodge.errors import NotAComplexError, PreconditionError
from dvrhodge.generators import random_perfect_complex, random_saturated, random_split_filtered
from dvrhodge.linalg import Matrix, cokernel_invariants, rank
from dvrhodge.modules import FinModule
from dvrhodge.spectral import Analysis
from dvrhodge.suites import duality_defects


def two_term(R, x):
    return FreeComplex(R, 0, [1, 1], [Matrix(R, [[x]])])


def identity_map(C):
    return ComplexMap(C, C, {i: Matrix.identity(C.ring, C.rank(i)) for i in C.degrees})


def test_two_term_cohomology(ring):
    R = ring
    H = cohomology(two_term(R, R.pi_power(3)))
    assert H.module(0) == FinModule() and H.module(1) == FinModule(0, (3,))
    H = cohomology(two_term(R, R.zero))
    assert H.module(0) == H.module(1) == FinModule(1)


def test_koszul_cohomology(ring):
    R = ring
    H = cohomology(koszul(R, R.pi, R.pi))
    assert [H.module(i) for i in range(3)] == [FinModule(), FinModule(0, (1,)), FinModule(0, (1,))]


def test_not_a_complex(ring):
    R = ring
    with pytest.raises(NotAComplexError, match="d\\^1 o d\\^0"):
        FreeComplex(R, 0, [1, 1, 1], [Matrix(R, [[R.one]]), Matrix(R, [[R.one]])])


def test_dualize_examples(ring):
    R = ring
    C = two_term(R, R.pi_power(2))
    V = dualize(C)
    assert (V.lo, V.hi) == (-1, 0)
    assert cohomology(V).module(0) == FinModule(0, (2,))
    point = FreeComplex(R, 0, [1], [])
    assert cohomology(dualize(point)).module(0) == FinModule(1)


def test_compare_map_examples(ring):
    R = ring
    res = compare_map(two_term(R, R.pi), 1)
    assert (res.dim_source, res.dim_target, res.image_dim) == (1, 1, 1)
    K = koszul(R, R.pi, R.pi)
    Kb = mod_pi(K)
    assert [Kb.dim_h(i) for i in range(3)] == [1, 2, 1]
    assert [compare_map(K, i).image_dim for i in range(3)] == [0, 1, 1]


def test_identification_trivial_cases(ring):
    R = ring
    K = koszul(R, R.pi, R.pi_power(2))
    f = identity_map(K)
    for n in K.degrees:
        assert identification_check(f, n)
        h = cohomology(K).module(n).free_rank
        assert dimension_equality(f, n) == (h, h)
    zero = FreeComplex(R, 0, [0, 0, 0], [Matrix.zeros(R, 0, 0)] * 2)
    g = ComplexMap(zero, K, {})
    assert identification_check(g, 1)
    assert dimension_equality(g, 0) == (0, 0)


def test_identification_precondition(ring):
    R = ring
    # Fil^1 = (0 -> R) inside [R --pi--> R]: H^1(Fil) = R -> H^1(C) = R/pi not injective
    C = two_term(R, R.pi)
    U = FreeComplex(R, 0, [0, 1], [Matrix.zeros(R, 1, 0)])
    f = ComplexMap(U, C, {1: Matrix.identity(R, 1)})
    with pytest.raises(PreconditionError):
        identification_check(f, 0)


@given(rng=rngs())
def test_cohomology_matches_elementary_divisors(rng):
    R = ring_for(rng.randint(0, 2))
    C = random_perfect_complex(rng, R)
    H = cohomology(C)
    for i in C.degrees:
        r_out = rank(C.d(i))
        r_in = rank(C.d(i - 1))
        tors = cokernel_invariants(C.d(i - 1))[1]
        assert H.module(i) == FinModule(C.rank(i) - r_out - r_in, tors)


@given(rng=rngs())
def test_euler_characteristic(rng):
    R = ring_for(rng.randint(0, 2))
    C = random_perfect_complex(rng, R)
    H = cohomology(C)
    assert C.euler_characteristic() == sum((-1) ** i * H.module(i).free_rank for i in C.degrees)


@given(rng=rngs())
def test_duality_identities(rng):
    R = ring_for(rng.randint(0, 2))
    assert duality_defects(random_perfect_complex(rng, R)) == []


@given(rng=rngs())
def test_double_dual(rng):
    R = ring_for(rng.randint(0, 2))
    C = random_perfect_complex(rng, R)
    DD = dualize(dualize(C))
    assert (DD.lo, DD.ranks) == (C.lo, C.ranks)
    assert cohomology(DD).summary() == cohomology(C).summary()


@given(rng=rngs())
def test_compare_map_is_injective(rng):
    R = ring_for(rng.randint(0, 2))
    C = random_perfect_complex(rng, R)
    for i in C.degrees:
        assert compare_map(C, i).injective


@given(rng=rngs())
def test_identification_on_degenerate_filtrations(rng):
    R = ring_for(rng.randint(0, 2))
    FC = random_saturated(rng, R)
    for p in Analysis(FC).steps:
        _, inc = FC.fil(p)
        for n in FC.ambient.degrees:
            assert identification_check(inc, n)


@given(rng=rngs())
def test_dimension_equality_on_split_filtrations(rng):
    R = ring_for(rng.randint(0, 2))
    FC = random_split_filtered(rng, R)
    for p in Analysis(FC).steps:
        _, inc = FC.fil(p)
        for n in FC.ambient.degrees:
            lhs, rhs = dimension_equality(inc, n)
            assert lhs == rhs
