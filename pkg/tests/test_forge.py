import dataclasses
import json
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from allostery import (
    Lamp,
    SubgroupDatum,
    WreathElement,
    WreathGroup,
    assign_primes,
    default_epsilon,
    forge,
)
from allostery.errors import DatumInvariantError, ForgeError
from allostery.forge import as_epsilon, prime_admissible
from allostery.sampling import check_member_closure

from conftest import HALF, fresh_rng


def test_forged_datum_single_lamp(d32):
    assert d32.p == 2
    assert d32.k == 3
    assert d32.l == 2
    assert d32.E == ((0,), (1,))
    assert d32.shift_index == 8
    assert d32.index() == 32
    assert d32.fixed_fraction() == Fraction(3, 4)
    assert d32.lamp_fixed_count() == 24


def test_forged_datum_pure_shift(d9):
    assert (d9.p, d9.k, d9.l) == (3, 1, 1)
    assert d9.E == ((0,),)
    assert d9.index() == 9
    assert d9.fixed_fraction() == Fraction(2, 3)


def test_forged_datum_higher_lamp_rank():
    group = WreathGroup(2, 1)
    gamma = group.parse_element("{(0):(1,0)};(0)")
    datum = forge(gamma, 2, HALF, 2, 1)
    assert (datum.k, datum.l) == (3, 2)
    assert datum.index() == 128


def test_forge_rejects_identity(group11):
    with pytest.raises(ForgeError):
        forge(group11.identity(), 2, HALF, 1, 1)


def test_forge_rejects_dividing_prime(group11):
    gamma = group11.parse_element("{(0):(2)};(0)")
    with pytest.raises(ForgeError):
        forge(gamma, 2, HALF, 1, 1)
    assert forge(gamma, 3, HALF, 1, 1).p == 3


def test_forge_rejects_bad_epsilon(group11):
    gamma = group11.parse_element("{(0):(1)};(0)")
    for eps in (0, 1, 2, Fraction(-1, 2)):
        with pytest.raises(ForgeError):
            forge(gamma, 2, eps, 1, 1)
    with pytest.raises(ForgeError):
        forge(gamma, 4, HALF, 1, 1)


def test_epsilon_accepts_strings(group11):
    gamma = group11.parse_element("{(0):(1)};(0)")
    assert forge(gamma, 2, "1/2", 1, 1) == forge(gamma, 2, HALF, 1, 1)
    assert as_epsilon("3/8") == Fraction(3, 8)


def test_membership_examples(d32, d9, group11):
    assert not d32.contains(d32.gamma)
    assert d32.contains(group11.parse_element("{(0):(2)};(8)"))
    assert d32.contains(group11.identity())
    assert not d32.contains(group11.parse_element("{(0):(2)};(4)"))
    assert not d9.contains(d9.gamma)
    assert d9.contains(group11.parse_element("{};(3)"))


def test_coset_sums(d32, group11):
    sums = d32.coset_sums(group11.parse_element("{(0):(3),(1):(1)};(0)"))
    assert sums == [(1,), (1,)]
    assert d32.coset_sums(group11.identity()) == [(0,), (0,)]


def test_prime_admissible(group11):
    gamma = group11.parse_element("{(0):(6)};(0)")
    assert not prime_admissible(gamma, 2, 1)
    assert not prime_admissible(gamma, 3, 1)
    assert prime_admissible(gamma, 5, 1)
    assert prime_admissible(group11.parse_element("{};(1)"), 2, 1)


def test_assign_primes_basic(group11):
    s = group11.parse_element("{(0):(1)};(0)")
    t = group11.parse_element("{};(1)")
    assignment = assign_primes([s, t], epsilons=HALF)
    assert [p for _, p, _ in assignment.triples] == [2, 3]
    assert all(eps == HALF for _, _, eps in assignment.triples)
    data = assignment.forge_all(1, 1)
    assert [datum.index() for datum in data] == [32, 9]


def test_assign_primes_skips_dividing_primes(group11):
    six = group11.parse_element("{(0):(6)};(0)")
    assignment = assign_primes([six], epsilons=HALF)
    assert assignment.triples[0][1] == 5


def test_assign_primes_schedule(group11):
    s = group11.parse_element("{(0):(1)};(0)")
    t = group11.parse_element("{};(1)")
    assignment = assign_primes([s, t])
    assert [eps for _, _, eps in assignment.triples] == [Fraction(1, 4), Fraction(1, 8)]


def test_assign_primes_rejects_bad_lists(group11):
    s = group11.parse_element("{(0):(1)};(0)")
    with pytest.raises(ForgeError):
        assign_primes([s, s])
    with pytest.raises(ForgeError):
        assign_primes([s, group11.identity()])
    assert assign_primes([]).forge_all(1, 1) == []


def test_default_epsilon_schedule():
    assert default_epsilon(0) == Fraction(1, 4)
    assert default_epsilon(3) == Fraction(1, 32)
    with pytest.raises(ValueError):
        default_epsilon(-1)
    product = Fraction(1)
    for i in range(20):
        product *= 1 - default_epsilon(i)
        assert product >= HALF


def test_validate_rejects_broken_data(d32):
    cases = [
        {"k": 0},
        {"l": 1},
        {"E": ((0,),)},
        {"E": ((0,), (0,))},
        {"E": ((0,), (8,))},
        {"E": ((1,), (2,))},
        {"epsilon": Fraction(2)},
        {"p": 6},
        {"epsilon": Fraction(1, 100)},
    ]
    for fields in cases:
        broken = dataclasses.replace(d32, **fields)
        with pytest.raises(DatumInvariantError):
            broken.validate()


def test_validate_rejects_broken_gamma(d32, d9, group11):
    bad_lamp = dataclasses.replace(d32, gamma=group11.parse_element("{(0):(2)};(0)"))
    with pytest.raises(DatumInvariantError):
        bad_lamp.validate()
    kernel_shift = dataclasses.replace(d9, gamma=group11.parse_element("{};(3)"))
    with pytest.raises(DatumInvariantError):
        kernel_shift.validate()
    trivial = dataclasses.replace(d32, gamma=group11.identity())
    with pytest.raises(DatumInvariantError):
        trivial.validate()


def test_round_trip(d32, d9):
    for datum in (d32, d9):
        rec = datum.to_dict()
        assert list(rec) == ["gamma", "p", "k", "l", "E", "epsilon", "d", "m"]
        assert SubgroupDatum.from_dict(rec) == datum
        assert SubgroupDatum.from_dict(json.loads(json.dumps(rec))) == datum
    assert d32.to_dict()["epsilon"] == "1/2"
    assert d32.to_dict()["E"] == [[0], [1]]


def test_gamma_never_in_own_subgroup(group11):
    pool = [e.element for e in group11.ball(2)[1:]]
    for datum in assign_primes(pool, epsilons=HALF).forge_all(1, 1):
        datum.validate()
        assert not datum.contains(datum.gamma)


def test_member_closure_samples(d32, d9):
    rng = fresh_rng(7)
    for _ in range(50):
        assert check_member_closure(rng, d32)
        assert check_member_closure(rng, d9)


@given(
    st.dictionaries(
        st.integers(-3, 3).map(lambda x: (x,)),
        st.integers(-3, 3).map(lambda x: (x,)),
        max_size=2,
    ),
    st.integers(-4, 4).map(lambda x: (x,)),
    st.sampled_from([2, 3, 5]),
)
def test_forged_invariants_hold(items, shift, p):
    gamma = WreathElement(Lamp.of(items), shift)
    assume(not gamma.is_identity())
    assume(prime_admissible(gamma, p, 1))
    datum = forge(gamma, p, HALF, 1, 1)
    datum.validate()
    assert datum.l == len(gamma.lamp.support) + 1
    assert datum.index() == p ** (datum.k + datum.l)
    assert not datum.contains(gamma)
    assert Fraction(datum.l) < HALF * datum.shift_index
