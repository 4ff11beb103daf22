import pytest
from hypothesis import given, strategies as st

from allostery import Lamp, WreathElement, WreathGroup, format_element, parse_element
from allostery.errors import BudgetExceededError, RankMismatchError, TextParseError


def vecs(rank, lo=-4, hi=4):
    return st.lists(st.integers(lo, hi), min_size=rank, max_size=rank).map(tuple)


def elements(d=1, m=1):
    return st.builds(
        lambda items, shift: WreathElement(Lamp.of(items), shift),
        st.dictionaries(vecs(m), vecs(d), max_size=3),
        vecs(m),
    )


def test_lamp_normalization():
    lamp = Lamp.of({(0,): (1,), (2,): (0,), (1,): (3,)})
    assert lamp.support == ((0,), (1,))
    assert lamp.get((2,)) is None
    assert lamp.get((1,)) == (3,)
    assert len(lamp) == 2


def test_product_example():
    a = WreathElement(Lamp.of({(0,): (1,)}), (1,))
    b = WreathElement(Lamp.of({(0,): (1,)}), (0,))
    ab = a * b
    assert ab.lamp.get((0,)) == (1,)
    assert ab.lamp.get((1,)) == (1,)
    assert ab.shift == (1,)


def test_inverse_example():
    a = WreathElement(Lamp.of({(0,): (1,)}), (1,))
    inv = a.inverse()
    assert inv.lamp.get((-1,)) == (-1,)
    assert inv.shift == (-1,)
    assert (a * inv).is_identity()
    assert (inv * a).is_identity()


def test_identity_element(group11):
    e = group11.identity()
    assert e.is_identity()
    x = group11.parse_element("{(2):(-1)};(3)")
    assert e * x == x
    assert x * e == x


def test_rank_checked_on_multiply():
    a = WreathElement(Lamp.of({(0,): (1,)}), (0,))
    b = WreathElement(Lamp.of({(0, 0): (1,)}), (0, 0))
    with pytest.raises(RankMismatchError):
        a * b


@given(elements(), elements(), elements())
def test_associativity(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(elements())
def test_inverse_laws(x):
    assert (x * x.inverse()).is_identity()
    assert x.inverse().inverse() == x


@given(elements(), elements())
def test_support_containment(a, b):
    allowed = set(a.lamp.support)
    allowed.update(tuple(p + s for p, s in zip(pos, a.shift)) for pos in b.lamp.support)
    assert set((a * b).lamp.support) <= allowed


def test_generators_and_names(group11):
    names = group11.generator_names()
    assert names == ("s1", "S1", "t1", "T1")
    gens = group11.generators()
    assert gens[0].lamp.get((0,)) == (1,)
    assert gens[1] == gens[0].inverse()
    assert gens[2].shift == (1,)
    assert gens[3] == gens[2].inverse()
    for i in range(4):
        assert group11.inverse_generator_index(i) == i ^ 1


def test_generator_layout_d2_m2():
    group = WreathGroup(2, 2)
    names = group.generator_names()
    assert names == ("s1", "S1", "s2", "S2", "t1", "T1", "t2", "T2")
    assert group.lamp_generator(1).lamp.get((0, 0)) == (0, 1)
    assert group.shift_generator(1).shift == (0, 1)


def test_word_evaluates_left_to_right(group11):
    s, _, t, _ = group11.generators()
    word = group11.parse_word("s1.t1")
    assert group11.word_element(word) == s * t
    assert group11.word_name(word) == "s1.t1"
    assert group11.word_name(()) == "e"
    assert group11.word_element(group11.parse_word("e")).is_identity()


def test_ball_radius_zero_and_one(group11):
    ball0 = group11.ball(0)
    assert [entry.element.text() for entry in ball0] == ["{};(0)"]
    ball1 = group11.ball(1)
    assert len(ball1) == 5
    assert ball1[0].element.is_identity()
    texts = [entry.element.text() for entry in ball1[1:]]
    assert texts == sorted(texts)
    assert {t for t in texts} == {"{(0):(-1)};(0)", "{(0):(1)};(0)", "{};(-1)", "{};(1)"}


def test_ball_growth_and_words(group11):
    ball1 = {e.element for e in group11.ball(1)}
    ball2 = group11.ball(2)
    assert len(ball2) == 17
    assert ball1 <= {e.element for e in ball2}
    for entry in ball2:
        assert len(entry.word) <= 2
        assert group11.word_element(entry.word) == entry.element


def test_ball_budget(group11):
    with pytest.raises(BudgetExceededError):
        group11.ball(9)


@given(elements(d=2, m=2))
def test_text_round_trip(x):
    text = format_element(x)
    assert parse_element(text, 2, 2) == x


def test_parse_errors_have_positions():
    with pytest.raises(TextParseError):
        parse_element("{(0):(1)};", 1, 1)
    with pytest.raises(TextParseError):
        parse_element("{(0):(1,2)};(0)", 1, 1)
    with pytest.raises(TextParseError):
        parse_element("nonsense", 1, 1)
    err = None
    try:
        parse_element("{(0):(x)};(0)", 1, 1, line=7)
    except TextParseError as exc:
        err = exc
    assert err is not None and err.line == 7


def test_validate_element(group11):
    with pytest.raises(RankMismatchError):
        group11.validate_element(WreathElement(Lamp.of({(0, 0): (1,)}), (0, 0)))
