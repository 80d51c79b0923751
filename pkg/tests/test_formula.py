import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ilshare.counting import count_total
from ilshare.formula import (MINIMAL, WITH_BOX, WITH_BOX_TOP, Alphabet, ArityError, Binary,
                             FormulaSyntaxError, GuardExceeded, Preset, Primitive, Unary,
                             UnknownSymbolError, check_formula, complexity, count_formulas,
                             enumerate_formulas, enumerate_levels, parse, render)


def formulas(alphabet, max_leaves=12):
    base = st.integers(0, alphabet.s - 1).map(Primitive)

    def extend(children):
        options = [st.builds(Binary, st.integers(0, alphabet.q - 1), children, children)]
        if alphabet.p:
            options.append(st.builds(Unary, st.integers(0, alphabet.p - 1), children))
        return st.one_of(options)

    return st.recursive(base, extend, max_leaves=max_leaves)


IMP, TRI = 0, 1
BOT = Primitive(0)


def test_presets_have_expected_signatures():
    assert MINIMAL.signature == (0, 2, 1)
    assert WITH_BOX.signature == (1, 2, 1)
    assert WITH_BOX_TOP.signature == (1, 2, 2)
    assert Alphabet.preset("box-top") is not WITH_BOX_TOP
    assert Alphabet.preset("box-top") == WITH_BOX_TOP


@pytest.mark.parametrize("bad", [((), (), ("x",)), ((), ("b",), ()), (("a",), ("a",), ("c",)),
                                 ((), ("(",), ("c",))])
def test_alphabet_validation(bad):
    with pytest.raises(ValueError):
        Alphabet(*bad)


def test_from_signature_names():
    a = Alphabet.from_signature(1, 2, 3)
    assert a.signature == (1, 2, 3)
    assert a.primitives == ("c1", "c2", "c3")
    with pytest.raises(ValueError):
        Alphabet.from_signature(0, 0, 1)


def test_parse_examples():
    assert parse("⊥", MINIMAL) == BOT
    assert parse("(⊥→⊥)▷⊥", MINIMAL) == Binary(TRI, Binary(IMP, BOT, BOT), BOT)
    assert parse("□(⊥→⊤)", WITH_BOX_TOP) == Unary(0, Binary(IMP, BOT, Primitive(1)))


def test_parse_ascii_aliases_and_spaces():
    assert parse("(bot -> bot) |> bot", MINIMAL) == parse("((⊥→⊥)▷⊥)", MINIMAL)
    assert parse("box (bot->top)", WITH_BOX_TOP) == parse("□(⊥→⊤)", WITH_BOX_TOP)


def test_binary_connectives_associate_right():
    assert parse("⊥→⊥▷⊥", MINIMAL) == parse("(⊥→(⊥▷⊥))", MINIMAL)


def test_unary_binds_tightest():
    assert parse("□⊥→⊥", WITH_BOX) == Binary(IMP, Unary(0, BOT), BOT)


@pytest.mark.parametrize("text,error", [
    ("", FormulaSyntaxError), ("(⊥→⊥", FormulaSyntaxError), ("⊥⊥", FormulaSyntaxError),
    ("⊥→", FormulaSyntaxError), ("→⊥", ArityError), ("p", UnknownSymbolError),
    ("□⊥", UnknownSymbolError), ("⊤", UnknownSymbolError), ("⊥)", FormulaSyntaxError),
])
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse(text, MINIMAL)


def test_parse_error_reports_position():
    with pytest.raises(UnknownSymbolError) as info:
        parse("(⊥→x)", MINIMAL)
    assert info.value.position == 3


def test_unary_used_as_binary():
    with pytest.raises(ArityError):
        parse("⊥□⊥", WITH_BOX)


def test_complexity_examples():
    assert complexity(BOT) == 0
    assert complexity(parse("⊥→⊥", MINIMAL)) == 1
    assert complexity(parse("(⊥→⊥)▷⊥", MINIMAL)) == 2
    assert complexity(parse("□□⊥", WITH_BOX)) == 2


def test_render_examples():
    assert render(BOT, MINIMAL) == "⊥"
    assert render(Binary(IMP, BOT, BOT), MINIMAL) == "(⊥→⊥)"
    assert render(Unary(0, BOT), WITH_BOX) == "□⊥"


def test_check_formula():
    check_formula(Unary(0, BOT), WITH_BOX)
    with pytest.raises(ValueError):
        check_formula(Unary(0, BOT), MINIMAL)
    with pytest.raises(ValueError):
        check_formula(Primitive(1), MINIMAL)


@pytest.mark.parametrize("alphabet", [MINIMAL, WITH_BOX, WITH_BOX_TOP], ids=lambda a: a.tag.value)
@given(data=st.data())
@settings(max_examples=60)
def test_round_trip_random(alphabet, data):
    f = data.draw(formulas(alphabet))
    text = render(f, alphabet)
    assert parse(text, alphabet) == f
    connectives = sum(text.count(c) for c in alphabet.unary + alphabet.binary)
    assert complexity(f) == connectives


def test_enumerate_examples():
    assert list(enumerate_formulas(MINIMAL, 0)) == [BOT]
    assert [render(f, MINIMAL) for f in enumerate_formulas(MINIMAL, 1)] == ["(⊥→⊥)", "(⊥▷⊥)"]
    assert sum(1 for _ in enumerate_formulas(MINIMAL, 3)) == 40


def test_enumerate_order():
    got = [render(f, WITH_BOX_TOP) for f in enumerate_formulas(WITH_BOX_TOP, 1)]
    assert got[:2] == ["□⊥", "□⊤"]
    assert got[2:6] == ["(⊥→⊥)", "(⊥→⊤)", "(⊤→⊥)", "(⊤→⊤)"]
    assert got[6] == "(⊥▷⊥)"


@pytest.mark.parametrize("alphabet,upto", [(MINIMAL, 6), (WITH_BOX, 6), (WITH_BOX_TOP, 5)],
                         ids=["minimal", "box", "box-top"])
def test_enumeration_invariants(alphabet, upto):
    totals = count_total(alphabet, upto)
    for n in range(upto + 1):
        seen = set()
        for f in enumerate_formulas(alphabet, n):
            assert complexity(f) == n
            text = render(f, alphabet)
            assert parse(text, alphabet) == f
            seen.add(text)
        assert len(seen) == totals[n]


@given(p=st.integers(0, 2), q=st.integers(1, 2), s=st.integers(1, 2), n=st.integers(0, 4))
@settings(max_examples=40, deadline=None)
def test_enumeration_matches_recurrence_any_signature(p, q, s, n):
    alphabet = Alphabet.from_signature(p, q, s)
    items = list(enumerate_formulas(alphabet, n))
    assert len(items) == len(set(items)) == count_total(alphabet, n)[n] == count_formulas(alphabet, n)


def test_enumerate_levels_is_all_levels_in_order():
    got = list(enumerate_levels(WITH_BOX, 3))
    assert [n for n, _ in got] == sorted(n for n, _ in got)
    for n in range(4):
        assert [f for m, f in got if m == n] == list(enumerate_formulas(WITH_BOX, n))


def test_guard_is_checked_before_yielding():
    with pytest.raises(GuardExceeded):
        enumerate_formulas(MINIMAL, 6, limit=1000)
    with pytest.raises(GuardExceeded):
        next(enumerate_levels(MINIMAL, 6, limit=1000))
    assert sum(1 for _ in enumerate_formulas(MINIMAL, 4, limit=None)) == 224


def test_negative_complexity_rejected():
    with pytest.raises(ValueError):
        enumerate_formulas(MINIMAL, -1)


def test_preset_enum_values():
    assert {p.value for p in Preset} == {"minimal", "box", "box-top"}
