import pytest

from treedet.core import (
    Fta,
    Signature,
    Symbol,
    Term,
    Transition,
    accepts,
    bits_to_mask,
    canonical_key,
    enumerate_terms,
    eval_states,
    is_complete,
    is_deterministic,
    iter_bits,
    parse_term,
    validate,
)
from treedet.errors import ContractError, ParseError, ResourceLimitExceeded

from conftest import count_terms, naive_run, random_corpus


def names(fta, states):
    return {fta.states[q] for q in states}


def test_bits_roundtrip():
    assert list(iter_bits(0b10110)) == [1, 2, 4]
    assert bits_to_mask([4, 1, 2]) == 0b10110
    assert list(iter_bits(0)) == []


def test_canonical_key_puts_low_states_first():
    masks = [0b001, 0b010, 0b011, 0b100, 0b111, 0b110]
    ordered = sorted(masks, key=lambda m: canonical_key(m, 3))
    assert ordered == [0b111, 0b011, 0b001, 0b110, 0b010, 0b100]


def test_signature_rules():
    sig = Signature.of("nil:0 cons:2 0:0")
    assert [s.name for s in sig] == ["nil", "cons", "0"]
    assert sig.constants == (Symbol("nil", 0), Symbol("0", 0))
    assert sig.max_arity == 2
    assert "cons" in sig and Symbol("cons", 1) not in sig
    with pytest.raises(ValueError):
        Signature.of("a:0 a:1")
    with pytest.raises(ValueError):
        Signature([("", 0)])
    with pytest.raises(ValueError):
        Signature([("f", -1)])


def test_term_arity_checked():
    f = Symbol("f", 2)
    a = Term(Symbol("a", 0))
    with pytest.raises(ContractError):
        Term(f, (a,))
    assert Term(f, (a, a)).depth == 2
    assert a.depth == 1


def test_parse_term(lists):
    t = parse_term(lists.signature, "cons(cons(nil,nil), nil)")
    assert str(t) == "cons(cons(nil,nil),nil)"
    assert t.depth == 3
    assert parse_term(lists.signature, "nil()") == parse_term(lists.signature, "nil")
    for bad in ["cons(nil)", "foo", "cons(nil,nil", "nil nil", ""]:
        with pytest.raises(ParseError):
            parse_term(lists.signature, bad)


def test_validate_lists_clean(lists):
    assert validate(lists) == []


def test_validate_finals_outside_states(lists):
    bad = Fta(lists.signature, lists.states, frozenset({0, 7}), lists.delta)
    diags = validate(bad)
    assert len(diags) == 1 and diags[0].invariant == "finals subset of states"


def test_validate_arity_mismatch():
    sig = Signature.of("a:0 f:2")
    bad = Fta.build(sig, ["q"], ["q"], [("a", (), "q"), ("f", ("q",), "q")], check=False)
    diags = validate(bad)
    assert len(diags) == 1 and diags[0].invariant == "transition arity matches symbol"


def test_validate_name_clash():
    sig = Signature.of("a:0")
    bad = Fta(sig, ("a",), frozenset(), frozenset())
    assert [d.invariant for d in validate(bad)] == ["states and symbols disjoint"]


def test_build_rejects_unknown_names():
    sig = Signature.of("a:0")
    with pytest.raises(ContractError):
        Fta.build(sig, ["q"], ["q"], [("b", (), "q")])
    with pytest.raises(ContractError):
        Fta.build(sig, ["q"], ["r"], [])


def test_eval_states_examples(lists):
    sig = lists.signature
    assert names(lists, eval_states(lists, parse_term(sig, "nil"))) == {"list", "listlist", "any"}
    assert names(lists, eval_states(lists, parse_term(sig, "0"))) == {"any"}
    single = Fta.build("a:0", ["q"], ["q"], [("a", (), "q")])
    assert names(single, eval_states(single, parse_term(single.signature, "a"))) == {"q"}


def test_eval_states_foreign_symbol(lists):
    with pytest.raises(ContractError):
        eval_states(lists, Term(Symbol("zz", 0)))


def test_accepts_examples(lists):
    sig = lists.signature
    assert accepts(lists, parse_term(sig, "cons(nil,nil)"))
    assert not accepts(lists, parse_term(sig, "0"))
    no_finals = Fta(lists.signature, lists.states, frozenset(), lists.delta)
    assert not any(accepts(no_finals, t) for t in enumerate_terms(sig, 3))


def test_eval_states_matches_naive_runs():
    for fta in random_corpus(60, seed=3):
        for t in enumerate_terms(fta.signature, 3)[:400]:
            assert eval_states(fta, t) == naive_run(fta, t)


def test_is_deterministic_examples(lists):
    assert not is_deterministic(lists)
    assert is_deterministic(Fta(lists.signature, lists.states, frozenset(), frozenset()))
    assert is_deterministic([])


def test_is_complete_examples(numlist):
    only = Fta.build("a:0", ["q"], [], [("a", (), "q")])
    assert is_complete(only)
    assert not is_complete(numlist)
    with pytest.raises(ResourceLimitExceeded):
        is_complete(numlist, bound=3)


def test_enumerate_terms_small():
    sig = Signature.of("a:0")
    assert [str(t) for t in enumerate_terms(sig, 2)] == ["a"]
    sig = Signature.of("a:0 f:1")
    assert [str(t) for t in enumerate_terms(sig, 2)] == ["a", "f(a)"]
    assert enumerate_terms(Signature.of("f:1"), 3) == []
    with pytest.raises(ContractError):
        enumerate_terms(sig, 0)


def test_enumerate_terms_lists_count(lists):
    # Independent recurrence: N(1) = 2 constants, N(2) = 2 + 2^2, N(3) = 2 + 6^2.
    terms = enumerate_terms(lists.signature, 3)
    assert len(terms) == count_terms(lists.signature, 3) == 38
    assert len(set(terms)) == len(terms)
    assert all(t.depth <= 3 for t in terms)


@pytest.mark.parametrize("decl", ["a:0 f:1", "a:0 b:0 g:2", "nil:0 cons:2 0:0", "a:0 f:1 h:3"])
def test_enumerate_terms_nested_and_exhaustive(decl):
    sig = Signature.of(decl)
    for d in range(1, 4):
        small, big = enumerate_terms(sig, d), enumerate_terms(sig, d + 1)
        assert set(small) <= set(big)
        assert set(small) == {t for t in big if t.depth <= d}
        assert len(small) == count_terms(sig, d)
    assert enumerate_terms(sig, 3) == enumerate_terms(sig, 3)


def test_transition_str():
    t = Transition(Symbol("f", 2), ("a", "b"), "c")
    assert str(t) == "f(a,b) -> c"
