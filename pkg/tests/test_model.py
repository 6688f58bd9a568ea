import pytest

from dhpda import corpus
from dhpda.constructions import complement, complete
from dhpda.model import (BOTTOM, Head, Kind, Mode, ParseError, Signature, SignatureConflict, ValidationError,
                         classify_determinism, classify_mode, make_automaton, parse_automaton,
                         serialize_automaton, validate, with_mode)

GLADKIJ = corpus.load_text("gladkij.dhpda")


def test_parse_gladkij_expands_wildcards():
    g = parse_automaton(GLADKIJ)
    assert len(g.states) == 5
    assert g.stack_alphabet == ("A", "B")
    # 5 wildcard rules over {A, B, bottom} plus 3 fixed-top rules
    assert len(g.transitions) == 5 * 3 + 3
    assert {t.top for t in g.transitions if t.source == "q0"} == {"A", "B", BOTTOM}


def test_empty_text_is_missing_name():
    with pytest.raises(ParseError, match="missing name"):
        parse_automaton("")


def test_action_contradicting_signature_is_rejected():
    text = GLADKIJ.replace("trans q0 L a * -> q0 push A", "trans q0 L a * -> q0 pop")
    with pytest.raises(ValidationError):
        parse_automaton(text)
    a = parse_automaton(text, strict=False)
    assert any(code == "signature-mismatch" for code, _, _ in validate(a).errors)


@pytest.mark.parametrize("text, fragment", [
    ("name x\nmode single\nbogus a\n", "bogus"),
    ("name x\nmode free\ninput a\nstates s\ninitial s\ntrans s L a _ -> s\n", "action"),
    ("name x\nmode single\ninput a\ninternal a\nstates s\ninitial s\ntrans s L b _ -> s\n", "b"),
    ("name x\nname y\n", "name"),
])
def test_parse_errors_name_the_problem(text, fragment):
    with pytest.raises((ParseError, ValidationError)) as info:
        parse_automaton(text)
    assert fragment in str(info.value)


def test_gladkij_is_valid_and_deterministic():
    g = corpus.load("gladkij")
    assert validate(g).ok
    assert classify_determinism(g).deterministic


def test_accepting_state_outside_states_is_reported():
    g = corpus.load("gladkij")
    bad = make_automaton(g.name, g.states, g.input_alphabet, g.stack_alphabet, g.mode,
                         g.transitions, g.initial, list(g.accepting) + ["ghost"])
    assert [c for c, _, _ in validate(bad).errors] == ["accepting-not-state"]


def test_lta_double_retagged_right_a_is_a_mismatch():
    a = corpus.load("lta_double")
    right = Signature.of({**a.mode.right.mapping, "a": Kind.PUSH})
    a = with_mode(a, Mode.double(a.mode.left, right))
    assert any(code == "signature-mismatch" for code, _, _ in validate(a).errors)


def test_ldta_conflict_at_s0():
    v = classify_determinism(corpus.load("ldta"))
    assert not v.deterministic
    at_s0 = [c for c in v.conflicts if c.state == "s0"]
    assert at_s0 and {at_s0[0].first.head, at_s0[0].second.head} == {Head.LEFT, Head.RIGHT}


def test_lta_double_is_deterministic():
    assert classify_determinism(corpus.load("lta_double")).deterministic


def test_free_gladkij_infers_its_single_signature():
    free = with_mode(corpus.load("gladkij"), Mode.free())
    mode = classify_mode(free)
    assert mode.kind == "single"
    assert set(mode.left.members(Kind.PUSH)) == {"a", "b"}
    assert set(mode.left.members(Kind.POP)) == {"abar", "bbar"}
    assert set(mode.left.members(Kind.INTERNAL)) == {"hash", "ahat", "bhat"}
    assert validate(with_mode(free, mode)).ok


def test_push_and_pop_on_one_head_has_no_signature():
    a = parse_automaton("""
name clash
mode free
input a
stack A
states s t
initial s
trans s L a _ -> t push A
trans t L a A -> s pop
""")
    with pytest.raises(SignatureConflict) as info:
        classify_mode(a)
    assert {t.action.kind for t in info.value.witness} == {Kind.PUSH, Kind.POP}


def test_lta_double_needs_two_signatures():
    mode = classify_mode(corpus.load("lta_double"))
    assert mode.kind == "double"
    assert mode.left["a"] is Kind.PUSH and mode.right["a"] is Kind.INTERNAL


@pytest.mark.parametrize("name", [m["name"] for m in corpus.manifest()])
def test_round_trip(name):
    a = corpus.load(name)
    assert parse_automaton(serialize_automaton(a)).same_structure(a)


def test_round_trip_of_constructed_machine():
    a = complement(complete(corpus.load("gladkij")))
    assert parse_automaton(serialize_automaton(a)).same_structure(a)


def test_machine_without_transitions_serializes():
    a = parse_automaton("name z\nmode single\ninput a\ninternal a\nstates s\ninitial s\n")
    text = serialize_automaton(a)
    assert "trans" not in text
    assert parse_automaton(text).same_structure(a)
