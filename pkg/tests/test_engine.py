import pytest

from dhpda import corpus
from dhpda.engine import (Configuration, HaltReason, NondeterminismError, StepError, accepts,
                          apply, enabled_transitions, find_accepting_trace, initial_configuration,
                          law_checking, moves, run_deterministic, trace_law_violations,
                          trace_to_json)
from dhpda.model import Head, parse_automaton

from _machines import words

G_LONG = "a b hash bbar abar hash ahat bhat".split()


@pytest.fixture(scope="module")
def g():
    return corpus.load("gladkij")


def test_enabled_on_hash_hash(g):
    w = ("hash", "hash")
    ts = enabled_transitions(g, w, initial_configuration(g, w))
    assert len(ts) == 1
    t = ts[0]
    assert (t.source, t.head, t.symbol, t.top, t.target) == ("q0", Head.LEFT, "hash", "_", "q1")


def test_nothing_enabled_without_input(g):
    w = ("hash",)
    assert enabled_transitions(g, w, Configuration("q0", 1, 1, ())) == []


def test_ldta_single_symbol_offers_both_heads():
    a = corpus.load("ldta")
    ts = enabled_transitions(a, ("dollar_r",), initial_configuration(a, ("dollar_r",)))
    assert len(ts) == 1 and ts[0].head is Head.LEFT
    ts = enabled_transitions(a, ("dollar_l",), initial_configuration(a, ("dollar_l",)))
    assert len(ts) == 1 and ts[0].head is Head.RIGHT
    # both heads see "a" when it is the sole symbol
    ts = enabled_transitions(a, ("a",), initial_configuration(a, ("a",)))
    assert {t.head for t in ts} == {Head.LEFT, Head.RIGHT}


def test_apply_push(g):
    c0 = initial_configuration(g, G_LONG)
    t = enabled_transitions(g, G_LONG, c0)[0]
    c1 = apply(g, G_LONG, c0, t)
    assert (c1.state, c1.left, c1.right, c1.stack) == ("q0", 1, 8, ("A",))


def test_pop_on_empty_stack_keeps_it_empty():
    a = parse_automaton("""
name p
mode single
input b
stack A
pop b
states s
initial s
accepting s
trans s R b _ -> s
""")
    c = apply(a, ("b",), initial_configuration(a, ("b",)), a.transitions[0])
    assert c == Configuration("s", 0, 0, ())


def test_internal_leaves_stack(g):
    w = ("hash", "hash")
    c = apply(g, w, initial_configuration(g, w), enabled_transitions(g, w, initial_configuration(g, w))[0])
    assert c.stack == () and c.left == 1


def test_apply_rejects_disabled(g):
    w = ("hash", "hash")
    with pytest.raises(StepError):
        apply(g, w, initial_configuration(g, w), g.transitions[0])


def test_run_hash_hash(g):
    r = run_deterministic(g, ("hash", "hash"))
    assert r.accepted and len(r.trace) == 2
    assert [s.transition.target for s in r.trace] == ["q1", "qplus"]


def test_run_long_member(g):
    r = run_deterministic(g, G_LONG)
    assert r.accepted and len(r.trace) == 8
    assert r.halt_reason is HaltReason.ACCEPTING


def test_run_gets_stuck(g):
    r = run_deterministic(g, "a hash abar hash bhat".split())
    assert not r.accepted and r.halt_reason is HaltReason.STUCK
    assert len(r.trace) < 5


def test_run_refuses_nondeterminism():
    with pytest.raises(NondeterminismError):
        run_deterministic(corpus.load("ldta"), ("a",))


@pytest.mark.parametrize("w, expected", [
    ("a b c dollar_l", True), ("dollar_r", True), ("a b c dollar_r", True),
    ("a b dollar_l", False), ("dollar_l dollar_r", False),
])
def test_ldta_membership(w, expected):
    assert accepts(corpus.load("ldta"), w.split()) is expected


@pytest.mark.parametrize("w, expected", [("aabbaa", True), ("aabaa", False), ("aba", True),
                                         ("", False)])
def test_lta_membership(w, expected):
    assert accepts(corpus.load("lta_double"), tuple(w)) is expected


def test_lta_trace_aba():
    a = corpus.load("lta_double")
    trace = find_accepting_trace(a, tuple("aba"))
    assert len(trace) == 3
    assert [(s.transition.source, s.transition.head, s.transition.symbol) for s in trace] == [
        ("q0", Head.LEFT, "a"), ("qa", Head.RIGHT, "a"), ("q1", Head.LEFT, "b")]


def test_no_trace_for_non_member(g):
    assert find_accepting_trace(g, ("a",)) is None


def test_empty_word(g):
    assert find_accepting_trace(g, ()) is None
    a = parse_automaton("name e\nmode single\ninput a\ninternal a\nstates s\ninitial s\naccepting s\n")
    assert find_accepting_trace(a, ()) == ()


@pytest.mark.parametrize("name", [m["name"] for m in corpus.manifest()])
def test_search_and_trace_agree(name):
    a = corpus.load(name)
    n = 6 if len(a.input_alphabet) <= 5 else 4
    mon = None
    with law_checking() as mon:
        for w in words(a.input_alphabet, n):
            tr = find_accepting_trace(a, w)
            assert accepts(a, w) == (tr is not None)
            if tr is not None:
                assert len(tr) == len(w)
                assert trace_law_violations(a, w, tr) == []
    assert not mon.violations


@pytest.mark.parametrize("name", [m["name"] for m in corpus.manifest() if m["deterministic"]])
def test_deterministic_agreement(name):
    a = corpus.load(name)
    n = 6 if len(a.input_alphabet) <= 5 else 4
    for w in words(a.input_alphabet, n):
        r = run_deterministic(a, w)
        assert r.accepted == accepts(a, w)
        assert (len(r.trace) == len(w)) == (r.halt_reason is not HaltReason.STUCK)


def test_trace_json(g):
    r = run_deterministic(g, ("hash", "hash"))
    js = trace_to_json(g, ("hash", "hash"), r.trace)
    assert [x["state"] for x in js] == ["q0", "q1", "qplus"]
    assert js[-1]["accepted"] and js[-1]["halt_reason"] == "InputConsumedAccepting"
    assert all(x["transition_id"] for x in js[:-1])


def test_moves(g):
    tr = find_accepting_trace(g, G_LONG)
    assert moves(tr)[0] == (Head.LEFT, "a")
    assert sum(h is Head.RIGHT for h, _ in moves(tr)) == 2
