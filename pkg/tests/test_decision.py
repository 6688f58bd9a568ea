import dataclasses

import pytest

from dhpda import corpus
from dhpda.constructions import ConstructionError, Dfa
from dhpda.decision import (Move, equals_regular, is_empty, is_finite, reconstruct_word,
                            regular_subset_of, shortest_move_string, subset_of_regular,
                            to_move_grammar)
from dhpda.engine import accepts, find_accepting_trace, moves
from dhpda.model import Head, parse_automaton

from _machines import crafted, even_a_dfa, gladkij_dfas, words

L, R = Head.LEFT, Head.RIGHT
HH = ("hash", "hash")


@pytest.fixture(scope="module")
def g():
    return corpus.load("gladkij")


def test_no_accepting_states_means_no_grammar(g):
    gr = to_move_grammar(dataclasses.replace(g, accepting=frozenset()))
    assert gr.empty and not gr.productions


def test_gladkij_shortest_moves(g):
    assert shortest_move_string(g) == (Move(L, "hash"), Move(L, "hash"))


def test_lta_shortest_moves():
    m = shortest_move_string(corpus.load("lta_double"))
    assert len(m) == 3 and reconstruct_word(m) == tuple("aba")


def test_reconstruct():
    assert reconstruct_word([(L, "a"), (R, "c"), (L, "b")]) == ("a", "b", "c")
    assert reconstruct_word([]) == ()


def test_reconstruct_round_trips_traces(g):
    w = tuple("a b hash bbar abar hash ahat bhat".split())
    assert reconstruct_word(moves(find_accepting_trace(g, w))) == w


@pytest.mark.parametrize("name", [m["name"] for m in corpus.manifest()])
def test_round_trip_over_corpus_slices(name):
    a = corpus.load(name)
    for w in corpus.slice(a, 5, budget=10 ** 9):
        assert reconstruct_word(moves(find_accepting_trace(a, w))) == w


def test_is_empty_gladkij(g):
    o = is_empty(g)
    assert not o.answer and o.witness == HH


def test_is_empty_without_accepting(g):
    assert is_empty(dataclasses.replace(g, accepting=frozenset())).answer


def test_unmatched_pop_is_empty():
    a, _, _ = crafted("empty_unmatchable")
    assert is_empty(a).answer


def test_lambda_only_is_finite():
    a, _, _ = crafted("lambda_only")
    assert is_finite(a).answer
    assert is_empty(a).witness == ()


@pytest.mark.parametrize("name", ["gladkij", "ldta"])
def test_corpus_infinite(name):
    assert not is_finite(corpus.load(name)).answer


@pytest.mark.parametrize("name, finite", [("two_words", True), ("finite_dead_loop", True),
                                          ("even_a", False), ("empty_unreachable", True)])
def test_crafted_finiteness(name, finite):
    a, _, _ = crafted(name)
    assert is_finite(a).answer is finite


def test_residual_stack_is_allowed():
    # accepts a^n for n >= 1, leaving every push on the stack
    a = parse_automaton("""
name pushes
mode single
input a
stack A
push a
states s t
initial s
accepting t
trans s L a * -> t push A
trans t L a * -> t push A
""")
    o = is_empty(a)
    assert o.witness == ("a",)
    assert not is_finite(a).answer


@pytest.mark.parametrize("name", [m["name"] for m in corpus.manifest()])
def test_witness_is_accepted_and_shortest(name):
    a = corpus.load(name)
    o = is_empty(a)
    assert not o.answer and accepts(a, o.witness)
    shorter = [w for w in words(a.input_alphabet, len(o.witness) - 1) if accepts(a, w)]
    assert not shorter


# -- regular comparisons ----------------------------------------------------------------

def test_subset_of_universal(g):
    assert subset_of_regular(g, Dfa.universal(g.input_alphabet)).answer


def test_subset_of_two_hash(g):
    assert subset_of_regular(g, gladkij_dfas()["two_hash"]).answer


def test_subset_of_a_initial_fails(g):
    o = subset_of_regular(g, gladkij_dfas()["a_init"])
    assert not o.answer and o.witness == HH


def test_subset_allows_nondeterminism():
    a = corpus.load("ldta")
    assert subset_of_regular(a, Dfa.universal(a.input_alphabet)).answer


def test_regular_subset(g):
    al = g.input_alphabet
    assert regular_subset_of(Dfa.from_words([HH], al), g).answer
    o = regular_subset_of(Dfa.from_words([("a",)], al), g)
    assert not o.answer and o.witness == ("a",)
    assert regular_subset_of(Dfa.empty(al), g).answer


def test_regular_subset_rejects_nondeterminism():
    a = corpus.load("ldta")
    with pytest.raises(ConstructionError):
        regular_subset_of(Dfa.universal(a.input_alphabet), a)
    with pytest.raises(ConstructionError):
        equals_regular(a, Dfa.universal(a.input_alphabet))


def test_equals_even_a():
    a, _, _ = crafted("even_a")
    assert equals_regular(a, even_a_dfa()).answer


def test_equals_fails_against_shape(g):
    d = gladkij_dfas()["a_shape"]
    o = equals_regular(g, d)
    assert not o.answer and accepts(g, o.witness) != d.accepts(o.witness)


def test_equals_fails_against_finite_slice(g):
    d = Dfa.from_words(corpus.slice(g, 5, budget=10 ** 9), g.input_alphabet)
    o = equals_regular(g, d)
    assert not o.answer
    assert accepts(g, o.witness) and not d.accepts(o.witness)


def test_alphabet_mismatch(g):
    with pytest.raises(ConstructionError):
        subset_of_regular(g, Dfa.universal(("a",)))


def test_outcome_json(g):
    assert is_empty(g).to_json() == {"answer": False, "witness": list(HH),
                                     "note": "shortest accepted word"}
