import random

import networkx as nx
import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from dhpda import corpus
from dhpda.constructions import complement, complete, full_runs, intersect_regular, reverse, \
    union_regular
from dhpda.decision import is_empty, is_finite, reconstruct_word
from dhpda.engine import accepts, find_accepting_trace, moves
from dhpda.model import Head, classify_determinism

from _machines import dfa_mask, random_automaton, random_dfa, reversed_mask, words

SETTINGS = settings(max_examples=60, deadline=None,
                    suppress_health_check=[HealthCheck.too_slow])
seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def machine(seed, deterministic=None, driven=False):
    rng = random.Random(seed)
    while True:
        det = rng.random() < 0.5 if deterministic is None else deterministic
        a = random_automaton(rng, deterministic=det, name=f"h{seed}")
        if not driven or a.mode.input_driven:
            return a


@SETTINGS
@given(st.lists(st.tuples(st.sampled_from(list(Head)), st.sampled_from("abc")), max_size=8))
def test_reconstruct_reads_left_then_reversed_right(ms):
    w = reconstruct_word(ms)
    left = [s for h, s in ms if h is Head.LEFT]
    right = [s for h, s in ms if h is Head.RIGHT]
    assert len(w) == len(ms)
    assert list(w[:len(left)]) == left and list(w[len(left):]) == right[::-1]


@SETTINGS
@given(seeds)
def test_traces_reconstruct_their_word(seed):
    a = machine(seed)
    for w in words(a.input_alphabet, 4):
        tr = find_accepting_trace(a, w)
        if tr is not None:
            assert reconstruct_word(moves(tr)) == w


@SETTINGS
@given(seeds)
def test_reversal(seed):
    a = machine(seed)
    r = reverse(a)
    for k in range(6):
        assert np.array_equal(corpus.slice_mask(r, k),
                              reversed_mask(corpus.slice_mask(a, k), len(a.input_alphabet), k))


@SETTINGS
@given(seeds)
def test_completion_totality(seed):
    a = machine(seed, driven=True)
    c = complete(a)
    det = classify_determinism(a).deterministic
    assert classify_determinism(c).deterministic == det
    for w in words(a.input_alphabet, 4):
        n = full_runs(c, w)
        assert n == 1 if det else n >= 1
        assert accepts(c, w) == accepts(a, w)


@SETTINGS
@given(seeds)
def test_complement_partitions(seed):
    a = machine(seed, deterministic=True, driven=True)
    co = complement(a)
    for k in range(6):
        assert np.array_equal(corpus.slice_mask(co, k), ~corpus.slice_mask(a, k))


@SETTINGS
@given(seeds)
def test_emptiness_witness_is_shortest(seed):
    a = machine(seed)
    o = is_empty(a)
    bound = 6
    members = corpus.generated_slice(a, bound)
    if o.answer:
        assert not members
    else:
        assert accepts(a, o.witness)
        shortest = min((len(w) for w in members), default=None)
        if shortest is not None:
            assert len(o.witness) == shortest
        else:
            assert len(o.witness) > bound


def _useful_cycle(a):
    g = nx.DiGraph((t.source, t.target) for t in a.transitions)
    g.add_node(a.initial)
    live = nx.descendants(g, a.initial) | {a.initial}
    useful = {q for q in live if any(f in g and (f == q or nx.has_path(g, q, f))
                                     for f in a.accepting)}
    sub = g.subgraph(useful)
    return any(len(c) > 1 or sub.has_edge(next(iter(c)), next(iter(c)))
               for c in nx.strongly_connected_components(sub))


@SETTINGS
@given(seeds)
def test_stackless_finiteness_is_a_graph_cycle(seed):
    rng = random.Random(seed)
    while True:
        a = random_automaton(rng, deterministic=rng.random() < 0.5)
        if not a.stack_alphabet:
            break
    assert is_finite(a).answer is not _useful_cycle(a)


@SETTINGS
@given(seeds)
def test_products(seed):
    rng = random.Random(seed)
    a = machine(seed, driven=True)
    d = random_dfa(rng, a.input_alphabet)
    inter, union = intersect_regular(a, d), union_regular(a, d)
    for k in range(6):
        m, dm = corpus.slice_mask(a, k), dfa_mask(d, a.input_alphabet, k)
        assert np.array_equal(corpus.slice_mask(inter, k), m & dm)
        assert np.array_equal(corpus.slice_mask(union, k), m | dm)


@SETTINGS
@given(seeds)
def test_kernel_matches_search(seed):
    a = machine(seed)
    for k in range(5):
        m = corpus.slice_mask(a, k)
        assert list(m) == [accepts(a, corpus._decode(i, k, a.input_alphabet))
                           for i in range(m.size)]
