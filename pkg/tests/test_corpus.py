import itertools
import json

import numpy as np
import pytest

from dhpda import corpus
from dhpda.engine import accepts
from dhpda.model import classify_determinism, classify_mode, validate

HH = ("hash", "hash")
NAMES = [m["name"] for m in corpus.manifest()]


def test_gladkij_slice_2():
    assert corpus.slice(corpus.load("gladkij"), 2) == {HH}


def test_slice_0_is_lambda_iff_initial_accepting():
    for e in corpus.corpus_list():
        a = e.automaton
        assert corpus.slice(a, 0) == ({()} if a.initial in a.accepting else set())


def test_lta_slice_3():
    assert corpus.slice(corpus.load("lta_double"), 3) == {tuple("aba")}


def test_slice_budget():
    with pytest.raises(corpus.SliceBudgetExceeded, match="budget"):
        corpus.slice(corpus.load("gladkij"), 6, budget=1000)


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv(corpus.BUDGET_ENV, "10")
    with pytest.raises(corpus.SliceBudgetExceeded):
        corpus.slice(corpus.load("gladkij"), 2)


def test_predicate_slices():
    p = corpus.PREDICATES
    assert corpus.slice_lang(p["gladkij"], 2) == {HH}
    assert corpus.slice_lang(p["lta_double"], 6) == {tuple("aba"), tuple("aabbaa")}
    assert corpus.slice_lang(p["ldta"], 1) == {("dollar_l",), ("dollar_r",)}


def test_catalogue_contents():
    assert set(NAMES) >= {"gladkij", "ldta", "lta_double", "thm42_L", "thm42_Lprime",
                          "thm47_complement", "thm411_dollars", "thm413_anb2nan"}


@pytest.mark.parametrize("name", NAMES)
def test_entry_is_valid_and_documented(name):
    e = corpus.entry(name)
    assert validate(e.automaton).ok
    assert classify_determinism(e.automaton).deterministic == e.deterministic
    assert 8 <= e.slice_bound <= 12


@pytest.mark.parametrize("name", NAMES)
def test_machine_matches_predicate(name):
    # the full bounds run in the acceptance suite; a shorter bound keeps this quick
    e = corpus.entry(name)
    n = min(e.slice_bound, 6)
    assert corpus.slice(e.automaton, n, budget=10 ** 8) == corpus.slice_lang(e.predicate, n,
                                                                            budget=10 ** 8)


def test_documented_modes():
    assert classify_mode(corpus.load("gladkij")).kind == "single"
    assert classify_mode(corpus.load("ldta")).kind == "single"
    assert corpus.load("lta_double").mode.kind == "double"


def test_thm47_is_the_complement():
    a = corpus.load("thm47_complement")
    for k in range(7):
        assert np.array_equal(corpus.slice_mask(a, k),
                              ~corpus.predicate_mask(corpus.ABCDE_EQUAL, a.input_alphabet, k))


def test_masks_agree_with_the_engine():
    a = corpus.load("ldta")
    for k in range(5):
        m = corpus.slice_mask(a, k)
        ws = itertools.product(a.input_alphabet, repeat=k)
        assert [accepts(a, w) for w in ws] == list(m)


def test_accepts_many_handles_foreign_symbols():
    a = corpus.load("gladkij")
    got = corpus.accepts_many(a, [HH, ("zz",), (), ("a", "hash", "abar", "hash", "ahat")])
    assert list(got) == [True, False, False, True]


def test_generated_slice_matches_enumeration():
    for name in ("gladkij", "ldta", "lta_double"):
        a = corpus.load(name)
        assert corpus.generated_slice(a, 6) == corpus.slice(a, 6, budget=10 ** 8)


def test_slice_mismatches_reports_words():
    a = corpus.load("gladkij")
    wrong = corpus.LanguagePredicate("none", a.input_alphabet, lambda w: False)
    assert corpus.slice_mismatches(a, wrong, 4) == [HH]
    with pytest.raises(ValueError):
        corpus.slice_mismatches(a, corpus.PREDICATES["ldta"], 2)


def test_export(tmp_path):
    paths = corpus.export(tmp_path)
    assert {p.name for p in paths} >= {f"{n}.dhpda" for n in NAMES}
    rows = json.loads((tmp_path / "manifest.json").read_text())
    assert {r["name"] for r in rows} == set(NAMES)
    assert all({"mode", "deterministic", "slice_bound"} <= set(r) for r in rows)


def test_sort_words_is_alphabet_order():
    assert corpus.sort_words([("b",), ("a", "b"), ("a",)], ("b", "a")) == [
        ("b",), ("a",), ("a", "b")]
