"""Witness automata, ground-truth language predicates and slice oracles."""
from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .. import _kernels
from ..engine import accepts
from ..model import Automaton, Word, classify_determinism, parse_automaton, serialize_automaton

DEFAULT_SLICE_BUDGET = 2_000_000
BUDGET_ENV = "DHPDA_SLICE_BUDGET"
_CHUNK = 1 << 18


class SliceBudgetExceeded(ValueError):
    pass


def slice_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_SLICE_BUDGET


def _check_budget(nsym: int, n: int, budget: int | None):
    budget = slice_budget() if budget is None else budget
    total = sum(nsym ** k for k in range(n + 1))
    if total > budget:
        raise SliceBudgetExceeded(
            f"{total} words of length <= {n} over {nsym} symbols exceed the budget of {budget} "
            f"(raise it with {BUDGET_ENV} or budget=)")


def sort_words(words: Iterable[Word], alphabet: Sequence[str]) -> list[Word]:
    rank = {s: i for i, s in enumerate(alphabet)}
    return sorted(words, key=lambda w: (len(w), [rank[s] for s in w]))


def all_words(alphabet: Sequence[str], n: int) -> Iterator[Word]:
    for k in range(n + 1):
        yield from itertools.product(alphabet, repeat=k)


# -- slices ---------------------------------------------------------------------------


def slice(a: Automaton, n: int, *, budget: int | None = None) -> set[Word]:
    """All accepted words of length at most ``n``, by exhaustive enumeration."""
    alphabet = a.input_alphabet
    _check_budget(len(alphabet), n, budget)
    tables = _kernels.compile_tables(a)
    if n > tables.max_exact_length() or not alphabet:
        return {w for w in all_words(alphabet, n) if accepts(a, w)}
    out: set[Word] = set()
    args = _kernels.table_args(tables)
    for k in range(n + 1):
        total = len(alphabet) ** k
        for start in range(0, total, _CHUNK):
            stop = min(total, start + _CHUNK)
            hits = _kernels.accepts_range(k, start, stop, *args, 12)
            for i in np.flatnonzero(hits):
                out.add(_decode(start + int(i), k, alphabet))
    return out


def _decode(index: int, k: int, alphabet: Sequence[str]) -> Word:
    digits = []
    for _ in range(k):
        index, d = divmod(index, len(alphabet))
        digits.append(alphabet[d])
    return tuple(reversed(digits))


def slice_mask(a: Automaton, k: int) -> np.ndarray:
    """Membership of every word of length ``k``, indexed in lexicographic order."""
    alphabet = a.input_alphabet
    tables = _kernels.compile_tables(a)
    total = len(alphabet) ** k
    if k > tables.max_exact_length() or not alphabet:
        return np.fromiter((accepts(a, w) for w in itertools.product(alphabet, repeat=k)),
                           dtype=bool, count=total)
    out = np.zeros(total, dtype=bool)
    args = _kernels.table_args(tables)
    for start in range(0, total, _CHUNK):
        stop = min(total, start + _CHUNK)
        out[start:stop] = _kernels.accepts_range(k, start, stop, *args, 12)
    return out


def predicate_mask(p: "LanguagePredicate", alphabet: Sequence[str], k: int) -> np.ndarray:
    return np.fromiter((p.member(w) for w in itertools.product(alphabet, repeat=k)),
                       dtype=bool, count=len(alphabet) ** k)


def slice_mismatches(a: Automaton, p: "LanguagePredicate", n: int, *, budget: int | None = None,
                     limit: int = 10) -> list[Word]:
    """Words of length at most ``n`` on which machine and predicate disagree.

    Equivalent to comparing ``slice`` with ``slice_lang`` but works on
    membership vectors, so dense languages need no set of all members.
    """
    alphabet = a.input_alphabet
    if set(alphabet) != set(p.alphabet):
        raise ValueError(f"alphabets differ: {alphabet} vs {p.alphabet}")
    _check_budget(len(alphabet), n, budget)
    bad: list[Word] = []
    for k in range(n + 1):
        diff = np.flatnonzero(slice_mask(a, k) != predicate_mask(p, alphabet, k))
        bad.extend(_decode(int(i), k, alphabet) for i in diff[:limit - len(bad)])
        if len(bad) >= limit:
            break
    return bad


def accepts_many(a: Automaton, words: Sequence[Sequence[str]]) -> np.ndarray:
    """Membership for a batch of words through the compiled kernel."""
    tables = _kernels.compile_tables(a)
    rank = {s: i for i, s in enumerate(a.input_alphabet)}
    width = max((len(w) for w in words), default=0)
    if width > tables.max_exact_length():
        return np.array([accepts(a, w) for w in words], dtype=bool)
    enc = np.zeros((len(words), max(width, 1)), dtype=np.int64)
    lengths = np.zeros(len(words), dtype=np.int64)
    valid = np.ones(len(words), dtype=bool)
    for i, w in enumerate(words):
        lengths[i] = len(w)
        for j, s in enumerate(w):
            if s not in rank:
                valid[i] = False
                break
            enc[i, j] = rank[s]
    out = _kernels.accepts_words(enc, lengths, *_kernels.table_args(tables), 12)
    return out & valid


def generated_slice(a: Automaton, n: int) -> set[Word]:
    """Accepted words of length at most ``n`` by guessing input along computations.

    Explores every computation of at most ``n`` steps while choosing the
    symbol under the moving head; a computation ending in an accepting state
    after ``k`` steps has fully read exactly one word of length ``k``.  This
    visits only live computations, so it reaches bounds where enumerating
    all words is out of the question.
    """
    out: set[Word] = set()
    seen = set()
    todo = [(a.initial, (), (), ())]
    while todo:
        node = todo.pop()
        state, stack, left, right = node
        if state in a.accepting:
            out.add(left + tuple(reversed(right)))
        if len(left) + len(right) == n:
            continue
        top = stack[0] if stack else "_"
        for t in a.index.get((state, top), ()):
            kind = t.action.kind.value
            nstack = ((t.action.symbol,) + stack if kind == "push"
                      else stack[1:] if kind == "pop" else stack)
            if t.head.value == "L":
                nxt = (t.target, nstack, left + (t.symbol,), right)
            else:
                nxt = (t.target, nstack, left, right + (t.symbol,))
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return out


# -- language predicates --------------------------------------------------------------


@dataclass(frozen=True)
class LanguagePredicate:
    name: str
    alphabet: tuple[str, ...]
    member: Callable[[Word], bool]

    def __call__(self, w: Sequence[str]) -> bool:
        return self.member(tuple(w))


def slice_lang(p: LanguagePredicate, n: int, *, budget: int | None = None) -> set[Word]:
    _check_budget(len(p.alphabet), n, budget)
    return {w for w in all_words(p.alphabet, n) if p.member(w)}


def runs(w: Sequence[str]) -> list[tuple[str, int]]:
    return [(s, len(list(g))) for s, g in itertools.groupby(w)]


def _blocks(w: Word, letters: Sequence[str]) -> list[int] | None:
    """Block lengths if ``w`` is letters[0]^+ letters[1]^+ ..., else None."""
    counts = []
    i, n = 0, len(w)
    for s in letters:
        j = i
        while j < n and w[j] == s:
            j += 1
        if j == i:
            return None
        counts.append(j - i)
        i = j
    return counts if i == n else None


H1 = {"a": "abar", "b": "bbar"}
H2 = {"a": "ahat", "b": "bhat"}


def _gladkij(w: Word) -> bool:
    if w.count("hash") != 2:
        return False
    i = w.index("hash")
    j = w.index("hash", i + 1)
    u, v, x = w[:i], w[i + 1:j], w[j + 1:]
    if any(s not in H1 for s in u):
        return False
    return v == tuple(H1[s] for s in reversed(u)) and x == tuple(H2[s] for s in u)


def _ldta(w: Word) -> bool:
    def abc_equal(part):
        r = runs(part)
        return (not r) or ([s for s, _ in r] == ["a", "b", "c"] and r[0][1] == r[1][1] == r[2][1])

    def abc_any(part):
        order = {"a": 0, "b": 1, "c": 2}
        return all(s in order for s in part) and all(
            order[x] <= order[y] for x, y in zip(part, part[1:]))

    for marker, (pre_ok, suf_ok) in (("dollar_r", (abc_any, abc_equal)),
                                     ("dollar_l", (abc_equal, abc_any))):
        if w.count(marker) == 1 and w.count("dollar_r") + w.count("dollar_l") == 1:
            i = w.index(marker)
            if pre_ok(w[:i]) and suf_ok(tuple(reversed(w[i + 1:]))):
                return True
    return False


def _lta(w: Word) -> bool:
    b = _blocks(w, "aba")
    return b is not None and b[0] == b[1] == b[2]


def _thm42_L(w: Word) -> bool:
    b = _blocks(w, "abcde")
    return b is not None and b[0] == b[1] == b[2]


def _thm42_Lprime(w: Word) -> bool:
    b = _blocks(w, "abcde")
    return b is not None and b[2] == b[3] == b[4]


def _abcde_equal(w: Word) -> bool:
    b = _blocks(w, "abcde")
    return b is not None and len(set(b)) == 1


def _dollars(w: Word) -> bool:
    if w.count("dollar") != 2:
        return False
    i = w.index("dollar")
    j = w.index("dollar", i + 1)
    n = len(w[:i])
    return (n >= 1 and w[:i] == ("a",) * n and w[i + 1:j] == ("b",) * n
            and w[j + 1:] == ("c",) * n)


def _anb2nan(w: Word) -> bool:
    b = _blocks(w, "aba")
    return b is not None and b[0] == b[2] and b[1] == 2 * b[0]


PREDICATES = {
    "gladkij": LanguagePredicate("gladkij", ("a", "b", "abar", "bbar", "hash", "ahat", "bhat"),
                                 _gladkij),
    "ldta": LanguagePredicate("ldta", ("a", "b", "c", "dollar_l", "dollar_r"), _ldta),
    "lta_double": LanguagePredicate("lta_double", ("a", "b"), _lta),
    "thm42_L": LanguagePredicate("thm42_L", tuple("abcde"), _thm42_L),
    "thm42_Lprime": LanguagePredicate("thm42_Lprime", tuple("abcde"), _thm42_Lprime),
    "thm47_complement": LanguagePredicate("thm47_complement", tuple("abcde"),
                                          lambda w: not _abcde_equal(w)),
    "thm411_dollars": LanguagePredicate("thm411_dollars", ("a", "b", "c", "dollar"), _dollars),
    "thm413_anb2nan": LanguagePredicate("thm413_anb2nan", ("a", "b"), _anb2nan),
}

# languages that no double-head pushdown automaton accepts: predicates only
ABCDE_EQUAL = LanguagePredicate("abcde_equal", tuple("abcde"), _abcde_equal)


# -- catalogue ------------------------------------------------------------------------


@dataclass(frozen=True)
class Entry:
    name: str
    automaton: Automaton
    predicate: LanguagePredicate
    deterministic: bool
    slice_bound: int
    description: str


_MANIFEST = "manifest.json"


def _data():
    return resources.files(__name__).joinpath("data")


def load_text(filename: str) -> str:
    return _data().joinpath(filename).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def manifest() -> list[dict]:
    return json.loads(load_text(_MANIFEST))


@lru_cache(maxsize=None)
def load(name: str) -> Automaton:
    return parse_automaton(load_text(f"{name}.dhpda"))


def corpus_list() -> list[Entry]:
    return [Entry(m["name"], load(m["name"]), PREDICATES[m["name"]], m["deterministic"],
                  m["slice_bound"], m["description"]) for m in manifest()]


def entry(name: str) -> Entry:
    for e in corpus_list():
        if e.name == name:
            return e
    raise KeyError(name)


def export(directory: str | os.PathLike) -> list[Path]:
    """Write every catalogue machine and the manifest to ``directory``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for m in manifest():
        p = out / f"{m['name']}.dhpda"
        p.write_text(load_text(f"{m['name']}.dhpda"), encoding="utf-8")
        written.append(p)
    p = out / _MANIFEST
    p.write_text(load_text(_MANIFEST), encoding="utf-8")
    written.append(p)
    return written


def manifest_row(a: Automaton, bound: int, description: str) -> dict:
    return {"name": a.name, "mode": a.mode.kind,
            "deterministic": classify_determinism(a).deterministic,
            "slice_bound": bound, "description": description}


__all__ = [
    "ABCDE_EQUAL", "DEFAULT_SLICE_BUDGET", "Entry", "LanguagePredicate", "PREDICATES",
    "SliceBudgetExceeded", "accepts_many", "all_words", "corpus_list", "entry", "export",
    "generated_slice", "load", "manifest", "predicate_mask", "serialize_automaton", "slice",
    "slice_lang", "slice_mask", "slice_mismatches", "sort_words",
]
