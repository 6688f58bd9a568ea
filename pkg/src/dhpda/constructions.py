"""Reversal, completion, complement and two-ended products with DFAs."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .engine import _successor, enabled_transitions, initial_configuration
from .model import (BOTTOM, NOP, POP, RESERVED, Automaton, AutomatonError, Head, Kind, Mode,
                    ParseError, Signature, Transition, Word, _sections, classify_determinism,
                    make_automaton, push)

SINK = "__sink"
DUMMY = "__D"


class ConstructionError(AutomatonError):
    """A construction was applied outside its preconditions."""


# -- DFAs -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Dfa:
    name: str
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    delta: Mapping[tuple[str, str], str]
    initial: str
    accepting: frozenset[str]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        states = set(self.states)
        if self.initial not in states:
            raise ConstructionError(f"initial state {self.initial!r} is not a state")
        if not self.accepting <= states:
            raise ConstructionError(f"accepting states {sorted(self.accepting - states)} undeclared")
        for q in self.states:
            for s in self.alphabet:
                if self.delta.get((q, s)) not in states:
                    raise ConstructionError(f"transition function is not total at ({q}, {s})")

    def step(self, q: str, symbol: str) -> str:
        return self.delta[(q, symbol)]

    def run(self, w: Iterable[str]) -> str | None:
        """State reached on ``w``; None if ``w`` leaves the alphabet."""
        q = self.initial
        for s in w:
            if (q, s) not in self.delta:
                return None
            q = self.delta[(q, s)]
        return q

    def accepts(self, w: Iterable[str]) -> bool:
        return self.run(w) in self.accepting

    def complement(self) -> "Dfa":
        return replace(self, name=f"{self.name}_c",
                       accepting=frozenset(self.states) - self.accepting, warnings=())

    @classmethod
    def build(cls, name, states, alphabet, delta, initial, accepting) -> "Dfa":
        """Construct a DFA, sending missing transitions to a fresh rejecting sink."""
        states, alphabet, delta = list(states), tuple(alphabet), dict(delta)
        missing = [(q, s) for q in states for s in alphabet if (q, s) not in delta]
        warnings = ()
        if missing:
            sink = _fresh("sink", states)
            states.append(sink)
            for q, s in missing + [(sink, s) for s in alphabet]:
                delta[(q, s)] = sink
            warnings = (f"{len(missing)} missing transitions sent to rejecting sink {sink!r}",)
        return cls(name, tuple(states), alphabet, delta, initial, frozenset(accepting), warnings)

    @classmethod
    def universal(cls, alphabet: Sequence[str], name: str = "all") -> "Dfa":
        return cls.build(name, ["u"], alphabet, {("u", s): "u" for s in alphabet}, "u", ["u"])

    @classmethod
    def empty(cls, alphabet: Sequence[str], name: str = "none") -> "Dfa":
        return cls.build(name, ["e"], alphabet, {("e", s): "e" for s in alphabet}, "e", [])

    @classmethod
    def from_words(cls, words: Iterable[Sequence[str]], alphabet: Sequence[str],
                   name: str = "finite") -> "Dfa":
        """Trie automaton for a finite language."""
        nodes: dict[Word, str] = {(): "n0"}
        delta = {}
        accepting = set()
        for w in words:
            w = tuple(w)
            for i in range(len(w)):
                if w[:i + 1] not in nodes:
                    nodes[w[:i + 1]] = f"n{len(nodes)}"
                delta[(nodes[w[:i]], w[i])] = nodes[w[:i + 1]]
            accepting.add(nodes[w])
        d = cls.build(name, list(nodes.values()), alphabet, delta, "n0", accepting)
        return replace(d, warnings=())


def _fresh(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    name = f"__{base}"
    n = 0
    while name in taken:
        n += 1
        name = f"__{base}{n}"
    return name


def parse_dfa(text: str) -> Dfa:
    name = initial = None
    states: list[str] = []
    alphabet: list[str] = []
    accepting: list[str] = []
    delta: dict[tuple[str, str], str] = {}
    seen: set[str] = set()
    for lineno, toks in _sections(text):
        key, args = toks[0], toks[1:]
        if key == "trans":
            if len(args) != 4 or args[2] != "->":
                raise ParseError("expected: trans <src> <sym> -> <dst>", lineno, " ".join(args))
            src, sym, _, dst = args
            for q in (src, dst):
                if q not in states:
                    raise ParseError("undeclared state", lineno, q)
            if sym not in alphabet:
                raise ParseError("undeclared input symbol", lineno, sym)
            if (src, sym) in delta and delta[(src, sym)] != dst:
                raise ParseError("two targets for one state and symbol", lineno, sym)
            delta[(src, sym)] = dst
            continue
        if key in seen:
            raise ParseError(f"duplicate section {key!r}", lineno, key)
        seen.add(key)
        if key == "name" and len(args) == 1:
            name = args[0]
        elif key == "states":
            states = args
        elif key == "input":
            alphabet = args
        elif key == "initial" and len(args) == 1:
            initial = args[0]
        elif key == "accepting":
            accepting = args
        else:
            raise ParseError("unknown keyword or bad arity", lineno, key)
    if name is None:
        raise ParseError("missing name")
    if initial is None:
        raise ParseError("missing initial")
    for tok in alphabet:
        if tok in RESERVED:
            raise ParseError("reserved token used as a symbol", None, tok)
    if initial not in states:
        raise ParseError("undeclared initial state", None, initial)
    for q in accepting:
        if q not in states:
            raise ParseError("undeclared accepting state", None, q)
    return Dfa.build(name, states, alphabet, delta, initial, accepting)


def serialize_dfa(d: Dfa) -> str:
    lines = [f"name {d.name}", "states " + " ".join(d.states), "input " + " ".join(d.alphabet),
             f"initial {d.initial}", "accepting " + " ".join(q for q in d.states if q in d.accepting)]
    lines += [f"trans {q} {s} -> {d.delta[(q, s)]}" for q in d.states for s in d.alphabet]
    return "\n".join(lines) + "\n"


def load_dfa(path) -> Dfa:
    with open(path, encoding="utf-8") as fh:
        return parse_dfa(fh.read())


def dfa_slice(d: Dfa, n: int) -> set[Word]:
    """Accepted words of length at most ``n``, grown breadth-first from the initial state."""
    out = set()
    layer = {(): d.initial}
    for k in range(n + 1):
        out.update(w for w, q in layer.items() if q in d.accepting)
        if k == n:
            break
        layer = {w + (s,): d.delta[(q, s)] for w, q in layer.items() for s in d.alphabet}
    return out


@dataclass(frozen=True)
class SuffixFunction:
    """Effect of the consumed suffix: state ``s`` maps to where the suffix leads from ``s``."""

    table: tuple[int, ...]

    @classmethod
    def identity(cls, n: int) -> "SuffixFunction":
        return cls(tuple(range(n)))

    def __call__(self, s: int) -> int:
        return self.table[s]

    def prepend(self, step: Sequence[int]) -> "SuffixFunction":
        """Suffix grown by one symbol on its left, whose DFA step is ``step``."""
        return SuffixFunction(tuple(self.table[step[s]] for s in range(len(step))))


# -- automaton constructions ----------------------------------------------------------


def reverse(a: Automaton) -> Automaton:
    """Flip every head; the result accepts the reversed language."""
    mode = a.mode
    if mode.kind == "double":
        mode = Mode.double(mode.right, mode.left)
    ts = [replace(t, head=t.head.flipped()) for t in a.transitions]
    return make_automaton(f"{a.name}_rev", a.states, a.input_alphabet, a.stack_alphabet, mode, ts,
                          a.initial, a.accepting)


def _mandated(a: Automaton, head: Head, symbol: str, dummy: str):
    kind = a.mode.signature(head)[symbol]
    if kind is Kind.PUSH:
        return push(dummy)
    return POP if kind is Kind.POP else NOP


def _gaps(a: Automaton) -> list[tuple[str, str, Head, str]]:
    """(state, top, head, symbol) combinations that block a run under the designated heads."""
    out = []
    for q in a.states:
        for x in a.tops:
            ts = a.index.get((q, x), ())
            heads = [h for h in Head if any(t.head is h for t in ts)] or [Head.LEFT]
            for h in heads:
                have = {t.symbol for t in ts if t.head is h}
                out.extend((q, x, h, s) for s in a.input_alphabet if s not in have)
    return out


def complete(a: Automaton) -> Automaton:
    """Equivalent machine with a full-length run on every word.

    Each missing move under the head already used at a (state, top) pair
    (the left head where none is used) goes to a rejecting sink with the
    action the signature mandates, pushing a fresh dummy symbol.  Machines
    without gaps are returned unchanged.
    """
    if not a.mode.input_driven:
        raise ConstructionError("completion needs a signature; free mode is not supported")
    gaps = _gaps(a)
    if not gaps:
        return a
    if SINK in a.states or DUMMY in a.stack_alphabet:
        raise ConstructionError(f"reserved names {SINK!r}/{DUMMY!r} already in use")
    stack = a.stack_alphabet + (DUMMY,)
    tops = stack + (BOTTOM,)
    extra = [Transition(q, h, s, x, _mandated(a, h, s, DUMMY), SINK) for q, x, h, s in gaps]
    # the dummy top is new, so every state needs moves for it too
    extra += [Transition(q, Head.LEFT, s, DUMMY, _mandated(a, Head.LEFT, s, DUMMY), SINK)
              for q in a.states for s in a.input_alphabet]
    extra += [Transition(SINK, Head.LEFT, s, x, _mandated(a, Head.LEFT, s, DUMMY), SINK)
              for x in tops for s in a.input_alphabet]
    return make_automaton(f"{a.name}_total", a.states + (SINK,), a.input_alphabet, stack, a.mode,
                          list(a.transitions) + extra, a.initial, a.accepting)


def _require_deterministic(a: Automaton, what: str):
    if not a.mode.input_driven:
        raise ConstructionError(f"{what} needs an input-driven machine")
    verdict = classify_determinism(a)
    if not verdict.deterministic:
        c = verdict.conflicts[0]
        raise ConstructionError(
            f"{what} needs a deterministic machine (conflict at {c.state}/{c.top}: "
            f"{c.first} vs {c.second}); nondeterministic input-driven languages are not "
            "closed under complement")


def complement(a: Automaton) -> Automaton:
    _require_deterministic(a, "complement")
    c = complete(a)
    return replace(c, name=f"{a.name}_co", accepting=frozenset(c.states) - c.accepting)


def extend_alphabet(a: Automaton, symbols: Iterable[str]) -> Automaton:
    """Add input symbols (internal for both heads) that no transition reads."""
    new = tuple(s for s in dict.fromkeys(symbols) if s not in a.input_alphabet)
    if not new:
        return a
    mode = a.mode
    if mode.input_driven:
        def grow(sig: Signature) -> Signature:
            return Signature.of({**sig.mapping, **{s: Kind.INTERNAL for s in new}})
        mode = (Mode.single(grow(mode.left)) if mode.kind == "single"
                else Mode.double(grow(mode.left), grow(mode.right)))
    return replace(a, input_alphabet=a.input_alphabet + new, mode=mode)


def _product(a: Automaton, d: Dfa, name: str, union: bool) -> Automaton:
    dq = {q: i for i, q in enumerate(d.states)}
    step = {s: tuple(dq[d.delta[(q, s)]] for q in d.states) for s in d.alphabet}
    fids: dict[SuffixFunction, int] = {}

    def label(q, p, f):
        if f not in fids:
            fids[f] = len(fids)
        return f"{q}/{d.states[p]}/f{fids[f]}"

    start = (a.initial, dq[d.initial], SuffixFunction.identity(len(d.states)))
    names = {start: label(*start)}
    todo = deque([start])
    ts = []
    accepting = []
    final = {dq[q] for q in d.accepting}
    while todo:
        node = todo.popleft()
        q, p, f = node
        here = names[node]
        if (q in a.accepting and f(p) in final) or (union and (q in a.accepting or f(p) in final)):
            accepting.append(here)
        for x in a.tops:
            for t in a.index.get((q, x), ()):
                if t.head is Head.LEFT:
                    nxt = (t.target, step[t.symbol][p], f)
                else:
                    nxt = (t.target, p, f.prepend(step[t.symbol]))
                if nxt not in names:
                    names[nxt] = label(*nxt)
                    todo.append(nxt)
                ts.append(replace(t, source=here, target=names[nxt], tid=""))
    return make_automaton(name, list(names.values()), a.input_alphabet, a.stack_alphabet, a.mode,
                          ts, names[start], accepting)


def _check_alphabet(a: Automaton, d: Dfa):
    missing = [s for s in a.input_alphabet if s not in d.alphabet]
    if missing:
        raise ConstructionError(f"DFA alphabet lacks {missing}")


def intersect_regular(a: Automaton, d: Dfa) -> Automaton:
    """Product tracking the DFA on the consumed prefix and, as a function, the consumed suffix."""
    _check_alphabet(a, d)
    return _product(a, d, f"{a.name}_and_{d.name}", union=False)


def union_regular(a: Automaton, d: Dfa) -> Automaton:
    _check_alphabet(a, d)
    if not a.mode.input_driven:
        raise ConstructionError("union needs completion, which needs a signature")
    c = complete(extend_alphabet(a, d.alphabet))
    return _product(c, d, f"{a.name}_or_{d.name}", union=True)


def full_runs(a: Automaton, w: Sequence[str]) -> int:
    """Number of distinct computations that read all of ``w``."""
    w = tuple(w)
    counts = {initial_configuration(a, w): 1}
    for _ in range(len(w)):
        nxt: dict = {}
        for c, k in counts.items():
            for t in enabled_transitions(a, w, c):
                d = _successor(c, t)
                nxt[d] = nxt.get(d, 0) + k
        counts = nxt
    return sum(counts.values())


__all__ = [
    "ConstructionError", "DUMMY", "Dfa", "SINK", "SuffixFunction", "complement", "complete",
    "dfa_slice", "extend_alphabet", "full_runs", "intersect_regular", "load_dfa", "parse_dfa",
    "reverse", "serialize_dfa", "union_regular",
]
