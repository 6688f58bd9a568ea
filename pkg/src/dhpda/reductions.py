"""Valid computations of a Turing machine as the intersection of two stackless machines.

A valid computation on input ``x`` is written

    w0 hash w2 hash ... hash w2n dollar w2n+1^R hash ... hash w3^R hash w1^R

so a head entering from the right end reads ``w1``, ``w3``, ... each in
forward order.  The first machine lets the left head read ``w2i`` while the
right head checks that it reads the successor ``w2i+1``; the second skips
``w0`` (checking it is initial), lets the right head read ``w2i-1`` while the
left head checks ``w2i``, and finally reads the accepting ``w2n+1`` with the
right head.

Both run the same streaming successor transducer.  Reading an ID ``t q t'``
left to right it holds back the last symbol of ``t`` (a left move puts the
new state before it), emits at most three tokens once the scanned symbol is
known, and copies the rest.  The checking head consumes the emitted tokens,
so the finite control only needs a queue of length three.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .model import (NOP, BOTTOM, Automaton, AutomatonError, Head, Mode, ParseError, Signature,
                    Transition, Word, _sections, make_automaton)

HASH = "hash"
DOLLAR = "dollar"
MARKERS = (HASH, DOLLAR)


class TuringMachineError(AutomatonError):
    """The machine violates the normal form the reduction relies on."""


@dataclass(frozen=True)
class TuringMachine:
    name: str
    states: tuple[str, ...]
    input_alphabet: tuple[str, ...]
    tape_alphabet: tuple[str, ...]
    blank: str
    rules: Mapping[tuple[str, str], tuple[str, str, str]]
    initial: str
    accepting: frozenset[str]

    def __post_init__(self):
        problems = normal_form_violations(self)
        if problems:
            raise TuringMachineError("; ".join(problems))

    @property
    def printable(self) -> tuple[str, ...]:
        """Tape symbols that can appear in an ID (blanks are never printed)."""
        return tuple(s for s in self.tape_alphabet if s != self.blank)

    @property
    def valc_alphabet(self) -> tuple[str, ...]:
        return self.tape_alphabet + self.states + MARKERS


def normal_form_violations(tm: TuringMachine) -> list[str]:
    out = []
    states, tape = set(tm.states), set(tm.tape_alphabet)
    if tm.initial not in states:
        out.append(f"initial state {tm.initial!r} undeclared")
    if not tm.accepting <= states:
        out.append(f"accepting states {sorted(tm.accepting - states)} undeclared")
    if not set(tm.input_alphabet) <= tape:
        out.append("input alphabet is not part of the tape alphabet")
    if tm.blank not in tape or tm.blank in tm.input_alphabet:
        out.append("blank must be a tape symbol outside the input alphabet")
    if states & tape:
        out.append(f"states and tape symbols overlap: {sorted(states & tape)}")
    for tok in (states | tape) & set(MARKERS):
        out.append(f"{tok!r} is reserved for the computation separators")
    for (q, s), (r, w, d) in tm.rules.items():
        where = f"rule ({q}, {s})"
        if q not in states or r not in states:
            out.append(f"{where}: undeclared state")
        if s not in tape or w not in tape:
            out.append(f"{where}: undeclared tape symbol")
        if w == tm.blank:
            out.append(f"{where} writes the blank")
        if q in tm.accepting:
            out.append(f"{where} leaves accepting state {q!r}")
        if d not in ("L", "R"):
            out.append(f"{where}: direction must be L or R")
    return out


def parse_tm(text: str) -> TuringMachine:
    fields: dict[str, list[str]] = {}
    rules: dict[tuple[str, str], tuple[str, str, str]] = {}
    for lineno, toks in _sections(text):
        key, args = toks[0], toks[1:]
        if key == "rule":
            if len(args) != 6 or args[2] != "->":
                raise ParseError("expected: rule <q> <read> -> <q'> <write> L|R", lineno,
                                 " ".join(args))
            q, s, _, r, w, d = args
            if (q, s) in rules:
                raise ParseError("two rules for one state and symbol", lineno, s)
            rules[(q, s)] = (r, w, d)
        elif key in ("name", "states", "initial", "accepting", "input", "tape", "blank"):
            if key in fields:
                raise ParseError(f"duplicate section {key!r}", lineno, key)
            fields[key] = args
        else:
            raise ParseError("unknown keyword", lineno, key)
    for key in ("name", "initial", "blank"):
        if len(fields.get(key, [])) != 1:
            raise ParseError(f"missing or malformed {key}")
    return TuringMachine(fields["name"][0], tuple(fields.get("states", ())),
                         tuple(fields.get("input", ())), tuple(fields.get("tape", ())),
                         fields["blank"][0], rules, fields["initial"][0],
                         frozenset(fields.get("accepting", ())))


def serialize_tm(tm: TuringMachine) -> str:
    lines = [f"name {tm.name}", "states " + " ".join(tm.states), f"initial {tm.initial}",
             "accepting " + " ".join(q for q in tm.states if q in tm.accepting),
             "input " + " ".join(tm.input_alphabet), "tape " + " ".join(tm.tape_alphabet),
             f"blank {tm.blank}"]
    lines += [f"rule {q} {s} -> {r} {w} {d}" for (q, s), (r, w, d) in tm.rules.items()]
    return "\n".join(lines) + "\n"


def load_tm(path) -> TuringMachine:
    with open(path, encoding="utf-8") as fh:
        return parse_tm(fh.read())


# -- instantaneous descriptions -------------------------------------------------------


def split_id(tm: TuringMachine, w: Sequence[str]) -> tuple[Word, str, Word] | None:
    """(t, q, t') for a well-formed ID, else None."""
    w = tuple(w)
    pos = [i for i, s in enumerate(w) if s in tm.states]
    if len(pos) != 1 or any(s not in tm.printable for i, s in enumerate(w) if i != pos[0]):
        return None
    i = pos[0]
    return w[:i], w[i], w[i + 1:]


def tm_step(tm: TuringMachine, w: Sequence[str]) -> Word | None:
    """Successor ID; None when no rule applies or the head would leave the left end."""
    parts = split_id(tm, w)
    if parts is None:
        raise TuringMachineError(f"malformed ID: {' '.join(w)}")
    t, q, rest = parts
    scanned = rest[0] if rest else tm.blank
    rule = tm.rules.get((q, scanned))
    if rule is None:
        return None
    r, write, d = rule
    rest = (write,) + rest[1:]
    if d == "R":
        return t + (rest[0], r) + rest[1:]
    if not t:
        return None
    return t[:-1] + (r, t[-1]) + rest


def initial_id(tm: TuringMachine, x: Sequence[str]) -> Word:
    return (tm.initial,) + tuple(x)


def is_accepting_id(tm: TuringMachine, w: Sequence[str]) -> bool:
    parts = split_id(tm, w)
    return parts is not None and parts[1] in tm.accepting


def run_tm(tm: TuringMachine, x: Sequence[str], max_steps: int) -> list[Word]:
    """IDs of the run on ``x`` until it halts or ``max_steps`` moves were made."""
    ids = [initial_id(tm, x)]
    for _ in range(max_steps):
        nxt = tm_step(tm, ids[-1])
        if nxt is None:
            break
        ids.append(nxt)
    return ids


def encode_computation(ids: Sequence[Sequence[str]]) -> Word:
    """Lay out an even number of IDs in the two-ended valid-computation format."""
    if len(ids) % 2:
        raise ValueError("a valid computation has an even number of IDs")
    left = [tuple(w) for w in ids[0::2]]
    right = [tuple(reversed(w)) for w in reversed(ids[1::2])]
    out: list[str] = []
    for i, w in enumerate(left):
        out += ([HASH] if i else []) + list(w)
    out.append(DOLLAR)
    for i, w in enumerate(right):
        out += ([HASH] if i else []) + list(w)
    return tuple(out)


def valc_string(tm: TuringMachine, x: Sequence[str], max_steps: int = 10_000) -> Word | None:
    ids = run_tm(tm, x, max_steps)
    if not is_accepting_id(tm, ids[-1]) or len(ids) % 2:
        return None
    return encode_computation(ids)


def valc_strings(tm: TuringMachine, max_length: int) -> Iterator[Word]:
    """Every valid computation of length at most ``max_length``, from runs on all inputs."""
    # two IDs of length |x| + 1 at least, plus the dollar
    for k in range(max(0, (max_length - 3) // 2) + 1):
        for x in _words(tm.input_alphabet, k):
            v = valc_string(tm, x, max_steps=max_length)
            if v is not None and len(v) <= max_length:
                yield v


def _words(alphabet, k):
    if k == 0:
        yield ()
        return
    for w in _words(alphabet, k - 1):
        for s in alphabet:
            yield w + (s,)


def _blocks(part: Sequence[str]) -> list[Word]:
    out, cur = [], []
    for s in part:
        if s == HASH:
            out.append(tuple(cur))
            cur = []
        else:
            cur.append(s)
    out.append(tuple(cur))
    return out


def valc_member(tm: TuringMachine, x: Sequence[str]) -> bool:
    x = tuple(x)
    if x.count(DOLLAR) != 1:
        return False
    i = x.index(DOLLAR)
    evens = _blocks(x[:i])
    odds = [tuple(reversed(b)) for b in reversed(_blocks(x[i + 1:]))]
    if len(evens) != len(odds):
        return False
    ids = [w for pair in zip(evens, odds) for w in pair]
    if any(split_id(tm, w) is None for w in ids):
        return False
    w0 = ids[0]
    if w0[0] != tm.initial or any(s not in tm.input_alphabet for s in w0[1:]):
        return False
    if not is_accepting_id(tm, ids[-1]):
        return False
    return all(tm_step(tm, u) == v for u, v in zip(ids, ids[1:]))


# -- the two checking machines --------------------------------------------------------


class _Transducer:
    """Streaming successor computation; phases are hashable tuples."""

    def __init__(self, tm: TuringMachine):
        self.tm = tm

    start = ("pre", None)

    def _emit(self, q, pending, scanned):
        rule = self.tm.rules.get((q, scanned))
        if rule is None:
            return None
        r, write, d = rule
        if d == "R":
            return ((pending,) if pending else ()) + (write, r)
        if pending is None:
            return None
        return (r, pending, write)

    def feed(self, phase, s):
        """(next phase, emitted tokens) on a non-marker token, or None to reject."""
        tm = self.tm
        if s not in tm.printable and s not in tm.states:
            return None
        kind = phase[0]
        if kind == "pre":
            pending = phase[1]
            if s in tm.states:
                return ("at", s, pending), ()
            return ("pre", s), ((pending,) if pending else ())
        if kind == "at":
            if s in tm.states:
                return None
            out = self._emit(phase[1], phase[2], s)
            return None if out is None else (("post",), out)
        if s in tm.states:
            return None
        return ("post",), (s,)

    def close(self, phase):
        """Tokens still owed when the ID ends, or None to reject."""
        if phase[0] == "pre":
            return None
        if phase[0] == "at":
            return self._emit(phase[1], phase[2], self.tm.blank)
        return ()


def _label(node) -> str:
    def flat(x):
        if isinstance(x, tuple):
            return "[" + ",".join(flat(y) for y in x) + "]"
        return "-" if x is None else str(x)
    return flat(node)[1:-1].replace("[", "(").replace("]", ")")


def _explore(name, tm, start, step, accepting) -> Automaton:
    """Breadth-first materialization of a finite control given by ``step``.

    ``step(node)`` returns (head, {symbol: next node}); nodes without moves
    return (None, {}).
    """
    alphabet = tm.valc_alphabet
    names = {start: _label(start)}
    todo = deque([start])
    ts: list[Transition] = []
    while todo:
        node = todo.popleft()
        head, moves = step(node)
        for s in alphabet:
            if s not in moves:
                continue
            nxt = moves[s]
            if nxt not in names:
                names[nxt] = _label(nxt)
                todo.append(nxt)
            ts.append(Transition(names[node], head, s, BOTTOM, NOP, names[nxt]))
    sig = Signature.from_sets(internal=alphabet)
    acc = [names[n] for n in names if accepting(n)]
    return make_automaton(name, list(names.values()), alphabet, (), Mode.single(sig), ts,
                          names[start], acc)


def _pairing_step(tx: _Transducer, src: Head, node, seps, after_block):
    """Moves of the source/check loop.

    ``node`` is ("pair", phase, queue) while the source head reads an ID and
    ("owe", queue, sep) once it has read the separator ``sep``.
    """
    chk = src.flipped()
    tm = tx.tm
    if node[0] == "pair":
        _, phase, queue = node
        if queue:
            return chk, {queue[0]: ("pair", phase, queue[1:])}
        moves = {}
        for s in tm.printable + tm.states:
            r = tx.feed(phase, s)
            if r is not None:
                moves[s] = ("pair", r[0], r[1])
        for sep in seps:
            owed = tx.close(phase)
            if owed is not None:
                moves[sep] = ("owe", owed, sep)
        return src, moves
    if node[0] == "owe":
        _, queue, sep = node
        if queue:
            return chk, {queue[0]: ("owe", queue[1:], sep)}
        return after_block(sep)
    return None


def build_valc_pair(tm: TuringMachine) -> tuple[Automaton, Automaton]:
    tx = _Transducer(tm)
    again = ("pair", _Transducer.start, ())

    # first machine: left head reads w2i, right head checks w2i+1; the
    # heads meet at the dollar once everything owed has been checked
    def m1_after(sep):
        if sep == HASH:
            return Head.RIGHT, {HASH: again}
        return None, {}

    m1 = _explore(f"{tm.name}_valc_even", tm, again,
                  lambda n: _pairing_step(tx, Head.LEFT, n, MARKERS, m1_after),
                  lambda n: n == ("owe", (), DOLLAR))

    # second machine: skip w0, right head reads w2i-1, left head checks w2i,
    # then the right head reads the accepting w2n+1
    def m2_after(sep):
        return Head.LEFT, {HASH: again, DOLLAR: ("final", False)}

    def m2_step(node):
        kind = node[0]
        if kind == "init":
            if not node[1]:
                return Head.LEFT, {tm.initial: ("init", True)}
            moves = {s: node for s in tm.input_alphabet}
            moves[HASH] = again
            moves[DOLLAR] = ("final", False)
            return Head.LEFT, moves
        if kind == "final":
            seen = node[1]
            moves = {s: node for s in tm.printable}
            if not seen:
                moves.update({q: ("final", True) for q in tm.accepting})
            return Head.RIGHT, moves
        # odd IDs are separated by hash only
        return _pairing_step(tx, Head.RIGHT, node, (HASH,), m2_after)

    m2 = _explore(f"{tm.name}_valc_odd", tm, ("init", False), m2_step,
                  lambda n: n == ("final", True))
    return m1, m2


__all__ = [
    "DOLLAR", "HASH", "TuringMachine", "TuringMachineError", "build_valc_pair",
    "encode_computation", "initial_id", "is_accepting_id", "load_tm", "normal_form_violations",
    "parse_tm", "run_tm", "serialize_tm", "split_id", "tm_step", "valc_member", "valc_string",
    "valc_strings",
]
