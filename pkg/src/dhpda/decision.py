"""Emptiness and finiteness through a grammar of head moves, and regular comparisons.

Forgetting the input word, a computation is a sequence of moves ``(head,
symbol)`` driven by an ordinary pushdown store, and the accepted word is
recovered from the moves: left-head symbols in order followed by the
right-head symbols in reverse.  Since every move consumes one symbol, the
word and the move string have equal length, so emptiness and finiteness of
the machine reduce to the same questions for the context-free language of
accepting move strings.

Nonterminals of the move grammar:

* ``("N", p, X, q)``: from state ``p`` with ``X`` on top back to the same
  stack level in state ``q`` without popping ``X`` (``X`` may be the empty
  marker, on which a pop changes nothing);
* ``("P", r, Y, u)``: from ``r`` with ``Y`` on top to state ``u`` right
  after popping that ``Y``;
* ``("U", p, X)``: from ``p`` with ``X`` on top to an accepting state
  without popping ``X``; pushes left open are the residual stack;
* ``("S",)``: the start symbol, deriving ``U[q0, empty]``.
"""
from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import networkx as nx

from .constructions import (ConstructionError, Dfa, _require_deterministic, complement,
                            extend_alphabet, intersect_regular)
from .model import BOTTOM, Automaton, Head, Kind, Word

START = ("S",)


class Move(NamedTuple):
    head: Head
    symbol: str

    def __str__(self) -> str:
        return f"{self.head.value}:{self.symbol}"


Nonterminal = tuple
Production = tuple  # (head nonterminal, body tuple of Nonterminal | Move)


@dataclass(frozen=True)
class MoveGrammar:
    """Trimmed move grammar: every nonterminal is productive and reachable from the start."""

    start: Nonterminal
    nonterminals: frozenset
    productions: tuple[Production, ...]
    terminals: tuple[Move, ...]

    @property
    def empty(self) -> bool:
        return self.start not in self.nonterminals

    def by_head(self) -> dict[Nonterminal, list[tuple]]:
        out = defaultdict(list)
        for head, body in self.productions:
            out[head].append(body)
        return out


def _move_order(a: Automaton):
    rank = {s: i for i, s in enumerate(a.input_alphabet)}
    return lambda m: (m.head is Head.RIGHT, rank[m.symbol])


def _saturate(a: Automaton):
    """Demand-driven summaries: which N and P facts hold for the contexts a run can reach."""
    reach: dict[tuple, set] = defaultdict(set)
    pops: dict[tuple, set] = defaultdict(set)
    callers: dict[tuple, set] = defaultdict(set)
    work: list[tuple] = []

    def add(p, x, q):
        if q not in reach[(p, x)]:
            reach[(p, x)].add(q)
            work.append((p, x, q))

    def demand(r, y):
        if (r, y) not in reach:
            add(r, y, r)

    demand(a.initial, BOTTOM)
    while work:
        p, x, q = work.pop()
        for t in a.index.get((q, x), ()):
            kind = t.action.kind
            if kind is Kind.INTERNAL or (kind is Kind.POP and x == BOTTOM):
                add(p, x, t.target)
            elif kind is Kind.POP:
                if t.target not in pops[(p, x)]:
                    pops[(p, x)].add(t.target)
                    for cp, cx in list(callers[(p, x)]):
                        add(cp, cx, t.target)
            else:
                ctx = (t.target, t.action.symbol)
                demand(*ctx)
                callers[ctx].add((p, x))
                for u in list(pops[ctx]):
                    add(p, x, u)
    return reach, pops


def to_move_grammar(a: Automaton) -> MoveGrammar:
    reach, pops = _saturate(a)
    prods: list[Production] = []
    for (p, x), qs in reach.items():
        prods.append((("N", p, x, p), ()))
        for q in qs:
            for t in a.index.get((q, x), ()):
                m = Move(t.head, t.symbol)
                kind = t.action.kind
                if kind is Kind.INTERNAL or (kind is Kind.POP and x == BOTTOM):
                    prods.append((("N", p, x, t.target), (("N", p, x, q), m)))
                elif kind is Kind.POP:
                    prods.append((("P", p, x, t.target), (("N", p, x, q), m)))
                else:
                    y = t.action.symbol
                    for u in pops.get((t.target, y), ()):
                        prods.append((("N", p, x, u), (("N", p, x, q), m, ("P", t.target, y, u))))

    # U facts by fixpoint; a push edge into U needs the pushed context's U fact
    useful: set = set()
    changed = True
    while changed:
        changed = False
        for (p, x), qs in reach.items():
            if ("U", p, x) in useful:
                continue
            ok = any(q in a.accepting for q in qs) or any(
                t.action.kind is Kind.PUSH and ("U", t.target, t.action.symbol) in useful
                for q in qs for t in a.index.get((q, x), ()))
            if ok:
                useful.add(("U", p, x))
                changed = True
    for (p, x), qs in reach.items():
        if ("U", p, x) not in useful:
            continue
        for q in qs:
            if q in a.accepting:
                prods.append((("U", p, x), (("N", p, x, q),)))
            for t in a.index.get((q, x), ()):
                if t.action.kind is Kind.PUSH and ("U", t.target, t.action.symbol) in useful:
                    prods.append((("U", p, x), (("N", p, x, q), Move(t.head, t.symbol),
                                                ("U", t.target, t.action.symbol))))
    if ("U", a.initial, BOTTOM) in useful:
        prods.append((START, (("U", a.initial, BOTTOM),)))

    # keep what the start symbol reaches
    by_head = defaultdict(list)
    for h, body in prods:
        by_head[h].append(body)
    keep = set()
    todo = [START] if START in by_head else []
    while todo:
        n = todo.pop()
        if n in keep:
            continue
        keep.add(n)
        todo.extend(s for body in by_head[n] for s in body
                    if not isinstance(s, Move) and s not in keep)
    kept = tuple(dict.fromkeys((h, b) for h, b in prods if h in keep))
    order = _move_order(a)
    terminals = tuple(sorted({s for _, b in kept for s in b if isinstance(s, Move)}, key=order))
    return MoveGrammar(START, frozenset(keep), kept, terminals)


def shortest_derivations(g: MoveGrammar, order) -> dict[Nonterminal, tuple[Move, ...]]:
    """Shortest string per nonterminal, ties broken lexicographically.

    Knuth's generalisation of Dijkstra's algorithm: costs are (length, move
    keys) and a production's cost is the concatenation of its parts, which
    never undercuts any part.
    """
    uses = defaultdict(list)
    pending = []
    for i, (head, body) in enumerate(g.productions):
        nts = [s for s in body if not isinstance(s, Move)]
        pending.append(len(nts))
        for s in nts:
            uses[s].append(i)
    best: dict[Nonterminal, tuple[Move, ...]] = {}
    heap: list = []

    def offer(i):
        head, body = g.productions[i]
        if head in best:
            return
        word: list[Move] = []
        for s in body:
            word.extend((s,) if isinstance(s, Move) else best[s])
        key = (len(word), tuple(order(m) for m in word))
        heapq.heappush(heap, (key, i, head, tuple(word)))

    for i, n in enumerate(pending):
        if n == 0:
            offer(i)
    while heap:
        _, _, head, word = heapq.heappop(heap)
        if head in best:
            continue
        best[head] = word
        for i in uses[head]:
            # one decrement per occurrence of head in the body
            pending[i] -= 1
            if pending[i] == 0:
                offer(i)
    return best


def reconstruct_word(moves: Sequence[tuple[Head, str]]) -> Word:
    left = [s for h, s in moves if h is Head.LEFT]
    right = [s for h, s in moves if h is Head.RIGHT]
    return tuple(left) + tuple(reversed(right))


def shortest_move_string(a: Automaton) -> tuple[Move, ...] | None:
    g = to_move_grammar(a)
    if g.empty:
        return None
    return shortest_derivations(g, _move_order(a))[g.start]


def _growing_cycle(g: MoveGrammar) -> bool:
    """True if some start-reachable nonterminal derives a sentential form that strictly contains itself."""
    nonnull: set = set()
    changed = True
    while changed:
        changed = False
        for head, body in g.productions:
            if head not in nonnull and any(isinstance(s, Move) or s in nonnull for s in body):
                nonnull.add(head)
                changed = True
    graph = nx.DiGraph()
    graph.add_nodes_from(g.nonterminals)
    growing = set()
    for head, body in g.productions:
        for i, s in enumerate(body):
            if isinstance(s, Move):
                continue
            graph.add_edge(head, s)
            rest = body[:i] + body[i + 1:]
            if any(isinstance(r, Move) or r in nonnull for r in rest):
                growing.add((head, s))
    comp = {}
    for k, scc in enumerate(nx.strongly_connected_components(graph)):
        for n in scc:
            comp[n] = k
    return any(comp[u] == comp[v] for u, v in growing)


# -- outcomes -------------------------------------------------------------------------


@dataclass(frozen=True)
class DecisionOutcome:
    answer: bool
    witness: Word | None = None
    note: str = ""

    def to_json(self) -> dict:
        return {"answer": self.answer,
                "witness": list(self.witness) if self.witness is not None else None,
                "note": self.note}


def is_empty(a: Automaton) -> DecisionOutcome:
    moves = shortest_move_string(a)
    if moves is None:
        return DecisionOutcome(True)
    return DecisionOutcome(False, reconstruct_word(moves), "shortest accepted word")


def is_finite(a: Automaton) -> DecisionOutcome:
    g = to_move_grammar(a)
    if g.empty:
        return DecisionOutcome(True, note="empty language")
    return DecisionOutcome(not _growing_cycle(g))


def _check_alphabet(a: Automaton, d: Dfa):
    missing = [s for s in a.input_alphabet if s not in d.alphabet]
    if missing:
        raise ConstructionError(f"DFA alphabet lacks {missing}")


def subset_of_regular(a: Automaton, d: Dfa) -> DecisionOutcome:
    """L(a) within L(d), via emptiness of L(a) intersected with the complement of L(d)."""
    _check_alphabet(a, d)
    e = is_empty(intersect_regular(a, d.complement()))
    if e.answer:
        return DecisionOutcome(True)
    return DecisionOutcome(False, e.witness, "accepted by the automaton, rejected by the DFA")


def regular_subset_of(d: Dfa, a: Automaton) -> DecisionOutcome:
    """L(d) within L(a), via emptiness of L(d) intersected with the complement of L(a)."""
    _check_alphabet(a, d)
    _require_deterministic(a, "inclusion of a regular language")
    e = is_empty(intersect_regular(complement(extend_alphabet(a, d.alphabet)), d))
    if e.answer:
        return DecisionOutcome(True)
    return DecisionOutcome(False, e.witness, "accepted by the DFA, rejected by the automaton")


def equals_regular(a: Automaton, d: Dfa) -> DecisionOutcome:
    _require_deterministic(a, "comparison with a regular language")
    first = subset_of_regular(a, d)
    if not first.answer:
        return first
    return regular_subset_of(d, a)


__all__ = [
    "DecisionOutcome", "Move", "MoveGrammar", "equals_regular", "is_empty", "is_finite",
    "reconstruct_word", "regular_subset_of", "shortest_derivations", "shortest_move_string",
    "subset_of_regular", "to_move_grammar",
]
