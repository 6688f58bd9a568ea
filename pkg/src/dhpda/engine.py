"""Step relation, runs, membership search and traces."""
from __future__ import annotations

import contextlib
import contextvars
import enum
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .model import BOTTOM, Automaton, Head, Kind, Transition, Word


@dataclass(frozen=True)
class Configuration:
    state: str
    left: int
    right: int
    stack: tuple[str, ...] = ()  # top first

    @property
    def top(self) -> str:
        return self.stack[0] if self.stack else BOTTOM

    def to_json(self) -> dict:
        return {"state": self.state, "left": self.left, "right": self.right,
                "stack": list(self.stack)}


def initial_configuration(a: Automaton, w: Sequence[str]) -> Configuration:
    return Configuration(a.initial, 0, len(w), ())


@dataclass(frozen=True)
class TraceStep:
    before: Configuration
    transition: Transition


class HaltReason(enum.Enum):
    ACCEPTING = "InputConsumedAccepting"
    REJECTING = "InputConsumedRejecting"
    STUCK = "NoEnabledTransition"


@dataclass(frozen=True)
class RunResult:
    accepted: bool
    trace: tuple[TraceStep, ...]
    halt_reason: HaltReason
    final: Configuration


class StepError(RuntimeError):
    """A transition was applied where it is not enabled."""


class NondeterminismError(RuntimeError):
    def __init__(self, config: Configuration, options: Sequence[Transition]):
        self.config = config
        self.options = tuple(options)
        super().__init__(f"{len(options)} transitions enabled in {config}: "
                         + "; ".join(str(t) for t in options))


def enabled_transitions(a: Automaton, w: Sequence[str], c: Configuration) -> list[Transition]:
    if c.left >= c.right:
        return []
    lsym, rsym = w[c.left], w[c.right - 1]
    return [t for t in a.index.get((c.state, c.top), ())
            if t.symbol == (lsym if t.head is Head.LEFT else rsym)]


def _successor(c: Configuration, t: Transition) -> Configuration:
    left, right = (c.left + 1, c.right) if t.head is Head.LEFT else (c.left, c.right - 1)
    kind = t.action.kind
    if kind is Kind.PUSH:
        stack = (t.action.symbol,) + c.stack
    elif kind is Kind.POP:
        stack = c.stack[1:]
    else:
        stack = c.stack
    return Configuration(t.target, left, right, stack)


def apply(a: Automaton, w: Sequence[str], c: Configuration, t: Transition) -> Configuration:
    if t not in enabled_transitions(a, w, c):
        raise StepError(f"transition {t} is not enabled in {c}")
    return _successor(c, t)


def _halt(a: Automaton, c: Configuration) -> HaltReason:
    if c.left < c.right:
        return HaltReason.STUCK
    return HaltReason.ACCEPTING if c.state in a.accepting else HaltReason.REJECTING


def run_deterministic(a: Automaton, w: Sequence[str]) -> RunResult:
    w = tuple(w)
    c = initial_configuration(a, w)
    trace: list[TraceStep] = []
    while True:
        options = enabled_transitions(a, w, c)
        if not options:
            break
        if len(options) > 1:
            raise NondeterminismError(c, options)
        trace.append(TraceStep(c, options[0]))
        c = _successor(c, options[0])
    reason = _halt(a, c)
    result = RunResult(reason is HaltReason.ACCEPTING, tuple(trace), reason, c)
    _observe(a, w, result.trace, c)
    return result


def _search(a: Automaton, w: Word, want_trace: bool):
    """Depth-first search over full configurations with a visited set."""
    start = initial_configuration(a, w)
    parent: dict[Configuration, tuple[Configuration, Transition] | None] = {start: None}
    todo = [start]
    while todo:
        c = todo.pop()
        if c.left == c.right:
            if c.state in a.accepting:
                return c, parent
            continue
        # reversed so the first declared transition is explored first
        for t in reversed(enabled_transitions(a, w, c)):
            d = _successor(c, t)
            if d not in parent:
                parent[d] = (c, t) if want_trace else None
                todo.append(d)
    return None, parent


def accepts(a: Automaton, w: Sequence[str]) -> bool:
    found, _ = _search(a, tuple(w), False)
    return found is not None


def find_accepting_trace(a: Automaton, w: Sequence[str]) -> tuple[TraceStep, ...] | None:
    w = tuple(w)
    found, parent = _search(a, w, True)
    if found is None:
        return None
    steps = []
    c = found
    while parent[c] is not None:
        prev, t = parent[c]
        steps.append(TraceStep(prev, t))
        c = prev
    trace = tuple(reversed(steps))
    _observe(a, w, trace, found)
    return trace


def reachable_configurations(a: Automaton, w: Sequence[str]) -> set[Configuration]:
    """Every configuration reachable from the initial one on ``w``."""
    w = tuple(w)
    start = initial_configuration(a, w)
    seen = {start}
    todo = [start]
    while todo:
        c = todo.pop()
        for t in enabled_transitions(a, w, c):
            d = _successor(c, t)
            if d not in seen:
                seen.add(d)
                todo.append(d)
    return seen


def moves(trace: Sequence[TraceStep]) -> list[tuple[Head, str]]:
    return [(s.transition.head, s.transition.symbol) for s in trace]


def final_configuration(trace: Sequence[TraceStep], a: Automaton, w: Sequence[str]) -> Configuration:
    if not trace:
        return initial_configuration(a, w)
    return _successor(trace[-1].before, trace[-1].transition)


def trace_to_json(a: Automaton, w: Sequence[str], trace: Sequence[TraceStep],
                  halt_reason: HaltReason | None = None) -> list[dict]:
    out = [dict(s.before.to_json(), transition_id=s.transition.tid) for s in trace]
    end = final_configuration(trace, a, w)
    reason = halt_reason or _halt(a, end)
    out.append(dict(end.to_json(), accepted=reason is HaltReason.ACCEPTING,
                    halt_reason=reason.value))
    return out


# -- trace laws -----------------------------------------------------------------------


def trace_law_violations(a: Automaton, w: Sequence[str], trace: Sequence[TraceStep],
                         final: Configuration | None = None) -> list[str]:
    """Check step-count, stack-height and window laws along a trace."""
    n = len(w)
    problems = []
    configs = [s.before for s in trace]
    configs.append(final if final is not None else final_configuration(trace, a, w))
    for i, c in enumerate(configs):
        if not 0 <= c.left <= c.right <= n:
            problems.append(f"step {i}: window {c.left}..{c.right} out of range")
        if c.left + (n - c.right) != i:
            problems.append(f"step {i}: consumed {c.left + n - c.right} symbols")
        if len(c.stack) > c.left + (n - c.right):
            problems.append(f"step {i}: stack deeper than consumed input")
    for i, s in enumerate(trace):
        nxt = configs[i + 1]
        if nxt.left < s.before.left or nxt.right > s.before.right:
            problems.append(f"step {i}: window not monotone")
        if a.mode.input_driven:
            kind = a.mode.signature(s.transition.head)[s.transition.symbol]
            delta = len(nxt.stack) - len(s.before.stack)
            expected = {Kind.PUSH: 1, Kind.INTERNAL: 0,
                        Kind.POP: -1 if s.before.stack else 0}[kind]
            if delta != expected:
                problems.append(f"step {i}: stack height changed by {delta}, expected {expected}")
    return problems


@dataclass
class LawMonitor:
    traces: int = 0
    steps: int = 0
    violations: list[str] = field(default_factory=list)


_monitor: contextvars.ContextVar[LawMonitor | None] = contextvars.ContextVar("law_monitor",
                                                                             default=None)


@contextlib.contextmanager
def law_checking(mon: LawMonitor | None = None) -> Iterator[LawMonitor]:
    """Check the trace laws on every trace produced inside the block.

    Pass an existing monitor to accumulate over several blocks.
    """
    mon = mon if mon is not None else LawMonitor()
    token = _monitor.set(mon)
    try:
        yield mon
    finally:
        _monitor.reset(token)


def _observe(a, w, trace, final):
    mon = _monitor.get()
    if mon is None:
        return
    mon.traces += 1
    mon.steps += len(trace)
    mon.violations.extend(f"{a.name} {' '.join(w)}: {p}"
                          for p in trace_law_violations(a, w, trace, final))
