"""Automaton data model, text format, validation and classification."""
from __future__ import annotations

import enum
from collections import defaultdict, deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Sequence

BOTTOM = "_"
WILDCARD = "*"
RESERVED = frozenset({BOTTOM, WILDCARD, "->"})

Word = tuple[str, ...]


class Head(enum.Enum):
    LEFT = "L"
    RIGHT = "R"

    def flipped(self) -> "Head":
        return Head.RIGHT if self is Head.LEFT else Head.LEFT


class Kind(enum.Enum):
    PUSH = "push"
    POP = "pop"
    INTERNAL = "internal"


@dataclass(frozen=True)
class Action:
    kind: Kind
    symbol: str | None = None

    def __post_init__(self):
        if (self.kind is Kind.PUSH) != (self.symbol is not None):
            raise ValueError("push carries exactly one stack symbol; pop/internal carry none")

    def __str__(self) -> str:
        if self.kind is Kind.PUSH:
            return f"push {self.symbol}"
        return "pop" if self.kind is Kind.POP else "nop"


POP = Action(Kind.POP)
NOP = Action(Kind.INTERNAL)


def push(symbol: str) -> Action:
    return Action(Kind.PUSH, symbol)


@dataclass(frozen=True)
class Signature:
    """Total assignment of input symbols to push/pop/internal classes."""

    classes: tuple[tuple[str, Kind], ...]

    @classmethod
    def of(cls, mapping: Mapping[str, Kind]) -> "Signature":
        return cls(tuple(sorted(mapping.items())))

    @classmethod
    def from_sets(cls, push=(), pop=(), internal=()) -> "Signature":
        m: dict[str, Kind] = {}
        for syms, kind in ((push, Kind.PUSH), (pop, Kind.POP), (internal, Kind.INTERNAL)):
            for s in syms:
                if s in m:
                    raise ValueError(f"symbol {s!r} assigned to two classes")
                m[s] = kind
        return cls.of(m)

    @cached_property
    def mapping(self) -> dict[str, Kind]:
        return dict(self.classes)

    def __getitem__(self, symbol: str) -> Kind:
        return self.mapping[symbol]

    def get(self, symbol: str) -> Kind | None:
        return self.mapping.get(symbol)

    def members(self, kind: Kind) -> list[str]:
        return [s for s, k in self.classes if k is kind]


@dataclass(frozen=True)
class Mode:
    """Free, single-signature or double-signature operation.

    A single-signature mode stores the same signature for both heads, so
    ``signature(head)`` is uniform across the three variants.
    """

    kind: str  # "free" | "single" | "double"
    left: Signature | None = None
    right: Signature | None = None

    @classmethod
    def free(cls) -> "Mode":
        return cls("free")

    @classmethod
    def single(cls, sig: Signature) -> "Mode":
        return cls("single", sig, sig)

    @classmethod
    def double(cls, left: Signature, right: Signature) -> "Mode":
        return cls("double", left, right)

    @property
    def input_driven(self) -> bool:
        return self.kind != "free"

    def signature(self, head: Head) -> Signature | None:
        return self.left if head is Head.LEFT else self.right


@dataclass(frozen=True)
class Transition:
    source: str
    head: Head
    symbol: str
    top: str
    action: Action
    target: str
    tid: str = field(default="", compare=False)

    def key(self) -> tuple:
        return (self.source, self.head.value, self.symbol, self.top, self.action.kind.value,
                self.action.symbol or "", self.target)

    def __str__(self) -> str:
        return (f"{self.source} {self.head.value} {self.symbol} {self.top} -> "
                f"{self.target} {self.action}")


@dataclass(frozen=True)
class Automaton:
    name: str
    states: tuple[str, ...]
    input_alphabet: tuple[str, ...]
    stack_alphabet: tuple[str, ...]
    mode: Mode
    transitions: tuple[Transition, ...]
    initial: str
    accepting: frozenset[str]

    @cached_property
    def index(self) -> dict[tuple[str, str], tuple[Transition, ...]]:
        """Transitions grouped by (state, top), in declaration order."""
        groups: dict[tuple[str, str], list[Transition]] = defaultdict(list)
        for t in self.transitions:
            groups[(t.source, t.top)].append(t)
        return {k: tuple(v) for k, v in groups.items()}

    @property
    def tops(self) -> tuple[str, ...]:
        return self.stack_alphabet + (BOTTOM,)

    def same_structure(self, other: "Automaton") -> bool:
        """Equality up to ordering, naming and transition identifiers."""
        return (set(self.states) == set(other.states)
                and set(self.input_alphabet) == set(other.input_alphabet)
                and set(self.stack_alphabet) == set(other.stack_alphabet)
                and self.mode == other.mode
                and {t.key() for t in self.transitions} == {t.key() for t in other.transitions}
                and self.initial == other.initial
                and self.accepting == other.accepting)


def make_automaton(name, states, input_alphabet, stack_alphabet, mode, transitions,
                   initial, accepting) -> Automaton:
    """Build an automaton, dropping duplicate transitions and numbering the rest."""
    seen = set()
    numbered = []
    for t in transitions:
        if t.key() in seen:
            continue
        seen.add(t.key())
        numbered.append(t if t.tid else replace(t, tid=f"t{len(numbered)}"))
    return Automaton(name, tuple(states), tuple(input_alphabet), tuple(stack_alphabet), mode,
                     tuple(numbered), initial, frozenset(accepting))


# -- errors ---------------------------------------------------------------------------


class AutomatonError(Exception):
    pass


class ParseError(AutomatonError):
    def __init__(self, message: str, line: int | None = None, token: str | None = None):
        self.line = line
        self.token = token
        where = f"line {line}: " if line is not None else ""
        tok = f" (at {token!r})" if token is not None else ""
        super().__init__(f"{where}{message}{tok}")


class ValidationError(AutomatonError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("; ".join(f"{c}: {m}" for c, m, _ in report.errors))


class SignatureConflict(AutomatonError):
    def __init__(self, first: Transition, second: Transition):
        self.witness = (first, second)
        super().__init__(f"no signature: {first} vs {second}")


# -- parsing --------------------------------------------------------------------------

_SIG_KEYS = {
    "push": Kind.PUSH, "pop": Kind.POP, "internal": Kind.INTERNAL,
}


def _strip_comment(raw: str) -> str:
    # `#` starts a comment only at a token boundary
    out = []
    for tok in raw.split():
        if tok.startswith("#"):
            break
        out.append(tok)
    return " ".join(out)


def _sections(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if line:
            yield lineno, line.split()


def parse_automaton(text: str, *, strict: bool = True) -> Automaton:
    """Parse the line-oriented automaton format.

    With ``strict`` (the default) the result is validated and a
    :class:`ValidationError` is raised on any error; pass ``strict=False``
    to obtain the raw automaton and inspect :func:`validate` yourself.
    """
    name = mode_kind = initial = None
    seen: dict[str, int] = {}
    states: list[str] = []
    inputs: list[str] = []
    stack: list[str] = []
    accepting: list[str] = []
    classes: dict[tuple[str, str], list[str]] = {}
    raw_trans: list[tuple[int, list[str]]] = []

    def once(key, lineno):
        if key in seen:
            raise ParseError(f"duplicate section {key!r} (first on line {seen[key]})", lineno, key)
        seen[key] = lineno

    def distinct(items, lineno, what):
        dup = {x for x in items if items.count(x) > 1}
        if dup:
            raise ParseError(f"duplicate {what}", lineno, sorted(dup)[0])
        return items

    for lineno, toks in _sections(text):
        key, args = toks[0], toks[1:]
        if key == "trans":
            raw_trans.append((lineno, args))
            continue
        once(key, lineno)
        if key == "name":
            if len(args) != 1:
                raise ParseError("name takes one label", lineno, key)
            name = args[0]
        elif key == "mode":
            if args not in (["single"], ["double"], ["free"]):
                raise ParseError("mode must be single, double or free", lineno, " ".join(args))
            mode_kind = args[0]
        elif key == "input":
            inputs = distinct(args, lineno, "input symbol")
        elif key == "stack":
            stack = distinct(args, lineno, "stack symbol")
        elif key == "states":
            states = distinct(args, lineno, "state")
        elif key == "initial":
            if len(args) != 1:
                raise ParseError("initial takes one state", lineno, key)
            initial = args[0]
        elif key == "accepting":
            accepting = distinct(args, lineno, "accepting state")
        elif key.split(".")[0] in _SIG_KEYS:
            parts = key.split(".")
            if len(parts) == 1:
                side = "both"
            elif len(parts) == 2 and parts[1] in ("left", "right"):
                side = parts[1]
            else:
                raise ParseError("unknown keyword", lineno, key)
            classes[(parts[0], side)] = args
        else:
            raise ParseError("unknown keyword", lineno, key)

    if name is None:
        raise ParseError("missing name")
    if mode_kind is None:
        raise ParseError("missing mode")
    if initial is None:
        raise ParseError("missing initial")
    for tok in inputs + stack:
        if tok in RESERVED:
            raise ParseError("reserved token used as a symbol", seen.get("input"), tok)

    mode = _build_mode(mode_kind, classes, inputs, seen)
    state_set, input_set, stack_set = set(states), set(inputs), set(stack)
    transitions: list[Transition] = []
    for lineno, args in raw_trans:
        transitions.extend(_parse_trans(lineno, args, mode, state_set, input_set, stack_set, stack,
                                        len(transitions)))
    a = make_automaton(name, states, inputs, stack, mode, transitions, initial, accepting)
    if strict:
        report = validate(a)
        if report.errors:
            raise ValidationError(report)
    return a


def _build_mode(kind, classes, inputs, seen) -> Mode:
    if kind == "free":
        if classes:
            raise ParseError("signature classes given in free mode", None, next(iter(classes))[0])
        return Mode.free()
    input_set = set(inputs)

    def sig(side):
        m: dict[str, Kind] = {}
        for (cls, s), syms in classes.items():
            if s != side:
                continue
            for x in syms:
                if x not in input_set:
                    raise ParseError("undeclared symbol in signature", seen.get(f"{cls}.{side}" if side != "both" else cls), x)
                if x in m:
                    raise ParseError("symbol in two signature classes", None, x)
                m[x] = _SIG_KEYS[cls]
        return Signature.of(m)

    if kind == "single":
        if any(side != "both" for _, side in classes):
            raise ParseError("per-head classes in single mode", None, "push.left")
        return Mode.single(sig("both"))
    if any(side == "both" for _, side in classes):
        raise ParseError("unqualified class in double mode", None, "push")
    return Mode.double(sig("left"), sig("right"))


def _parse_trans(lineno, args, mode, states, inputs, stack_set, stack, offset) -> list[Transition]:
    if len(args) < 6 or args[4] != "->":
        raise ParseError("expected: trans <src> L|R <sym> <top> -> <dst> [action]", lineno, " ".join(args))
    src, head_tok, sym, top, _, dst, *act = args
    if src not in states:
        raise ParseError("undeclared state", lineno, src)
    if dst not in states:
        raise ParseError("undeclared state", lineno, dst)
    if head_tok not in ("L", "R"):
        raise ParseError("head must be L or R", lineno, head_tok)
    head = Head(head_tok)
    if sym not in inputs:
        raise ParseError("undeclared input symbol", lineno, sym)
    if top not in stack_set and top not in (BOTTOM, WILDCARD):
        raise ParseError("undeclared stack symbol", lineno, top)

    action: Action | None
    if not act:
        action = None
    elif act[0] == "push" and len(act) == 2:
        if act[1] not in stack_set:
            raise ParseError("undeclared stack symbol", lineno, act[1])
        action = push(act[1])
    elif act in (["pop"], ["nop"]):
        action = POP if act[0] == "pop" else NOP
    else:
        raise ParseError("bad action", lineno, " ".join(act))

    if action is None:
        if not mode.input_driven:
            raise ParseError("action required in free mode", lineno, dst)
        kind = mode.signature(head).get(sym)
        if kind is None:
            raise ParseError("symbol has no signature class", lineno, sym)
        if kind is Kind.PUSH:
            raise ParseError("push action needs an explicit stack symbol", lineno, sym)
        action = POP if kind is Kind.POP else NOP

    tops = list(stack) + [BOTTOM] if top == WILDCARD else [top]
    return [Transition(src, head, sym, x, action, dst,
                       tid=f"t{offset}" if len(tops) == 1 else f"t{offset}.{x}")
            for x in tops]


def serialize_automaton(a: Automaton) -> str:
    lines = [f"name {a.name}", f"mode {a.mode.kind}",
             "input " + " ".join(a.input_alphabet), "stack " + " ".join(a.stack_alphabet)]
    if a.mode.kind == "single":
        lines += _sig_lines(a.mode.left, "")
    elif a.mode.kind == "double":
        lines += _sig_lines(a.mode.left, ".left") + _sig_lines(a.mode.right, ".right")
    lines.append("states " + " ".join(a.states))
    lines.append(f"initial {a.initial}")
    lines.append("accepting " + " ".join(s for s in a.states if s in a.accepting))
    for t in a.transitions:
        lines.append(f"trans {t}")
    return "\n".join(lines) + "\n"


def _sig_lines(sig: Signature, suffix: str) -> list[str]:
    out = []
    for kind in Kind:
        syms = sig.members(kind)
        if syms:
            out.append(f"{kind.value}{suffix} " + " ".join(syms))
    return out


# -- validation -----------------------------------------------------------------------


@dataclass
class ValidationReport:
    errors: list[tuple[str, str, str | None]] = field(default_factory=list)
    warnings: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def validate(a: Automaton) -> ValidationReport:
    r = ValidationReport()
    states = set(a.states)
    inputs, stack = set(a.input_alphabet), set(a.stack_alphabet)

    for s in (inputs | stack) & RESERVED:
        r.errors.append(("reserved-symbol", f"{s!r} is reserved", None))
    if a.initial not in states:
        r.errors.append(("initial-not-state", f"initial state {a.initial!r} is not declared", None))
    for q in sorted(a.accepting - states):
        r.errors.append(("accepting-not-state", f"accepting state {q!r} is not declared", None))

    for t in a.transitions:
        for q in (t.source, t.target):
            if q not in states:
                r.errors.append(("unknown-state", f"state {q!r} is not declared", t.tid))
        if t.symbol not in inputs:
            r.errors.append(("unknown-symbol", f"input symbol {t.symbol!r} is not declared", t.tid))
        if t.top != BOTTOM and t.top not in stack:
            r.errors.append(("unknown-top", f"stack symbol {t.top!r} is not declared", t.tid))
        if t.action.kind is Kind.PUSH and t.action.symbol not in stack:
            r.errors.append(("unknown-push", f"pushed symbol {t.action.symbol!r} is not declared", t.tid))

    if a.mode.input_driven:
        for head in Head:
            sig = a.mode.signature(head)
            side = "" if a.mode.kind == "single" else f" ({head.name.lower()} head)"
            missing = [s for s in a.input_alphabet if sig.get(s) is None]
            extra = [s for s in sig.mapping if s not in inputs]
            if missing:
                r.errors.append(("signature-partial", f"no class for {missing}{side}", None))
            if extra:
                r.errors.append(("signature-extra", f"classes for undeclared {extra}{side}", None))
            if a.mode.kind == "single":
                break
        for t in a.transitions:
            expected = a.mode.signature(t.head).get(t.symbol)
            if expected is not None and expected is not t.action.kind:
                r.errors.append(("signature-mismatch",
                                 f"{t.symbol!r} is {expected.value}-class for head {t.head.value} "
                                 f"but the transition does {t.action.kind.value}", t.tid))

    for q in unreachable_states(a):
        r.warnings.append(("unreachable-state", f"state {q!r} is unreachable"))
    return r


def unreachable_states(a: Automaton) -> list[str]:
    succ = defaultdict(set)
    for t in a.transitions:
        succ[t.source].add(t.target)
    seen = {a.initial}
    todo = deque([a.initial])
    while todo:
        q = todo.popleft()
        for r in succ[q] - seen:
            seen.add(r)
            todo.append(r)
    return [q for q in a.states if q not in seen]


# -- classification -------------------------------------------------------------------


@dataclass(frozen=True)
class Conflict:
    state: str
    top: str
    first: Transition
    second: Transition


@dataclass(frozen=True)
class DeterminismVerdict:
    deterministic: bool
    conflicts: tuple[Conflict, ...] = ()


def classify_determinism(a: Automaton) -> DeterminismVerdict:
    """Static rule: per (state, top) one head only, and one transition per symbol.

    Configurations may pair any left symbol with any right symbol (and on a
    single remaining symbol both heads see the same one), so a (state, top)
    pair using both heads always admits an input with two enabled moves.
    """
    conflicts = []
    for (state, top), ts in a.index.items():
        first_by_head: dict[Head, Transition] = {}
        by_symbol: dict[tuple[Head, str], Transition] = {}
        for t in ts:
            other = next((u for h, u in first_by_head.items() if h is not t.head), None)
            if other is not None and len(first_by_head) == 1:
                conflicts.append(Conflict(state, top, other, t))
            first_by_head.setdefault(t.head, t)
            prev = by_symbol.get((t.head, t.symbol))
            if prev is not None:
                conflicts.append(Conflict(state, top, prev, t))
            else:
                by_symbol[(t.head, t.symbol)] = t
    return DeterminismVerdict(not conflicts, tuple(conflicts))


def classify_mode(a: Automaton) -> Mode:
    """Strongest mode consistent with the transitions.

    Symbols a head never reads are given the internal class.  Raises
    :class:`SignatureConflict` if some head uses one symbol with two action
    kinds.
    """
    used: dict[Head, dict[str, Transition]] = {Head.LEFT: {}, Head.RIGHT: {}}
    for t in a.transitions:
        prev = used[t.head].get(t.symbol)
        if prev is not None and prev.action.kind is not t.action.kind:
            raise SignatureConflict(prev, t)
        used[t.head].setdefault(t.symbol, t)

    def declared(head, s):
        sig = a.mode.signature(head)
        return sig.get(s) if sig is not None else None

    merged: dict[str, Kind] = {}
    single = True
    for s in a.input_alphabet:
        kinds = {u[s].action.kind for u in used.values() if s in u}
        if len(kinds) > 1:
            single = False
            break
        if kinds:
            merged[s] = kinds.pop()
        else:
            dl, dr = declared(Head.LEFT, s), declared(Head.RIGHT, s)
            merged[s] = dl if dl is not None and dl is dr else Kind.INTERNAL
    if single:
        return Mode.single(Signature.of(merged))
    if a.mode.kind == "double":
        return a.mode

    def infer(head):
        return Signature.of({s: (used[head][s].action.kind if s in used[head] else Kind.INTERNAL)
                             for s in a.input_alphabet})
    return Mode.double(infer(Head.LEFT), infer(Head.RIGHT))


def with_mode(a: Automaton, mode: Mode) -> Automaton:
    return replace(a, mode=mode)


def load_automaton(path) -> Automaton:
    with open(path, encoding="utf-8") as fh:
        return parse_automaton(fh.read())


def word_from_text(text: str, alphabet: Sequence[str] | None = None, *, chars: bool = False) -> Word:
    """Split a word given as whitespace-separated tokens (or single characters)."""
    if chars:
        if alphabet is not None and any(len(s) != 1 for s in alphabet):
            raise ValueError("--chars needs an alphabet of single-character symbols")
        return tuple(c for c in text if not c.isspace())
    return tuple(text.split())


def format_word(w: Iterable[str]) -> str:
    w = tuple(w)
    return " ".join(w) if w else "λ"
