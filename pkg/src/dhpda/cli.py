"""Command-line front end.

Exit status: 0 for success or a positive answer, 1 for a negative answer,
2 for usage and parse errors, 3 when the input is well-formed but fails
validation or a construction's preconditions.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable

from . import corpus, decision, reductions
from .constructions import (ConstructionError, Dfa, complement, complete, intersect_regular,
                            parse_dfa, reverse, union_regular)
from .corpus import SliceBudgetExceeded
from .engine import (NondeterminismError, find_accepting_trace, run_deterministic,
                     trace_to_json)
from .engine import accepts as engine_accepts
from .model import (Automaton, AutomatonError, Kind, ParseError, SignatureConflict,
                    ValidationError, classify_determinism, classify_mode, format_word, parse_automaton,
                    serialize_automaton, validate, word_from_text)

OK, NO, USAGE, INVALID = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Output:
    def __init__(self, as_json: bool, stream=None):
        self.as_json = as_json
        self.stream = stream or sys.stdout

    def emit(self, text: str, payload: dict):
        if self.as_json:
            print(json.dumps(payload, ensure_ascii=False, sort_keys=True), file=self.stream)
        else:
            print(text, file=self.stream)


# -- loading --------------------------------------------------------------------------


def _read(path: str) -> str:
    """File contents; ``corpus/<file>`` falls back to the packaged catalogue."""
    p = Path(path)
    if p.exists():
        return p.read_text(encoding="utf-8")
    if p.parent.name == "corpus":
        try:
            return corpus.load_text(p.name)
        except (FileNotFoundError, OSError):
            pass
    raise UsageError(f"no such file: {path}")


def _automaton(path: str) -> Automaton:
    return parse_automaton(_read(path))


def _dfa(path: str) -> Dfa:
    d = parse_dfa(_read(path))
    for w in d.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return d


def _word(args, alphabet) -> tuple[str, ...]:
    w = word_from_text(args.word, alphabet, chars=args.chars)
    unknown = [s for s in w if s not in alphabet]
    if unknown:
        raise UsageError(f"symbols not in the input alphabet: {' '.join(dict.fromkeys(unknown))}")
    return w


def _yes_no(out: Output, verb: str, answer: bool, extra: str = "", payload: dict | None = None):
    text = ("yes" if answer else "no") + (f" ({extra})" if extra else "")
    out.emit(text, {"verb": verb, "answer": answer, **(payload or {})})
    return OK if answer else NO


def _outcome(out: Output, verb: str, o: decision.DecisionOutcome, label: str):
    extra = f"{label}: {format_word(o.witness)}" if o.witness is not None else ""
    return _yes_no(out, verb, o.answer, extra, o.to_json())


def _automaton_out(out: Output, verb: str, a: Automaton, args):
    text = serialize_automaton(a)
    if getattr(args, "output", None):
        Path(args.output).write_text(text, encoding="utf-8")
        out.emit(f"wrote {args.output}", {"verb": verb, "written": [args.output], "name": a.name})
    else:
        out.emit(text.rstrip("\n"), {"verb": verb, "name": a.name, "automaton": text})
    return OK


# -- verbs ----------------------------------------------------------------------------


def cmd_validate(args, out):
    a = parse_automaton(_read(args.file), strict=False)
    r = validate(a)
    lines = [f"error {c}: {m}" + (f" [{loc}]" if loc else "") for c, m, loc in r.errors]
    lines += [f"warning {c}: {m}" for c, m in r.warnings]
    lines.append("valid" if r.ok else "invalid")
    out.emit("\n".join(lines), {
        "verb": "validate", "answer": r.ok,
        "errors": [{"code": c, "message": m, "location": loc} for c, m, loc in r.errors],
        "warnings": [{"code": c, "message": m} for c, m in r.warnings]})
    return OK if r.ok else INVALID


def cmd_classify(args, out):
    a = _automaton(args.file)
    v = classify_determinism(a)
    lines = [f"deterministic: {'yes' if v.deterministic else 'no'}"]
    lines += [f"  conflict at {c.state}/{c.top}: {c.first} | {c.second}" for c in v.conflicts]
    payload = {"verb": "classify", "deterministic": v.deterministic,
               "conflicts": [{"state": c.state, "top": c.top, "first": c.first.tid,
                              "second": c.second.tid} for c in v.conflicts]}
    try:
        mode = classify_mode(a)
        lines.append(f"mode: {mode.kind}")
        payload["mode"] = mode.kind
        for side in ("left", "right") if mode.kind == "double" else ("left",):
            sig = getattr(mode, side)
            label = f"signature {side}" if mode.kind == "double" else "signature"
            lines.append(f"{label}: " + "; ".join(
                f"{k.value} {' '.join(sig.members(k)) or '-'}" for k in Kind))
            payload[f"signature_{side}"] = {s: k.value for s, k in sig.classes}
    except SignatureConflict as e:
        first, second = e.witness
        lines.append(f"mode: free (no signature: {first} | {second})")
        payload["mode"] = "free"
        payload["signature_conflict"] = [first.tid, second.tid]
    out.emit("\n".join(lines), payload)
    return OK


def cmd_run(args, out):
    a = _automaton(args.file)
    if not classify_determinism(a).deterministic:
        raise ConstructionError("run needs a deterministic machine; use member or trace")
    w = _word(args, a.input_alphabet)
    r = run_deterministic(a, w)
    text = f"{'yes' if r.accepted else 'no'} ({r.halt_reason.value} after {len(r.trace)} steps)"
    out.emit(text, {"verb": "run", "answer": r.accepted, "halt_reason": r.halt_reason.value,
                    "steps": len(r.trace), "final": r.final.to_json()})
    return OK if r.accepted else NO


def cmd_member(args, out):
    a = _automaton(args.file)
    return _yes_no(out, "member", engine_accepts(a, _word(args, a.input_alphabet)))


def cmd_trace(args, out):
    a = _automaton(args.file)
    w = _word(args, a.input_alphabet)
    reason = None
    if classify_determinism(a).deterministic:
        r = run_deterministic(a, w)
        trace, reason, accepted = r.trace, r.halt_reason, r.accepted
    else:
        trace = find_accepting_trace(a, w)
        accepted = trace is not None
        trace = trace or ()
    steps = trace_to_json(a, w, trace, reason)
    lines = []
    for s in steps[:-1]:
        lines.append(f"{s['state']} [{s['left']},{s['right']}) {' '.join(s['stack']) or '_'}"
                     f"  --{s['transition_id']}-->")
    end = steps[-1]
    lines.append(f"{end['state']} [{end['left']},{end['right']}) {' '.join(end['stack']) or '_'}"
                 f"  {end['halt_reason']}")
    if not accepted and reason is None:
        lines.append("no accepting computation")
    out.emit("\n".join(lines), {"verb": "trace", "answer": accepted, "trace": steps})
    return OK if accepted else NO


def cmd_slice(args, out):
    a = _automaton(args.file)
    words = corpus.sort_words(corpus.slice(a, args.n, budget=args.budget), a.input_alphabet)
    out.emit("\n".join(format_word(w) for w in words) or "(empty)",
             {"verb": "slice", "n": args.n, "words": [list(w) for w in words]})
    return OK


def cmd_reverse(args, out):
    return _automaton_out(out, "reverse", reverse(_automaton(args.file)), args)


def cmd_complete(args, out):
    return _automaton_out(out, "complete", complete(_automaton(args.file)), args)


def cmd_complement(args, out):
    return _automaton_out(out, "complement", complement(_automaton(args.file)), args)


def cmd_inter_reg(args, out):
    return _automaton_out(out, "inter-reg",
                          intersect_regular(_automaton(args.file), _dfa(args.dfa)), args)


def cmd_union_reg(args, out):
    return _automaton_out(out, "union-reg",
                          union_regular(_automaton(args.file), _dfa(args.dfa)), args)


def cmd_empty(args, out):
    return _outcome(out, "empty", decision.is_empty(_automaton(args.file)), "witness")


def cmd_finite(args, out):
    return _outcome(out, "finite", decision.is_finite(_automaton(args.file)), "witness")


def cmd_subset_reg(args, out):
    o = decision.subset_of_regular(_automaton(args.file), _dfa(args.dfa))
    return _outcome(out, "subset-reg", o, "counterexample")


def cmd_reg_subset(args, out):
    o = decision.regular_subset_of(_dfa(args.dfa), _automaton(args.file))
    return _outcome(out, "reg-subset", o, "counterexample")


def cmd_eq_reg(args, out):
    o = decision.equals_regular(_automaton(args.file), _dfa(args.dfa))
    return _outcome(out, "eq-reg", o, "counterexample")


def cmd_valc_build(args, out):
    tm = reductions.parse_tm(_read(args.tm))
    m1, m2 = reductions.build_valc_pair(tm)
    if args.output:
        d = Path(args.output)
        d.mkdir(parents=True, exist_ok=True)
        paths = []
        for m in (m1, m2):
            p = d / f"{m.name}.dhpda"
            p.write_text(serialize_automaton(m), encoding="utf-8")
            paths.append(str(p))
        out.emit("\n".join(f"wrote {p}" for p in paths), {"verb": "valc-build", "written": paths})
    else:
        out.emit(serialize_automaton(m1) + "\n" + serialize_automaton(m2).rstrip("\n"),
                 {"verb": "valc-build",
                  "automata": [serialize_automaton(m1), serialize_automaton(m2)]})
    return OK


def cmd_valc_check(args, out):
    tm = reductions.parse_tm(_read(args.tm))
    w = word_from_text(args.word, tm.valc_alphabet, chars=args.chars)
    return _yes_no(out, "valc-check", reductions.valc_member(tm, w))


def cmd_corpus(args, out):
    if args.action == "list":
        rows = [corpus.manifest_row(e.automaton, e.slice_bound, e.description)
                for e in corpus.corpus_list()]
        text = "\n".join(f"{r['name']:18} {r['mode']:7} "
                         f"{'det' if r['deterministic'] else 'nondet':7} n={r['slice_bound']:<3} "
                         f"{r['description']}" for r in rows)
        out.emit(text, {"verb": "corpus", "entries": rows})
    elif args.action == "show":
        if not args.target:
            raise UsageError("corpus show needs an entry name")
        try:
            e = corpus.entry(args.target)
        except KeyError:
            raise UsageError(f"no corpus entry {args.target!r}") from None
        text = serialize_automaton(e.automaton)
        out.emit(text.rstrip("\n"), {"verb": "corpus", "name": e.name, "automaton": text})
    else:
        if not args.target:
            raise UsageError("corpus export needs a directory")
        paths = [str(p) for p in corpus.export(args.target)]
        out.emit("\n".join(f"wrote {p}" for p in paths), {"verb": "corpus", "written": paths})
    return OK


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def flags(default):
        parser = argparse.ArgumentParser(add_help=False)
        parser.add_argument("--json", action="store_true", default=default,
                            help="machine-readable output")
        parser.add_argument("--chars", action="store_true", default=default,
                            help="words are contiguous single-character symbols")
        return parser

    # subcommands must not reset a flag given before the verb
    common = flags(argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="dhpda", parents=[flags(False)],
                                description="Double-head pushdown automata workbench.")
    sub = p.add_subparsers(dest="verb", required=True, metavar="VERB")

    def verb(name, fn: Callable, help_text, *spec):
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        for kind in spec:
            if kind == "file":
                sp.add_argument("file", help="automaton file")
            elif kind == "dfa":
                sp.add_argument("dfa", help="DFA file")
            elif kind == "word":
                sp.add_argument("-w", "--word", required=True,
                                help='word as whitespace-separated tokens, e.g. "a b hash"')
            elif kind == "output":
                sp.add_argument("-o", "--output", help="write the result here instead of stdout")
        sp.set_defaults(fn=fn)
        return sp

    verb("validate", cmd_validate, "check an automaton file", "file")
    verb("classify", cmd_classify, "determinism and strongest signature mode", "file")
    verb("run", cmd_run, "run a deterministic machine", "file", "word")
    verb("member", cmd_member, "decide membership of a word", "file", "word")
    verb("trace", cmd_trace, "print a computation on a word", "file", "word")
    sp = verb("slice", cmd_slice, "all accepted words up to a length", "file")
    sp.add_argument("-n", type=int, required=True, help="length bound")
    sp.add_argument("--budget", type=int, default=None,
                    help=f"word budget (default: ${corpus.BUDGET_ENV} or {corpus.DEFAULT_SLICE_BUDGET})")
    verb("reverse", cmd_reverse, "machine for the reversed language", "file", "output")
    verb("complete", cmd_complete, "equivalent machine that reads every word", "file", "output")
    verb("complement", cmd_complement, "machine for the complement", "file", "output")
    verb("inter-reg", cmd_inter_reg, "intersection with a regular language", "file", "dfa",
         "output")
    verb("union-reg", cmd_union_reg, "union with a regular language", "file", "dfa", "output")
    verb("empty", cmd_empty, "is the language empty", "file")
    verb("finite", cmd_finite, "is the language finite", "file")
    verb("subset-reg", cmd_subset_reg, "is L(automaton) contained in L(dfa)", "file", "dfa")
    sp = verb("reg-subset", cmd_reg_subset, "is L(dfa) contained in L(automaton)")
    sp.add_argument("dfa", help="DFA file")
    sp.add_argument("file", help="automaton file")
    verb("eq-reg", cmd_eq_reg, "is L(automaton) equal to L(dfa)", "file", "dfa")
    sp = verb("valc-build", cmd_valc_build, "the two machines for a Turing machine's valid computations")
    sp.add_argument("tm", help="Turing machine file")
    sp.add_argument("-o", "--output", help="directory to write both machines to")
    sp = verb("valc-check", cmd_valc_check, "is a word a valid computation", "word")
    sp.add_argument("tm", help="Turing machine file")
    sp = verb("corpus", cmd_corpus, "the packaged catalogue")
    sp.add_argument("action", choices=("list", "show", "export"))
    sp.add_argument("target", nargs="?", help="entry name (show) or directory (export)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code not in (0, None) else OK
    out = Output(args.json)
    try:
        return args.fn(args, out)
    except (UsageError, ParseError, SliceBudgetExceeded, ValueError) as e:
        _fail(out, args.verb, e)
        return USAGE
    except (ValidationError, ConstructionError, NondeterminismError,
            reductions.TuringMachineError, AutomatonError) as e:
        _fail(out, args.verb, e)
        return INVALID


def _fail(out: Output, verb: str, e: Exception):
    if out.as_json:
        print(json.dumps({"verb": verb, "error": type(e).__name__, "message": str(e)}))
    else:
        print(f"error: {e}", file=sys.stderr)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
