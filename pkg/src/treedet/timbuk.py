"""Timbuk text format, its product-form extension, and JSON stats records.

Plain format::

    Ops nil:0 cons:2
    Automaton lists
    States list any
    Final States list
    Transitions
    nil -> list
    cons(any,list) -> list

Comments run from ``%`` to end of line.  In the product extension an
argument may be a brace set ``{d0,d1}`` or ``_`` (every state), and an
optional trailing ``StateMap`` block records which source states each
DFTA state stands for::

    StateMap
    Source States list any
    d0 = {list,any}
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass
from typing import Iterator

from .core import Fta, Signature, Symbol, Transition, bits_to_mask, canonical_key
from .errors import ParseError
from .product import Dfta, ProductFta, ProductTransition, estimate_expanded_count

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<arrow>->)
  | (?P<punct>[(),{}=:])
  | (?P<name>(?:[^\s(),{}=%:\-]|-(?!>))+)
    """,
    re.VERBOSE,
)

KEYWORDS = frozenset({"Ops", "Automaton", "States", "Final", "Transitions", "StateMap", "Source"})


class _Tokens:
    def __init__(self, text: str):
        self.items: list[tuple[str, str, int, int]] = []
        line, line_start = 1, 0
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
            kind = m.lastgroup
            if kind != "ws":
                self.items.append((kind, m.group(), line, m.start() - line_start + 1))
            chunk = m.group()
            nl = chunk.count("\n")
            if nl:
                line += nl
                line_start = m.start() + chunk.rfind("\n") + 1
            pos = m.end()
        self.eof = ("eof", "", line, pos - line_start + 1)
        self.i = 0

    def peek(self, k=0):
        j = self.i + k
        return self.items[j] if j < len(self.items) else self.eof

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def at(self, value, k=0):
        return self.peek(k)[1] == value and self.peek(k)[0] != "eof"

    def expect(self, value):
        tok = self.next()
        if tok[1] != value or tok[0] == "eof":
            self.fail(f"expected {value!r}, got {tok[1] or 'end of input'!r}", tok)
        return tok

    def name(self, what="name"):
        tok = self.next()
        if tok[0] != "name":
            self.fail(f"expected {what}, got {tok[1] or 'end of input'!r}", tok)
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok[2], tok[3])

    def done(self):
        return self.peek()[0] == "eof"


def _section_end(toks: _Tokens, stops) -> bool:
    tok = toks.peek()
    if tok[0] == "eof":
        return True
    if tok[1] == "Final" and toks.at("States", 1):
        return "Final" in stops
    return tok[0] == "name" and tok[1] in stops


def _parse_header(toks: _Tokens):
    toks.expect("Ops")
    symbols = []
    names = {}
    while not _section_end(toks, {"Automaton"}):
        tok = toks.name("symbol")
        toks.expect(":")
        ar = toks.name("arity")
        if not ar[1].isdigit():
            toks.fail(f"arity must be a non-negative integer, got {ar[1]!r}", ar)
        arity = int(ar[1])
        if tok[1] in names:
            if names[tok[1]] == arity:
                toks.fail(f"duplicate symbol {tok[1]}:{arity}", tok)
            toks.fail(f"symbol {tok[1]} declared with arities {names[tok[1]]} and {arity}", tok)
        names[tok[1]] = arity
        symbols.append(Symbol(tok[1], arity))
    toks.expect("Automaton")
    auto_name = toks.name("automaton name")[1]
    toks.expect("States")
    states = []
    index = {}
    while not _section_end(toks, {"Final"}):
        tok = toks.name("state")
        if toks.at(":"):
            toks.next()
            toks.name("state annotation")
        if tok[1] in index:
            toks.fail(f"duplicate state {tok[1]!r}", tok)
        if tok[1] in names:
            toks.fail(f"{tok[1]!r} is both a symbol and a state", tok)
        index[tok[1]] = len(states)
        states.append(tok[1])
    toks.expect("Final")
    toks.expect("States")
    finals = []
    while not _section_end(toks, {"Transitions"}):
        tok = toks.name("final state")
        if tok[1] not in index:
            toks.fail(f"undeclared final state {tok[1]!r}", tok)
        finals.append(index[tok[1]])
    toks.expect("Transitions")
    return Signature(symbols), auto_name, states, index, finals


def _parse_lhs(toks: _Tokens, sig: Signature, parse_arg):
    tok = toks.name("symbol")
    sym = sig.get(tok[1])
    if sym is None:
        toks.fail(f"undeclared symbol {tok[1]!r}", tok)
    args = []
    if toks.at("("):
        toks.next()
        if not toks.at(")"):
            args.append(parse_arg())
            while toks.at(","):
                toks.next()
                args.append(parse_arg())
        toks.expect(")")
    if len(args) != sym.arity:
        toks.fail(f"arity mismatch: {sym.name} declared with arity {sym.arity}, used with {len(args)}", tok)
    toks.expect("->")
    return sym, args


def parse_timbuk(text: str) -> Fta:
    toks = _Tokens(text)
    sig, _, states, index, finals = _parse_header(toks)

    def state():
        tok = toks.name("state")
        if tok[1] not in index:
            toks.fail(f"undeclared state {tok[1]!r}", tok)
        return index[tok[1]]

    delta = set()
    while not toks.done():
        sym, args = _parse_lhs(toks, sig, state)
        delta.add(Transition(sym, tuple(args), state()))
    return Fta(sig, tuple(states), frozenset(finals), frozenset(delta))


def serialize_timbuk(fta: Fta, name: str = "A") -> str:
    out = [
        "Ops " + " ".join(f"{s.name}:{s.arity}" for s in fta.signature),
        "",
        f"Automaton {name}",
        "States " + " ".join(fta.states),
        "Final States " + " ".join(fta.states[q] for q in sorted(fta.finals)),
        "Transitions",
    ]
    for t in fta.sorted_delta:
        out.append(str(Transition(t.func, tuple(fta.states[a] for a in t.args), fta.states[t.rhs])))
    return "\n".join(out) + "\n"


def parse_product(text: str) -> Dfta:
    """Read the product-form extension into a :class:`Dfta`.

    Without a ``StateMap`` block each DFTA state is taken to stand for
    itself (a singleton subset).
    """
    toks = _Tokens(text)
    sig, _, names, index, finals = _parse_header(toks)

    def state_name():
        tok = toks.name("state")
        if tok[1] not in index:
            toks.fail(f"unknown DFTA state {tok[1]!r}", tok)
        return index[tok[1]]

    def arg():
        if toks.at("_"):
            toks.next()
            return None
        if toks.at("{"):
            brace = toks.next()
            if toks.at("}"):
                toks.fail("empty state set", brace)
            members = [state_name()]
            while toks.at(","):
                toks.next()
                members.append(state_name())
            toks.expect("}")
            return members
        return [state_name()]

    raw = []
    while not toks.done() and not toks.at("StateMap"):
        sym, args = _parse_lhs(toks, sig, arg)
        raw.append((sym, args, state_name()))

    source: list[str] = []
    contents: dict[int, list[str]] = {}
    if toks.at("StateMap"):
        toks.next()
        if toks.at("Source") and toks.at("States", 1):
            toks.next()
            toks.next()
            while toks.peek()[0] == "name" and not toks.at("=", 1):
                source.append(toks.next()[1])
        while not toks.done():
            d = state_name()
            toks.expect("=")
            toks.expect("{")
            members = []
            if not toks.at("}"):
                members.append(toks.name("source state")[1])
                while toks.at(","):
                    toks.next()
                    members.append(toks.name("source state")[1])
            toks.expect("}")
            contents[d] = members
            for m in members:
                if m not in source:
                    source.append(m)
        missing = [names[i] for i in range(len(names)) if i not in contents]
        if missing:
            toks.fail(f"StateMap has no entry for {', '.join(missing)}")
        src_index = {s: i for i, s in enumerate(source)}
        masks = [bits_to_mask(src_index[m] for m in contents[i]) for i in range(len(names))]
    else:
        source = list(names)
        masks = [1 << i for i in range(len(names))]

    if len(set(masks)) != len(masks):
        raise ParseError("two DFTA states map to the same source subset")
    all_states = frozenset(masks)
    delta = []
    for sym, args, rhs in raw:
        pargs = tuple(all_states if a is None else frozenset(masks[i] for i in a) for a in args)
        dc = tuple(a is None for a in args)
        delta.append(ProductTransition(sym, pargs, masks[rhs], dc))
    return Dfta(
        sig,
        tuple(masks),
        frozenset(masks[i] for i in finals),
        tuple(delta),
        {m: names[i] for i, m in enumerate(masks)},
        tuple(source),
    )


def serialize_product(pa: ProductFta, name: str = "A") -> str:
    states = list(pa.states)
    if isinstance(pa, Dfta):
        width = len(pa.source_states)
        states.sort(key=lambda m: canonical_key(m, width))
    order = {s: i for i, s in enumerate(states)}
    out = [
        "Ops " + " ".join(f"{s.name}:{s.arity}" for s in pa.signature),
        "",
        f"Automaton {name}",
        "States " + " ".join(pa.name(s) for s in states),
        "Final States " + " ".join(pa.name(s) for s in states if s in pa.finals),
        "Transitions",
    ]
    for pt in pa.delta:
        if not pt.args:
            out.append(f"{pt.func.name} -> {pa.name(pt.rhs)}")
            continue
        parts = []
        for a, dc in zip(pt.args, pt.dontcare):
            if dc:
                parts.append("_")
            else:
                parts.append("{" + ",".join(pa.name(s) for s in sorted(a, key=order.__getitem__)) + "}")
        out.append(f"{pt.func.name}({','.join(parts)}) -> {pa.name(pt.rhs)}")
    if isinstance(pa, Dfta):
        out.append("StateMap")
        out.append("Source States " + " ".join(pa.source_states))
        for s in states:
            out.append(f"{pa.name(s)} = {pa.describe(s)}")
    return "\n".join(out) + "\n"


MODES = ("det", "det+dc", "det+compl", "det+compl+dc", "textbook")


@dataclass
class StatsRecord:
    name: str
    mode: str
    # Input sizes are absent only for inputs that could not be read.
    sizeQ: int | None
    sizeDelta: int | None
    sizeSigma: int | None
    sizeQd: int | None = None
    sizeDeltaPi: int | None = None
    estDeltaD: int | None = None
    exactCompletedDeltaD: int | None = None
    timeMillis: float | None = None
    timedOut: bool = False
    error: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=False)

    @classmethod
    def from_json(cls, line: str) -> "StatsRecord":
        return cls(**json.loads(line))

    @property
    def status(self) -> str:
        if self.timedOut:
            return "timeout"
        if self.error:
            return "error"
        return "ok"


def stats_record(name: str, mode: str, fta: Fta, dfta: Dfta | None = None, seconds=None, timed_out=False, error=None) -> StatsRecord:
    """Summarise one run.  Output sizes stay ``None`` when there is no result."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    rec = StatsRecord(
        name=name,
        mode=mode,
        sizeQ=len(fta.states),
        sizeDelta=len(fta.delta),
        sizeSigma=len(fta.signature),
        timeMillis=None if seconds is None else round(seconds * 1000.0, 3),
        timedOut=timed_out,
        error=error,
    )
    if dfta is not None:
        rec.sizeQd = len(dfta.states)
        rec.sizeDeltaPi = len(dfta.delta)
        rec.estDeltaD = estimate_expanded_count(dfta.delta)
        if "compl" in mode:
            rec.exactCompletedDeltaD = dfta.exact_completed_count
    return rec


def iter_records(text: str) -> Iterator[StatsRecord]:
    for line in text.splitlines():
        if line.strip():
            yield StatsRecord.from_json(line)
