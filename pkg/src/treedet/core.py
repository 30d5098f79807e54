"""Finite tree automata over ranked alphabets: signatures, terms, runs.

States of an :class:`Fta` are dense integers ``0..len(states)-1``; the
``states`` tuple carries their display names.  Sets of states are plain
Python ints used as bit-vectors (bit ``i`` set means state ``i`` is a
member), which keeps unions, intersections and equality cheap.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import ContractError, ParseError, ResourceLimitExceeded

DEFAULT_COMPLETENESS_BOUND = 10**7


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_to_mask(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def canonical_key(mask: int, width: int) -> int:
    """Sort key putting sets that contain lower-indexed states first.

    Sorting ascending by this key orders bit-vectors lexicographically,
    most significant position being state 0, largest first.
    """
    if not width:
        return 0
    return -int(format(mask, f"0{width}b")[::-1], 2)


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # Symbols key most lookup tables; hash once instead of per lookup.
        object.__setattr__(self, "_hash", hash((self.name, self.arity)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return f"{self.name}:{self.arity}"


class Signature:
    """An ordered ranked alphabet.  Symbol names are unique."""

    __slots__ = ("symbols", "_by_name", "_order")

    def __init__(self, symbols: Iterable[Symbol | tuple[str, int]] = ()):
        syms = []
        by_name = {}
        for s in symbols:
            if not isinstance(s, Symbol):
                s = Symbol(*s)
            if not s.name:
                raise ValueError("symbol name must be non-empty")
            if s.arity < 0:
                raise ValueError(f"negative arity for {s.name}")
            if s.name in by_name:
                raise ValueError(f"symbol {s.name} declared twice")
            by_name[s.name] = s
            syms.append(s)
        self.symbols = tuple(syms)
        self._by_name = by_name
        self._order = {s: i for i, s in enumerate(syms)}

    @classmethod
    def of(cls, text: str) -> "Signature":
        """``Signature.of("nil:0 cons:2")``."""
        pairs = []
        for item in text.split():
            name, _, arity = item.rpartition(":")
            pairs.append((name, int(arity)))
        return cls(pairs)

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, item):
        if isinstance(item, Symbol):
            return self._by_name.get(item.name) == item
        return item in self._by_name

    def __getitem__(self, name: str) -> Symbol:
        return self._by_name[name]

    def get(self, name, default=None):
        return self._by_name.get(name, default)

    def position(self, symbol: Symbol) -> int:
        return self._order[symbol]

    @property
    def constants(self) -> tuple[Symbol, ...]:
        return tuple(s for s in self.symbols if s.arity == 0)

    @property
    def max_arity(self) -> int:
        return max((s.arity for s in self.symbols), default=0)

    def __eq__(self, other):
        return isinstance(other, Signature) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"Signature.of({' '.join(map(str, self.symbols))!r})"


@dataclass(frozen=True)
class Term:
    symbol: Symbol
    children: tuple["Term", ...] = ()

    def __post_init__(self):
        if len(self.children) != self.symbol.arity:
            raise ContractError(
                f"{self.symbol.name} has arity {self.symbol.arity}, "
                f"got {len(self.children)} children"
            )

    @cached_property
    def depth(self) -> int:
        return 1 + max((c.depth for c in self.children), default=0)

    def subterms(self) -> Iterator["Term"]:
        """Post-order traversal, children before parents."""
        for c in self.children:
            yield from c.subterms()
        yield self

    def __str__(self):
        if not self.children:
            return self.symbol.name
        return f"{self.symbol.name}({','.join(map(str, self.children))})"


_TERM_TOKEN = re.compile(r"\s*(?:([(),])|([^\s(),]+))")


def parse_term(signature: Signature, text: str) -> Term:
    """Parse ``f(a,g(b))`` notation.  Constants may be written ``a`` or ``a()``."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TERM_TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", 1, pos + 1)
        tokens.append((m.group(1) or m.group(2), m.start() + 1))
        pos = m.end()
    tokens.append(("", len(text) + 1))
    i = 0

    def parse():
        nonlocal i
        name, col = tokens[i]
        if name in ("(", ")", ",", ""):
            raise ParseError(f"expected symbol, got {name!r}", 1, col)
        sym = signature.get(name)
        if sym is None:
            raise ParseError(f"unknown symbol {name!r}", 1, col)
        i += 1
        children = []
        if tokens[i][0] == "(":
            i += 1
            if tokens[i][0] != ")":
                children.append(parse())
                while tokens[i][0] == ",":
                    i += 1
                    children.append(parse())
            if tokens[i][0] != ")":
                raise ParseError("expected ')'", 1, tokens[i][1])
            i += 1
        if len(children) != sym.arity:
            raise ParseError(f"{name} expects {sym.arity} arguments, got {len(children)}", 1, col)
        return Term(sym, tuple(children))

    term = parse()
    if tokens[i][0] != "":
        raise ParseError(f"trailing input {tokens[i][0]!r}", 1, tokens[i][1])
    return term


@dataclass(frozen=True)
class Transition:
    """``func(args...) -> rhs``.  Arguments and rhs are state labels."""

    func: Symbol
    args: tuple = ()
    rhs: object = None

    def __str__(self):
        if not self.args:
            return f"{self.func.name} -> {self.rhs}"
        return f"{self.func.name}({','.join(map(str, self.args))}) -> {self.rhs}"


@dataclass(frozen=True)
class Diagnostic:
    invariant: str
    element: str

    def __str__(self):
        return f"{self.invariant}: {self.element}"


@dataclass(frozen=True)
class Fta:
    """A bottom-up tree automaton.

    ``states`` holds display names; everything else refers to states by
    their position in that tuple.
    """

    signature: Signature
    states: tuple[str, ...]
    finals: frozenset[int]
    delta: frozenset[Transition] = field(default_factory=frozenset)

    @classmethod
    def build(cls, signature, states, finals, rules, *, check=True) -> "Fta":
        """Construct from names.

        ``rules`` is an iterable of ``(symbol, (arg, ...), rhs)`` triples of
        names.  Unknown names raise ``ContractError`` when ``check`` is set.
        """
        if isinstance(signature, str):
            signature = Signature.of(signature)
        states = tuple(states)
        index = {name: i for i, name in enumerate(states)}

        def sid(name):
            if name not in index:
                raise ContractError(f"unknown state {name!r}")
            return index[name]

        delta = set()
        for fname, args, rhs in rules:
            sym = signature.get(fname)
            if sym is None:
                raise ContractError(f"unknown symbol {fname!r}")
            targs = tuple(sid(a) for a in args)
            if check and len(targs) != sym.arity:
                raise ContractError(f"{fname} has arity {sym.arity}, got {len(targs)} arguments")
            delta.add(Transition(sym, targs, sid(rhs)))
        return cls(signature, states, frozenset(sid(q) for q in finals), frozenset(delta))

    @cached_property
    def index_of(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.states)}

    @cached_property
    def by_func(self) -> dict[Symbol, tuple[Transition, ...]]:
        out = {s: [] for s in self.signature}
        for t in self.sorted_delta:
            out.setdefault(t.func, []).append(t)
        return {s: tuple(ts) for s, ts in out.items()}

    @cached_property
    def sorted_delta(self) -> tuple[Transition, ...]:
        """Transitions in declaration order of symbols, then by argument indices."""
        pos = {s: i for i, s in enumerate(self.signature)}
        return tuple(sorted(self.delta, key=lambda t: (pos.get(t.func, len(pos)), t.func.name, t.args, t.rhs)))

    @property
    def final_mask(self) -> int:
        return bits_to_mask(self.finals)

    def state_names(self, mask: int) -> list[str]:
        return [self.states[i] for i in iter_bits(mask)]

    def step(self, func: Symbol, child_sets: Sequence[frozenset[int]]) -> frozenset[int]:
        """States reachable in one step from children that reach ``child_sets``."""
        return frozenset(
            t.rhs
            for t in self.by_func.get(func, ())
            if all(q in s for q, s in zip(t.args, child_sets))
        )

    def __str__(self):
        lines = [f"Ops {' '.join(map(str, self.signature))}"]
        lines.append(f"States {' '.join(self.states)}")
        lines.append(f"Final States {' '.join(self.states[q] for q in sorted(self.finals))}")
        for t in self.sorted_delta:
            lines.append("  " + str(Transition(t.func, tuple(self.states[a] for a in t.args), self.states[t.rhs])))
        return "\n".join(lines)


def validate(fta: Fta) -> list[Diagnostic]:
    """Check the structural invariants of ``fta`` and list every violation."""
    out = []
    n = len(fta.states)
    seen = set()
    for i, name in enumerate(fta.states):
        if not name:
            out.append(Diagnostic("state name non-empty", f"state #{i}"))
        elif name in seen:
            out.append(Diagnostic("state names unique", name))
        seen.add(name)
        if name in fta.signature:
            out.append(Diagnostic("states and symbols disjoint", name))
    for q in sorted(fta.finals):
        if not 0 <= q < n:
            out.append(Diagnostic("finals subset of states", f"final state #{q}"))
    for t in fta.sorted_delta:
        if t.func not in fta.signature:
            out.append(Diagnostic("transition symbol in signature", str(t)))
        if len(t.args) != t.func.arity:
            out.append(Diagnostic("transition arity matches symbol", str(t)))
        for q in (*t.args, t.rhs):
            if not (isinstance(q, int) and 0 <= q < n):
                out.append(Diagnostic("transition states in automaton", f"{t} uses #{q}"))
                break
    return out


def eval_states(fta: Fta, term: Term) -> frozenset[int]:
    """Exactly the states ``q`` with ``term =>* q``."""
    cache: dict[int, frozenset[int]] = {}
    for sub in term.subterms():
        key = id(sub)
        if key in cache:
            continue
        if sub.symbol not in fta.signature:
            raise ContractError(f"symbol {sub.symbol} not in signature")
        cache[key] = fta.step(sub.symbol, [cache[id(c)] for c in sub.children])
    return cache[id(term)]


def accepts(fta: Fta, term: Term) -> bool:
    return not eval_states(fta, term).isdisjoint(fta.finals)


def is_deterministic(automaton: Fta | Iterable[Transition]) -> bool:
    """No two transitions share a left-hand side."""
    delta = automaton.delta if isinstance(automaton, Fta) else automaton
    seen = set()
    for t in delta:
        lhs = (t.func, t.args)
        if lhs in seen:
            return False
        seen.add(lhs)
    return True


def is_complete(fta: Fta, bound: int = DEFAULT_COMPLETENESS_BOUND) -> bool:
    """Every symbol/state tuple has at least one transition.

    Checking is exponential in arity; raises ``ResourceLimitExceeded`` when
    the number of tuples exceeds ``bound``.
    """
    n = len(fta.states)
    total = sum(n**s.arity for s in fta.signature)
    if total > bound:
        raise ResourceLimitExceeded(f"completeness check needs {total} tuples (bound {bound})")
    covered = {(t.func, t.args) for t in fta.delta}
    for f in fta.signature:
        for args in itertools.product(range(n), repeat=f.arity):
            if (f, args) not in covered:
                return False
    return True


def enumerate_terms(signature: Signature, max_depth: int) -> list[Term]:
    """All terms of depth at most ``max_depth``, each once.

    Ordered by depth, then symbol declaration order, then children in the
    order they were themselves produced.
    """
    if max_depth < 1:
        raise ContractError("max_depth must be at least 1")
    upto: list[Term] = [Term(c) for c in signature.constants]
    for depth in range(2, max_depth + 1):
        layer = []
        for f in signature:
            if f.arity == 0:
                continue
            for children in itertools.product(upto, repeat=f.arity):
                if any(c.depth == depth - 1 for c in children):
                    layer.append(Term(f, children))
        if not layer:
            break
        upto = upto + layer
    return upto
