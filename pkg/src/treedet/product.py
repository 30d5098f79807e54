"""Automata whose transitions are in product form.

A product transition ``f(S1,...,Sn) -> q`` stands for every plain
transition ``f(q1,...,qn) -> q`` with ``qi`` drawn from ``Si``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Sequence

from .core import Fta, Signature, Symbol, Term, Transition, canonical_key, iter_bits


@dataclass(frozen=True)
class ProductTransition:
    func: Symbol
    args: tuple[frozenset, ...] = ()
    rhs: Hashable = None
    # True at positions written "_": the argument is the whole state set.
    dontcare: tuple[bool, ...] = ()

    def __post_init__(self):
        if not self.dontcare:
            object.__setattr__(self, "dontcare", (False,) * len(self.args))
        if len(self.args) != self.func.arity or len(self.dontcare) != len(self.args):
            raise ValueError(f"product transition for {self.func} has wrong shape")
        for a in self.args:
            if not a:
                raise ValueError("product transition arguments must be non-empty")

    @property
    def size(self) -> int:
        """Number of plain transitions denoted."""
        return math.prod(len(a) for a in self.args)

    def expand(self) -> Iterator[Transition]:
        for combo in itertools.product(*(sorted(a, key=repr) for a in self.args)):
            yield Transition(self.func, combo, self.rhs)


def expand(pd: Iterable[ProductTransition]) -> frozenset[Transition]:
    """Union of the Cartesian expansions, duplicates removed."""
    out = set()
    for pt in pd:
        out.update(pt.expand())
    return frozenset(out)


def explicit(pa: "ProductFta") -> "ProductFta":
    """Same automaton with every product transition expanded into singletons.

    Transitions come out sorted by symbol, then argument and target states
    in the automaton's state order.
    """
    pos = {s: i for i, s in enumerate(pa.states)}
    plain = sorted(
        expand(pa.delta),
        key=lambda t: (pa.signature.position(t.func), tuple(pos[a] for a in t.args), pos[t.rhs]),
    )
    delta = tuple(ProductTransition(t.func, tuple(frozenset((a,)) for a in t.args), t.rhs) for t in plain)
    return replace(pa, delta=delta)


def estimate_expanded_count(pd: Iterable[ProductTransition]) -> int:
    """Sum over transitions of the product of argument-set sizes.

    Overlapping product transitions are counted more than once, so this
    is an upper bound on ``len(expand(pd))``.
    """
    return sum(pt.size for pt in pd)


@dataclass(frozen=True, eq=False)
class ProductFta:
    """An automaton over arbitrary hashable state labels with product transitions.

    ``names`` maps each label to its display name.
    """

    signature: Signature
    states: tuple
    finals: frozenset
    delta: tuple[ProductTransition, ...]
    names: dict = field(default_factory=dict)

    @classmethod
    def from_fta(cls, fta: Fta) -> "ProductFta":
        delta = tuple(
            ProductTransition(t.func, tuple(frozenset((a,)) for a in t.args), t.rhs)
            for t in fta.sorted_delta
        )
        return cls(
            fta.signature,
            tuple(range(len(fta.states))),
            frozenset(fta.finals),
            delta,
            dict(enumerate(fta.states)),
        )

    def name(self, state) -> str:
        return self.names.get(state, str(state))

    @cached_property
    def by_func(self) -> dict[Symbol, tuple[ProductTransition, ...]]:
        out = {s: [] for s in self.signature}
        for pt in self.delta:
            out.setdefault(pt.func, []).append(pt)
        return {s: tuple(v) for s, v in out.items()}

    def step(self, func: Symbol, child_sets: Sequence[frozenset]) -> frozenset:
        """Right-hand sides reachable from children evaluating to ``child_sets``."""
        out = set()
        for pt in self.by_func.get(func, ()):
            if pt.rhs in out:
                continue
            if all(not a.isdisjoint(s) for a, s in zip(pt.args, child_sets)):
                out.add(pt.rhs)
        return frozenset(out)

    def eval_states(self, term: Term) -> frozenset:
        cache = {}
        for sub in term.subterms():
            if id(sub) not in cache:
                cache[id(sub)] = self.step(sub.symbol, [cache[id(c)] for c in sub.children])
        return cache[id(term)]

    def accepts(self, term: Term) -> bool:
        return not self.eval_states(term).isdisjoint(self.finals)

    def expanded(self) -> frozenset[Transition]:
        return expand(self.delta)

    def productive_states(self) -> set:
        """States that accept at least one term, by bottom-up saturation."""
        reached = set()
        changed = True
        while changed:
            changed = False
            for pt in self.delta:
                if pt.rhs not in reached and all(not a.isdisjoint(reached) for a in pt.args):
                    reached.add(pt.rhs)
                    changed = True
        return reached

    def is_empty(self) -> bool:
        return self.productive_states().isdisjoint(self.finals)

    def same_structure(self, other: "ProductFta") -> bool:
        """Equality up to the choice of state labels, via display names."""
        def view(a):
            n = a.name
            return (
                a.signature,
                sorted(n(s) for s in a.states),
                sorted(n(s) for s in a.finals),
                sorted(
                    (
                        a.signature.position(pt.func),
                        tuple(tuple(sorted(n(s) for s in arg)) for arg in pt.args),
                        n(pt.rhs),
                        pt.dontcare,
                    )
                    for pt in a.delta
                ),
            )

        return view(self) == view(other)


@dataclass(frozen=True, eq=False)
class Dfta(ProductFta):
    """Result of determinisation.

    States are bit-masks over ``source_states``; ``names`` assigns fresh
    display names ``d0, d1, ...`` in canonical order.
    """

    source_states: tuple[str, ...] = ()
    completed: bool = False

    def members(self, state: int) -> list[str]:
        return [self.source_states[i] for i in iter_bits(state)]

    def describe(self, state: int) -> str:
        return "{" + ",".join(self.members(state)) + "}"

    def state_by_members(self, names: Iterable[str]) -> int | None:
        """The DFTA state whose subset is exactly ``names``, if present."""
        idx = {n: i for i, n in enumerate(self.source_states)}
        mask = 0
        for n in names:
            mask |= 1 << idx[n]
        return mask if mask in self.names else None

    @property
    def exact_completed_count(self) -> int:
        """Number of plain transitions of a complete DFTA with these states."""
        k = len(self.states)
        return sum(k**f.arity for f in self.signature)

    def with_finals(self, finals: Iterable[int]) -> "Dfta":
        return Dfta(
            self.signature,
            self.states,
            frozenset(finals),
            self.delta,
            self.names,
            self.source_states,
            self.completed,
        )

    def same_structure(self, other: ProductFta) -> bool:
        if not super().same_structure(other):
            return False
        if isinstance(other, Dfta):
            mine = {self.name(s): set(self.members(s)) for s in self.states}
            theirs = {other.name(s): set(other.members(s)) for s in other.states}
            return mine == theirs
        return True


def dfta_from_states(signature, source_states, states, finals_mask, delta, completed=False, presorted=False) -> Dfta:
    """Assemble a :class:`Dfta`, ordering states canonically and naming them.

    ``presorted`` skips the sort when ``states`` is already canonical.
    """
    width = len(source_states)
    if presorted:
        ordered = tuple(states)
    else:
        ordered = tuple(sorted(states, key=lambda m: canonical_key(m, width)))
    names = {m: f"d{i}" for i, m in enumerate(ordered)}
    finals = frozenset(m for m in ordered if m & finals_mask)
    return Dfta(signature, ordered, finals, tuple(delta), names, tuple(source_states), completed)


def epsilon_form(pa: ProductFta):
    """Replace product transitions by plain ones over fresh states plus epsilon moves.

    Returns ``(fresh, plain, eps)``: the fresh state labels in creation
    order, plain transitions over original and fresh labels, and epsilon
    pairs ``(q, s)`` meaning ``q -> s``.  Only non-singleton arguments get
    a fresh state.
    """
    fresh, plain, eps = [], [], []
    for k, pt in enumerate(pa.delta):
        args = []
        for i, arg in enumerate(pt.args):
            if len(arg) == 1:
                args.append(next(iter(arg)))
                continue
            s = ("eps", k, i)
            fresh.append(s)
            args.append(s)
            eps.extend((q, s) for q in arg)
        plain.append(Transition(pt.func, tuple(args), pt.rhs))
    return fresh, plain, eps


def defactor(pa: ProductFta, *, keep_fresh: bool = False) -> Fta:
    """Plain FTA with the same language as ``pa``.

    Goes through :func:`epsilon_form` and eliminates each epsilon move
    ``q -> s`` by substituting ``q`` for ``s`` wherever ``s`` is consumed.
    Fresh states have no incoming transitions afterwards; they and their
    transitions are dropped unless ``keep_fresh`` is set.
    """
    fresh, plain, eps = epsilon_form(pa)
    sources = {}
    for q, s in eps:
        sources.setdefault(s, []).append(q)
    fresh_set = set(fresh)

    labels = list(pa.states)
    if keep_fresh:
        labels += fresh
    index = {lab: i for i, lab in enumerate(labels)}
    taken = {pa.name(s) for s in pa.states}
    display = [pa.name(s) for s in pa.states]
    if keep_fresh:
        counter = itertools.count(1)
        for _ in fresh:
            while True:
                cand = f"s{next(counter)}"
                if cand not in taken and cand not in pa.signature:
                    break
            taken.add(cand)
            display.append(cand)

    delta = set()
    for t in plain:
        if keep_fresh:
            delta.add(Transition(t.func, tuple(index[a] for a in t.args), index[t.rhs]))
        choices = [sources[a] if a in fresh_set else [a] for a in t.args]
        for combo in itertools.product(*choices):
            delta.add(Transition(t.func, tuple(index[a] for a in combo), index[t.rhs]))
    return Fta(pa.signature, tuple(display), frozenset(index[q] for q in pa.finals), frozenset(delta))
