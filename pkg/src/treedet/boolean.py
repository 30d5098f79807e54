"""Boolean operations on tree languages built on determinisation."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from .core import Fta, Transition, bits_to_mask
from .determinize import DetOptions, determinize, ensure_any, search_states
from .errors import ContractError
from .product import Dfta, ProductFta, ProductTransition

RENAME_SUFFIX = "#2"


@dataclass(frozen=True)
class InclusionVerdict:
    """Outcome of an inclusion or universality check.

    ``counterexample`` is a DFTA state (mask over ``source_states``) whose
    language witnesses the failure; present exactly when ``holds`` is false.
    """

    holds: bool
    counterexample: int | None = None
    source_states: tuple[str, ...] = ()

    def __post_init__(self):
        if self.holds != (self.counterexample is None):
            raise ValueError("counterexample must be given exactly when the check fails")

    def __bool__(self):
        return self.holds

    def describe(self) -> str | None:
        if self.counterexample is None:
            return None
        names = [s for i, s in enumerate(self.source_states) if self.counterexample >> i & 1]
        return "{" + ",".join(names) + "}"


def _check_signatures(a, b):
    if a.signature != b.signature:
        raise ContractError(f"signature mismatch: {a.signature!r} vs {b.signature!r}")


def complement(fta: Fta, opts: DetOptions | None = None) -> Dfta:
    """Complete DFTA accepting exactly the terms ``fta`` rejects."""
    base = opts or DetOptions()
    d = determinize(fta, replace(base, complete=True, states_only=False))
    return d.with_finals(s for s in d.states if s not in d.finals)


def _as_product(a) -> ProductFta:
    if isinstance(a, Fta):
        return ProductFta.from_fta(a)
    return a


def intersect_product(a1: Fta | ProductFta, a2: Fta | ProductFta) -> ProductFta:
    """Pair automaton whose transitions pair up product transitions symbol-wise.

    Only pairs reachable bottom-up are kept, and each argument set is cut
    down to reachable pairs; unreachable pairs accept nothing, so the
    language is unchanged.
    """
    p1, p2 = _as_product(a1), _as_product(a2)
    _check_signatures(p1, p2)
    reached: set = set()
    order: list = []
    pairs_by_func = {
        f: [(t1, t2) for t1 in p1.by_func.get(f, ()) for t2 in p2.by_func.get(f, ())]
        for f in p1.signature
    }

    def restrict(t1, t2, pool):
        args = []
        for r, s in zip(t1.args, t2.args):
            cut = frozenset((x, y) for x in r for y in s if (x, y) in pool)
            if not cut:
                return None
            args.append(cut)
        return tuple(args)

    changed = True
    while changed:
        changed = False
        for f in p1.signature:
            for t1, t2 in pairs_by_func[f]:
                target = (t1.rhs, t2.rhs)
                if target in reached:
                    continue
                if restrict(t1, t2, reached) is not None:
                    reached.add(target)
                    order.append(target)
                    changed = True

    delta = []
    for f in p1.signature:
        for t1, t2 in pairs_by_func[f]:
            args = restrict(t1, t2, reached)
            if args is not None:
                delta.append(ProductTransition(f, args, (t1.rhs, t2.rhs)))
    finals = frozenset(p for p in order if p[0] in p1.finals and p[1] in p2.finals)
    # Pair names must stay valid Timbuk identifiers and distinct from symbols.
    taken = {f.name for f in p1.signature}
    names = {}
    for p in order:
        name = f"{p1.name(p[0])}*{p2.name(p[1])}"
        while name in taken:
            name += RENAME_SUFFIX
        taken.add(name)
        names[p] = name
    return ProductFta(p1.signature, tuple(order), finals, tuple(delta), names)


def _disjoint_union(a1: Fta, a2: Fta) -> tuple[Fta, int, int]:
    """Union automaton plus masks of the first and second automaton's finals."""
    _check_signatures(a1, a2)
    taken = set(a1.states) | {s.name for s in a1.signature}
    renamed = []
    for name in a2.states:
        new = name + RENAME_SUFFIX
        while new in taken:
            new += RENAME_SUFFIX
        taken.add(new)
        renamed.append(new)
    off = len(a1.states)
    delta = set(a1.delta)
    for t in a2.delta:
        delta.add(Transition(t.func, tuple(a + off for a in t.args), t.rhs + off))
    finals1 = frozenset(a1.finals)
    finals2 = frozenset(q + off for q in a2.finals)
    union = Fta(a1.signature, a1.states + tuple(renamed), finals1 | finals2, frozenset(delta))
    return union, bits_to_mask(finals1), bits_to_mask(finals2)


def difference(a1: Fta, a2: Fta, opts: DetOptions | None = None, *, finals_from_union: bool = True) -> Dfta:
    """DFTA for ``L(a1) - L(a2)``.

    The union of both automata is determinised; accepting states are the
    ones meeting the union's finals (or only ``a1``'s finals when
    ``finals_from_union`` is false) minus those meeting ``a2``'s finals.
    """
    union, f1, f2 = _disjoint_union(a1, a2)
    d = determinize(union, opts)
    keep = f1 | f2 if finals_from_union else f1
    return d.with_finals(s for s in d.states if s & keep and not s & f2)


def included(a1: Fta, a2: Fta, opts: DetOptions | None = None) -> InclusionVerdict:
    """Decide ``L(a1) <= L(a2)`` from the states of the difference automaton.

    Exploration stops at the first state accepting something of ``a1``
    but nothing of ``a2``.
    """
    union, f1, f2 = _disjoint_union(a1, a2)
    hit = search_states(union, lambda s: bool(s & f1) and not s & f2, opts)
    return InclusionVerdict(hit is None, hit, union.states if hit is not None else ())


def universal(fta: Fta, opts: DetOptions | None = None) -> InclusionVerdict:
    """Decide whether ``fta`` accepts every term over its signature.

    Determinises with completion, states only, stopping at the first state
    that meets no final state.
    """
    base = opts or DetOptions()
    work = ensure_any(fta, base.any_name)
    finals = work.final_mask
    hit = search_states(work, lambda s: not s & finals, base)
    return InclusionVerdict(hit is None, hit, work.states if hit is not None else ())


def nonempty_intersection(fta: Fta, qs: Iterable[str], opts: DetOptions | None = None) -> bool:
    """Whether some term is accepted at every state named in ``qs``."""
    wanted = 0
    for name in qs:
        if name not in fta.index_of:
            raise ContractError(f"unknown state {name!r}")
        wanted |= 1 << fta.index_of[name]
    return search_states(fta, lambda s: s & wanted == wanted, opts) is not None
