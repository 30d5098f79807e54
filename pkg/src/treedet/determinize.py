"""Optimised determinisation producing product-form transitions.

Sets of input transitions are bit-masks over transition ids (the
position of the transition in ``Fta.sorted_delta``), sets of input states
are bit-masks over state indices.  The per-symbol, per-argument tables
kept while computing the states are reused to emit the transitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator

from .core import Fta, Symbol, Transition, canonical_key, iter_bits
from .errors import ContractError, ResourceLimitExceeded
from .limits import DEFAULT_MAX_TRANSITIONS, Deadline, default_max_states
from .product import Dfta, ProductTransition, dfta_from_states


@dataclass(frozen=True)
class DetOptions:
    complete: bool = False
    dontcare: bool = False
    states_only: bool = False
    max_states: int = field(default_factory=default_max_states)
    max_transitions: int = DEFAULT_MAX_TRANSITIONS
    timeout: float | None = None
    any_name: str = "any"

    def __post_init__(self):
        if self.dontcare and self.states_only:
            raise ContractError("dontcare detection needs transitions; incompatible with states_only")


class TransitionIndex:
    """Lookup of input transitions by symbol and by (symbol, position, state)."""

    def __init__(self, fta: Fta):
        self.fta = fta
        self.transitions = fta.sorted_delta
        n = len(fta.states)
        func_mask = self.func_mask = {f: 0 for f in fta.signature}
        arg_masks = self.arg_masks = {f: [[0] * n for _ in range(f.arity)] for f in fta.signature if f.arity}
        bit = 1
        for t in self.transitions:
            f = t.func
            func_mask[f] |= bit
            if t.args:
                rows = arg_masks[f]
                i = 0
                for q in t.args:
                    rows[i][q] |= bit
                    i += 1
            bit <<= 1
        self._rhs = [t.rhs for t in self.transitions]
        self._rhs_cache: dict[int, int] = {0: 0}

    def transitions_of(self, tmask: int) -> frozenset[Transition]:
        return frozenset(self.transitions[i] for i in iter_bits(tmask))

    def by_func(self, f: Symbol) -> frozenset[Transition]:
        return self.transitions_of(self.func_mask.get(f, 0))

    def by_func_arg_state(self, f: Symbol, i: int, q: int) -> frozenset[Transition]:
        """Transitions of ``f`` with state ``q`` at (0-based) argument ``i``."""
        return self.transitions_of(self.lhsf(f, i, q))

    def lhsf(self, f: Symbol, i: int, q: int) -> int:
        return self.arg_masks[f][i][q]

    def lhsf_set(self, f: Symbol, i: int, stateset: int) -> int:
        """Union of :meth:`lhsf` over the members of ``stateset``, as a mask."""
        row = self.arg_masks[f][i]
        out = 0
        for q in iter_bits(stateset):
            out |= row[q]
        return out

    def rhs_of(self, tmask: int) -> int:
        """State set (mask) of right-hand sides of the transitions in ``tmask``."""
        r = self._rhs_cache.get(tmask)
        if r is None:
            r = 0
            rhs = self._rhs
            m = tmask
            while m:
                low = m & -m
                r |= 1 << rhs[low.bit_length() - 1]
                m ^= low
            self._rhs_cache[tmask] = r
        return r


@dataclass
class ArgTable:
    """Per symbol and argument position: the distinct non-empty transition
    sets seen so far (``psi``) and which DFTA states produced each one
    (``inverse``).  Constants have no entry.
    """

    psi: dict[Symbol, list[list[int]]] = field(default_factory=dict)
    inverse: dict[Symbol, list[dict[int, list[int]]]] = field(default_factory=dict)
    complete: bool = False


def universal_state(fta: Fta) -> int | None:
    """A state ``q`` with ``f(q,...,q) -> q`` for every symbol, if any."""
    covered: dict[int, set] = {}
    for t in fta.delta:
        r = t.rhs
        for a in t.args:
            if a != r:
                break
        else:
            covered.setdefault(r, set()).add(t.func)
    need = len(fta.signature)
    for q in sorted(covered):
        if len(covered[q]) == need:
            return q
    return None


def add_any(fta: Fta, any_name: str = "any") -> Fta:
    """Add a non-final state ``any_name`` accepting every term."""
    if any_name in fta.index_of:
        raise ContractError(f"state {any_name!r} already exists")
    q = len(fta.states)
    extra = {Transition(f, (q,) * f.arity, q) for f in fta.signature}
    return Fta(fta.signature, fta.states + (any_name,), fta.finals, fta.delta | extra)


def ensure_any(fta: Fta, any_name: str = "any") -> Fta:
    """Return ``fta`` if it already has a universal state, else :func:`add_any`
    under ``any_name`` (primed until it is fresh)."""
    return _ensure_any(fta, any_name)[0]


def _ensure_any(fta: Fta, any_name: str) -> tuple[Fta, int]:
    q = universal_state(fta)
    if q is not None:
        return fta, q
    name = any_name
    while name in fta.index_of or name in fta.signature:
        name += "'"
    return add_any(fta, name), len(fta.states)


def _explore(index: TransitionIndex, tables: ArgTable, max_states: int, deadline: Deadline) -> Iterator[int]:
    """Generate the DFTA states, yielding each the moment it is found.

    Only tuples with at least one argument value new in this round are
    visited: for position ``i`` the value is new, earlier positions take
    values known before the round and later positions any value.
    """
    fta = index.fta
    sig = fta.signature
    seen: set[int] = set()
    order: list[int] = []
    rhs_of = index.rhs_of
    check = deadline.check

    def add(q0):
        seen.add(q0)
        order.append(q0)
        if len(order) > max_states:
            raise ResourceLimitExceeded(f"more than {max_states} DFTA states")

    for f in sig.constants:
        q0 = rhs_of(index.func_mask[f])
        if q0 and q0 not in seen:
            add(q0)
            yield q0

    work = []
    for f in sig:
        if f.arity:
            psi = tables.psi[f] = [[] for _ in range(f.arity)]
            inv = tables.inverse[f] = [{} for _ in range(f.arity)]
            work.append((psi, inv, index.arg_masks[f]))

    new = list(order)
    while new:
        check()
        mark = len(order)
        members = [(Q, list(iter_bits(Q))) for Q in new]
        for psi, inv, rows in work:
            check()
            phi = []
            for row, inv_i in zip(rows, inv):
                phi_i = []
                for Q, bits in members:
                    T = 0
                    for q in bits:
                        T |= row[q]
                    if T:
                        bucket = inv_i.get(T)
                        if bucket is None:
                            inv_i[T] = [Q]
                            phi_i.append(T)
                        else:
                            bucket.append(Q)
                phi.append(phi_i)

            n = len(phi)
            if n == 2:
                # Binary symbols inline the two cases: new value first
                # (second from everything), or old first and new second.
                cases = []
                if phi[0]:
                    cases.append((phi[0], psi[1] + phi[1]))
                if phi[1]:
                    cases.append((psi[0], phi[1]))
                for first, second in cases:
                    for a in first:
                        for b in second:
                            m = a & b
                            if m:
                                q0 = rhs_of(m)
                                if q0 not in seen:
                                    add(q0)
                                    yield q0
            else:
                for i in range(n):
                    if not phi[i]:
                        continue
                    lists = psi[:i] + [phi[i]] + [psi[j] + phi[j] for j in range(i + 1, n)]
                    for inter in _intersections(lists, deadline):
                        q0 = rhs_of(inter)
                        if q0 not in seen:
                            add(q0)
                            yield q0
            for p, ph in zip(psi, phi):
                p.extend(ph)
        new = order[mark:]


def _intersections(lists: list[list[int]], deadline: Deadline) -> Iterator[int]:
    """AND of one element from each list, pruning empty partial results."""
    if any(not lst for lst in lists):
        return
    if len(lists) == 1:
        yield from lists[0]
        return
    if len(lists) == 2:
        first, second = lists
        for a in first:
            for b in second:
                m = a & b
                if m:
                    yield m
        return
    last = len(lists) - 1

    def rec(k, acc):
        for x in lists[k]:
            m = acc & x
            if not m:
                continue
            if k == last:
                yield m
            else:
                yield from rec(k + 1, m)

    for a in lists[0]:
        deadline.check()
        yield from rec(1, a)


def _tuples(lists: list[list[int]]) -> Iterator[tuple[tuple[int, ...], int]]:
    """Like :func:`_intersections` but also yields the chosen elements."""
    if any(not lst for lst in lists):
        return
    if len(lists) == 2:
        first, second = lists
        for a in first:
            for b in second:
                m = a & b
                if m:
                    yield (a, b), m
        return
    last = len(lists) - 1

    def rec(k, acc, chosen):
        for x in lists[k]:
            m = acc & x
            if not m:
                continue
            if k == last:
                yield chosen + (x,), m
            else:
                yield from rec(k + 1, m, chosen + (x,))

    yield from rec(0, -1, ())


def compute_states(
    fta: Fta,
    opts: DetOptions | None = None,
    *,
    index: TransitionIndex | None = None,
    deadline: Deadline | None = None,
    complete: bool | None = None,
) -> tuple[tuple[int, ...], ArgTable]:
    """DFTA states of ``fta`` in canonical order, plus the argument tables.

    ``complete`` says whether ``fta`` has a universal state; it is worked
    out when not given.
    """
    opts = opts or DetOptions()
    index = index or TransitionIndex(fta)
    deadline = deadline or Deadline(opts.timeout)
    if complete is None:
        complete = universal_state(fta) is not None
    tables = ArgTable(complete=complete)
    found = list(_explore(index, tables, opts.max_states, deadline))
    width = len(fta.states)
    return tuple(sorted(found, key=lambda m: canonical_key(m, width))), tables


def search_states(fta: Fta, predicate: Callable[[int], bool], opts: DetOptions | None = None) -> int | None:
    """First DFTA state (in discovery order) satisfying ``predicate``.

    Stops exploring as soon as one is found.
    """
    opts = opts or DetOptions()
    index = TransitionIndex(fta)
    tables = ArgTable()
    for q in _explore(index, tables, opts.max_states, Deadline(opts.timeout)):
        if predicate(q):
            return q
    return None


@dataclass(frozen=True)
class Deciding:
    position: int
    transitions: int  # mask of input transitions shared by these argument states
    states: frozenset[int]
    rhs: int


def detect_deciding(
    f: Symbol,
    tables: ArgTable,
    states,
    index: TransitionIndex,
    *,
    partial_ok: bool = False,
) -> list[Deciding]:
    """Argument values of ``f`` that on their own fix the target state.

    The general test applies at every arity; for binary symbols a second
    test (singleton target, non-empty overlap with every value of the
    other argument) is tried on what remains.  Both are sound only when
    every DFTA state has a transition set at every position, which holds
    for complete DFTAs; ``partial_ok`` waives the check for callers that
    restrict the other positions accordingly.
    """
    if not tables.complete and not partial_ok:
        raise ContractError("deciding-argument detection requires a complete DFTA")
    if f.arity == 0:
        return []
    psi = tables.psi.get(f)
    if not psi or any(not p for p in psi):
        return []
    n = f.arity
    rhs_of = index.rhs_of
    inv = tables.inverse[f]

    meet = []
    for p in psi:
        m = -1
        for T in p:
            m &= T
        meet.append(m)

    found: list[Deciding] = []
    taken = [set() for _ in range(n)]
    for i in range(n):
        others = -1
        for j in range(n):
            if j != i:
                others &= meet[j]
        for T in psi[i]:
            r = rhs_of(T)
            if rhs_of(T & others) == r:
                found.append(Deciding(i, T, frozenset(inv[i][T]), r))
                taken[i].add(T)
    if n == 2:
        for i in range(2):
            other = psi[1 - i]
            for T in psi[i]:
                if T in taken[i]:
                    continue
                r = rhs_of(T)
                if r & (r - 1) == 0 and all(T & D for D in other):
                    found.append(Deciding(i, T, frozenset(inv[i][T]), r))
                    taken[i].add(T)
    return found


def gen_product_transitions(
    fta: Fta,
    states,
    tables: ArgTable,
    opts: DetOptions | None = None,
    *,
    index: TransitionIndex | None = None,
    deadline: Deadline | None = None,
) -> list[ProductTransition]:
    """Product transitions of the DFTA whose states were computed by
    :func:`compute_states` on the same ``fta``."""
    opts = opts or DetOptions()
    index = index or TransitionIndex(fta)
    deadline = deadline or Deadline(opts.timeout)
    rhs_of = index.rhs_of
    all_states = frozenset(states)
    out: list[ProductTransition] = []

    def emit(pt):
        out.append(pt)
        if len(out) > opts.max_transitions:
            raise ResourceLimitExceeded(f"more than {opts.max_transitions} product transitions")

    for f in fta.signature:
        deadline.check()
        if f.arity == 0:
            q0 = rhs_of(index.func_mask[f])
            if q0:
                emit(ProductTransition(f, (), q0))
            continue
        psi = tables.psi.get(f)
        if not psi or any(not p for p in psi):
            continue
        inv = tables.inverse[f]
        argsets = [{T: frozenset(qs) for T, qs in inv_i.items()} for inv_i in inv]
        lists = psi
        if opts.dontcare:
            support = [frozenset().union(*a.values()) for a in argsets]
            removed = [set() for _ in psi]
            for d in detect_deciding(f, tables, states, index, partial_ok=True):
                args = tuple(argsets[j][d.transitions] if j == d.position else support[j] for j in range(f.arity))
                mask = tuple(j != d.position and support[j] == all_states for j in range(f.arity))
                emit(ProductTransition(f, args, d.rhs, mask))
                removed[d.position].add(d.transitions)
            lists = [[T for T in p if T not in removed[i]] for i, p in enumerate(psi)]
        plain = (False,) * f.arity
        limit = opts.max_transitions
        for chosen, inter in _tuples(lists):
            args = tuple([argsets[i][T] for i, T in enumerate(chosen)])
            out.append(ProductTransition(f, args, rhs_of(inter), plain))
            if len(out) > limit:
                raise ResourceLimitExceeded(f"more than {limit} product transitions")
    return out


def determinize(fta: Fta, opts: DetOptions | None = None) -> Dfta:
    """Determinise ``fta``, optionally completing it, with product-form output."""
    opts = opts or DetOptions()
    deadline = Deadline(opts.timeout)
    if opts.complete:
        work, complete = _ensure_any(fta, opts.any_name)[0], True
    else:
        work, complete = fta, None
    index = TransitionIndex(work)
    states, tables = compute_states(work, opts, index=index, deadline=deadline, complete=complete)
    delta = []
    if not opts.states_only:
        delta = gen_product_transitions(work, states, tables, opts, index=index, deadline=deadline)
    return dfta_from_states(
        work.signature,
        work.states,
        states,
        work.final_mask,
        delta,
        completed=tables.complete,
        presorted=True,
    )
