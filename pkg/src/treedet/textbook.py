"""Reference subset construction with explicit transitions.

This is deliberately the unoptimised algorithm: every pass of the main
loop re-examines all tuples of known states.  It is used as the oracle
for the optimised version and as the benchmark baseline.
"""

from __future__ import annotations

import itertools
from typing import Sequence

from .core import Fta, Symbol
from .errors import ResourceLimitExceeded
from .limits import DEFAULT_MAX_TRANSITIONS, Deadline, default_max_states
from .product import Dfta, ProductTransition, dfta_from_states

_CHECK_EVERY = 4096


def q0_of_tuple(fta: Fta, f: Symbol, args: Sequence[int]) -> int:
    """Set of ``q0`` such that ``f(q1..qn) -> q0`` with each ``qi`` in ``args[i]``.

    ``args`` are state-set bit-masks; so is the result (possibly 0).
    """
    out = 0
    for t in fta.by_func.get(f, ()):
        for q, allowed in zip(t.args, args):
            if not allowed >> q & 1:
                break
        else:
            out |= 1 << t.rhs
    return out


def determinize_textbook(
    fta: Fta,
    *,
    max_states: int | None = None,
    max_transitions: int = DEFAULT_MAX_TRANSITIONS,
    timeout: float | None = None,
) -> Dfta:
    """Determinise ``fta`` with the classical construction.

    States are computed to a fixpoint first (constants seeded before the
    loop); transitions come from one further pass over the final states.
    Tuples whose target set is empty produce nothing.
    """
    from .determinize import universal_state

    if max_states is None:
        max_states = default_max_states()
    deadline = Deadline(timeout)
    sig = fta.signature
    seen: set[int] = set()
    states: list[int] = []

    def add(q0):
        if q0 not in seen:
            seen.add(q0)
            states.append(q0)
            if len(states) > max_states:
                raise ResourceLimitExceeded(f"more than {max_states} DFTA states")

    for f in sig.constants:
        q0 = q0_of_tuple(fta, f, ())
        if q0:
            add(q0)

    ticks = 0
    while True:
        deadline.check()
        old = list(states)
        for f in sig:
            if f.arity == 0:
                continue
            for args in itertools.product(old, repeat=f.arity):
                ticks += 1
                if ticks % _CHECK_EVERY == 0:
                    deadline.check()
                q0 = q0_of_tuple(fta, f, args)
                if q0:
                    add(q0)
        if len(states) == len(old):
            break

    delta = []
    for f in sig:
        for args in itertools.product(states, repeat=f.arity):
            ticks += 1
            if ticks % _CHECK_EVERY == 0:
                deadline.check()
            q0 = q0_of_tuple(fta, f, args)
            if q0:
                delta.append(ProductTransition(f, tuple(frozenset((a,)) for a in args), q0))
                if len(delta) > max_transitions:
                    raise ResourceLimitExceeded(f"more than {max_transitions} DFTA transitions")

    return dfta_from_states(
        sig,
        fta.states,
        states,
        fta.final_mask,
        delta,
        completed=universal_state(fta) is not None,
    )
