"""Generated automata: the typed-lists scaling family and small random FTAs."""

from __future__ import annotations

import random

from .core import Fta, Signature, Symbol, Transition
from .determinize import add_any


def synth_family(k: int) -> Fta:
    """Lists over ``k`` element types.

    Element constants ``c1..ck`` go to ``t1..tk``; ``nil`` is a list of
    every type; ``cons(ti, li) -> li``.  Final states are the list states
    and a universal state ``any`` is included.  The DFTA has ``2k+2``
    states for ``k >= 2``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    sig = Signature([*((f"c{i}", 0) for i in range(1, k + 1)), ("nil", 0), ("cons", 2)])
    elems = [f"t{i}" for i in range(1, k + 1)]
    lists = [f"l{i}" for i in range(1, k + 1)]
    rules = []
    for i in range(k):
        rules.append((f"c{i + 1}", (), elems[i]))
        rules.append(("nil", (), lists[i]))
        rules.append(("cons", (elems[i], lists[i]), lists[i]))
    for f in sig:
        rules.append((f.name, ("any",) * f.arity, "any"))
    return Fta.build(sig, elems + lists + ["any"], lists, rules)


def random_signature(rng: random.Random, max_symbols: int = 4, max_arity: int = 2) -> Signature:
    """At least one constant; remaining symbols get arities in ``0..max_arity``."""
    count = rng.randint(1, max_symbols)
    arities = [0] + [rng.randint(0, max_arity) for _ in range(count - 1)]
    rng.shuffle(arities)
    return Signature(Symbol(f"f{i}", a) for i, a in enumerate(arities))


def random_fta(
    rng: random.Random,
    *,
    signature: Signature | None = None,
    max_states: int = 6,
    max_symbols: int = 4,
    max_arity: int = 2,
    with_any: bool = False,
    density: float = 1.5,
) -> Fta:
    """A small random FTA.

    ``density`` is roughly the number of transitions per state and symbol.
    With ``with_any`` a universal non-final state is added on top.
    """
    sig = signature or random_signature(rng, max_symbols, max_arity)
    n = rng.randint(1, max_states)
    states = tuple(f"q{i}" for i in range(n))
    finals = frozenset(q for q in range(n) if rng.random() < 0.5)
    delta = set()
    for f in sig:
        count = rng.randint(0, max(1, round(density * n)))
        for _ in range(count):
            args = tuple(rng.randrange(n) for _ in range(f.arity))
            delta.add(Transition(f, args, rng.randrange(n)))
    fta = Fta(sig, states, finals, frozenset(delta))
    if with_any:
        fta = add_any(fta, "any")
    return fta
