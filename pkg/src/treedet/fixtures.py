"""Small hand-written automata used in examples, docs and tests."""

from __future__ import annotations

from .core import Fta
from .timbuk import parse_timbuk

# Lists of arbitrary terms and lists of lists, with a universal state.
LISTS_TIMBUK = """\
Ops nil:0 cons:2 0:0

Automaton lists
States list listlist any
Final States list listlist
Transitions
nil -> list
cons(any,list) -> list
nil -> listlist
cons(list,listlist) -> listlist
nil -> any
cons(any,any) -> any
0 -> any
"""

# Lists of Peano numbers; deliberately incomplete.
NUMLIST_TIMBUK = """\
Ops nil:0 cons:2 0:0 s:1

Automaton numlist
States list num
Final States list
Transitions
nil -> list
cons(num,list) -> list
0 -> num
s(num) -> num
"""


def lists_fta(final: str | None = None) -> Fta:
    """The lists automaton; ``final`` keeps only that state accepting."""
    fta = parse_timbuk(LISTS_TIMBUK)
    if final is None:
        return fta
    return Fta(fta.signature, fta.states, frozenset({fta.index_of[final]}), fta.delta)


def numlist_fta() -> Fta:
    return parse_timbuk(NUMLIST_TIMBUK)


def with_final(text: str, final: str) -> str:
    """Timbuk ``text`` with its ``Final States`` line replaced by ``final``."""
    out = []
    for line in text.splitlines():
        out.append("Final States " + final if line.startswith("Final States") else line)
    return "\n".join(out) + "\n"
