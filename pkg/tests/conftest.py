"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the library's own evaluation code:
runs are recomputed straight from the transition sets.
"""

from __future__ import annotations

import itertools
import random

import pytest

from treedet.core import Fta, Signature, Term
from treedet.fixtures import LISTS_TIMBUK, NUMLIST_TIMBUK, lists_fta, numlist_fta, with_final
from treedet.product import ProductFta
from treedet.synth import random_fta


@pytest.fixture
def lists():
    return lists_fta()


@pytest.fixture
def numlist():
    return numlist_fta()


@pytest.fixture
def corpus_dir(tmp_path):
    (tmp_path / "lists.timbuk").write_text(LISTS_TIMBUK)
    (tmp_path / "numlist.timbuk").write_text(NUMLIST_TIMBUK)
    return tmp_path


@pytest.fixture
def pair_files(tmp_path):
    a = tmp_path / "listlist.timbuk"
    b = tmp_path / "list.timbuk"
    a.write_text(with_final(LISTS_TIMBUK, "listlist"))
    b.write_text(with_final(LISTS_TIMBUK, "list"))
    return a, b


def random_corpus(n, seed=0, **kw):
    """``n`` random FTAs; every other one carries a universal state."""
    out = []
    for i in range(n):
        rng = random.Random(seed * 100_003 + i)
        out.append(random_fta(rng, with_any=i % 2 == 0, **kw))
    return out


# ---------------------------------------------------------------- runs


def naive_run(automaton, term: Term) -> frozenset:
    """States reached by ``term``, straight from the transitions."""
    kids = [naive_run(automaton, c) for c in term.children]
    if isinstance(automaton, Fta):
        return frozenset(
            t.rhs for t in automaton.delta
            if t.func == term.symbol and all(a in k for a, k in zip(t.args, kids))
        )
    return frozenset(
        pt.rhs for pt in automaton.delta
        if pt.func == term.symbol and all(arg & k for arg, k in zip(pt.args, kids))
    )


def naive_accepts(automaton, term: Term) -> bool:
    return bool(naive_run(automaton, term) & frozenset(automaton.finals))


def count_terms(sig: Signature, depth: int) -> int:
    """Number of terms of depth at most ``depth``, by recurrence."""
    if depth < 1:
        return 0
    below = count_terms(sig, depth - 1)
    return sum(below**f.arity if f.arity else 1 for f in sig)


# ------------------------------------------------------- value vectors


def _step(automaton, f, kids):
    if isinstance(automaton, Fta):
        return frozenset(
            t.rhs for t in automaton.delta
            if t.func == f and all(a in k for a, k in zip(t.args, kids))
        )
    return frozenset(
        pt.rhs for pt in automaton.delta
        if pt.func == f and all(not arg.isdisjoint(k) for arg, k in zip(pt.args, kids))
    )


def value_vectors(automata, max_depth: int = 4, signature: Signature | None = None):
    """Every distinct tuple of run results over all terms of depth <= max_depth.

    Two terms with the same tuple cannot be told apart by any of the
    automata, so checking each tuple once covers every term.  Each tuple
    is paired with one witness term.  Built layer by layer: layer d applies
    each symbol to all tuples of depth < d.
    """
    sig = signature or automata[0].signature
    seen: dict[tuple, Term] = {}
    for depth in range(1, max_depth + 1):
        current = list(seen.items())
        fresh = {}
        for f in sig:
            if f.arity == 0:
                if depth == 1:
                    vec = tuple(_step(a, f, ()) for a in automata)
                    fresh.setdefault(vec, Term(f))
                continue
            if depth == 1:
                continue
            for combo in itertools.product(current, repeat=f.arity):
                vec = tuple(
                    _step(a, f, [c[0][k] for c in combo]) for k, a in enumerate(automata)
                )
                if vec not in seen and vec not in fresh:
                    fresh[vec] = Term(f, tuple(c[1] for c in combo))
        if not fresh:
            break
        seen.update(fresh)
    return seen


def accepting(automaton, states) -> bool:
    return not frozenset(states).isdisjoint(automaton.finals)


def productive(pa: ProductFta) -> set:
    """Reachable states by plain saturation over product transitions."""
    reached = set()
    while True:
        new = {
            pt.rhs for pt in pa.delta
            if pt.rhs not in reached and all(arg & reached for arg in pt.args)
        }
        if not new:
            return reached
        reached |= new


# ---------------------------------------------------------------- reporting

_criteria: dict[str, str] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    number = name.split("_")[2]
    if report.when == "call" or report.outcome != "passed":
        _criteria[number] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria, key=int):
        terminalreporter.write_line(f"CRITERION {number}: {_criteria[number]}")
