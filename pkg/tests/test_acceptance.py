"""Acceptance checks, one test per criterion.

Each test name starts with ``test_criterion_<n>``; the terminal summary
prints one PASS/FAIL line per criterion (see conftest).
"""

import random
import time

import pytest

from treedet.boolean import complement, difference, included, intersect_product, universal
from treedet.core import Fta, is_complete, is_deterministic
from treedet.determinize import DetOptions, determinize, ensure_any
from treedet.errors import DeterminizationTimeout
from treedet.fixtures import lists_fta
from treedet.product import ProductFta, defactor, explicit
from treedet.synth import random_fta, random_signature, synth_family
from treedet.textbook import determinize_textbook
from treedet.timbuk import parse_product, parse_timbuk, serialize_product, serialize_timbuk

from conftest import productive, random_corpus, value_vectors

CORPUS_SIZE = 500
MODES = [
    DetOptions(),
    DetOptions(complete=True),
    DetOptions(dontcare=True),
    DetOptions(complete=True, dontcare=True),
]

# The 11 explicit transitions of the determinised lists automaton, with
# states written as subsets of the input states.
D0, D1, D2 = "{list,listlist,any}", "{list,any}", "{any}"
LISTS_EXPLICIT = {
    ("nil", (), D0),
    ("cons", (D0, D0), D0), ("cons", (D1, D0), D0),
    ("cons", (D0, D1), D1), ("cons", (D1, D1), D1),
    ("cons", (D2, D1), D1), ("cons", (D2, D0), D1),
    ("cons", (D1, D2), D2), ("cons", (D0, D2), D2),
    ("cons", (D2, D2), D2), ("0", (), D2),
}


def described(d):
    """Expanded transitions of ``d`` with states written as subsets."""
    return {
        (t.func.name, tuple(d.describe(a) for a in t.args), d.describe(t.rhs)) for t in d.expanded()
    }


@pytest.fixture(scope="module")
def corpus():
    return random_corpus(CORPUS_SIZE, seed=2024, max_states=6, max_symbols=4, max_arity=2)


@pytest.fixture(scope="module")
def outputs(corpus):
    """Optimised results for every corpus automaton and mode."""
    return [[determinize(fta, opts) for opts in MODES] for fta in corpus]


def test_criterion_1_worked_example():
    start = time.perf_counter()
    lists = lists_fta()
    d = determinize(lists, DetOptions(complete=True))
    elapsed = time.perf_counter() - start
    assert [d.describe(s) for s in d.states] == [D0, D1, D2]
    assert {d.describe(s) for s in d.finals} == {D0, D1}
    assert described(d) == LISTS_EXPLICIT
    plain = defactor(d)
    assert is_deterministic(plain) and is_complete(plain)
    assert elapsed < 1.0


def test_criterion_2_product_form_compactness():
    lists = lists_fta()
    plain = determinize(lists)
    dc = determinize(lists, DetOptions(complete=True, dontcare=True))
    assert len(plain.delta) <= 8
    assert len(dc.delta) <= 6
    assert described(plain) == described(dc) == LISTS_EXPLICIT


def test_criterion_3_oracle_equivalence(corpus, outputs):
    start = time.perf_counter()
    mismatches = []
    for i, fta in enumerate(corpus):
        completed = ensure_any(fta)
        reference = {False: described(determinize_textbook(fta)), True: described(determinize_textbook(completed))}
        for opts, d in zip(MODES, outputs[i]):
            if described(d) != reference[opts.complete]:
                mismatches.append((i, opts))
    assert len(corpus) >= 500
    assert sum(1 for fta in corpus if "any" in fta.states) == len(corpus) // 2
    assert mismatches == []
    assert time.perf_counter() - start < 120


def test_criterion_4_language_and_completion(corpus, outputs):
    failures = []
    for i, fta in enumerate(corpus):
        for opts, d in zip(MODES, outputs[i]):
            for (v_in, v_out), term in value_vectors([fta, d], 4).items():
                if bool(v_in & fta.finals) != bool(v_out & d.finals):
                    failures.append((i, opts, str(term)))
                if opts.complete and len(v_out) != 1:
                    failures.append((i, opts, str(term), "runs"))
            if opts.complete and not is_complete(defactor(d)):
                failures.append((i, opts, "incomplete"))
    assert failures == []


def test_criterion_5_productivity(outputs):
    violations = [
        (i, k) for i, row in enumerate(outputs) for k, d in enumerate(row) if productive(d) != set(d.states)
    ]
    assert violations == []


def test_criterion_6_completed_size_formula():
    ratios = []
    for k in range(2, 11):
        d = determinize(synth_family(k), DetOptions(complete=True))
        n = len(d.states)
        # Independent count: k element constants and nil, plus cons over all pairs.
        independent = (k + 1) + n**2
        assert d.exact_completed_count == independent
        ratios.append(len(d.delta) / independent)
        if k == 5:
            assert len(d.delta) <= 0.5 * independent
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


def _pairs(n, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        sig = random_signature(rng, 4, 2)
        out.append((random_fta(rng, signature=sig), random_fta(rng, signature=sig, with_any=rng.random() < 0.5)))
    return out


def test_criterion_7_boolean_operations():
    failures = []
    for i, (a, b) in enumerate(_pairs(100, seed=7)):
        both = intersect_product(a, b)
        minus = difference(a, b)
        comp = complement(a)
        vectors = value_vectors([a, b, both, minus, comp], 4)
        subset = True
        for (va, vb, vi, vm, vc), term in vectors.items():
            in_a, in_b = bool(va & a.finals), bool(vb & b.finals)
            if bool(vi & both.finals) != (in_a and in_b):
                failures.append((i, "intersect", str(term)))
            if bool(vm & minus.finals) != (in_a and not in_b):
                failures.append((i, "difference", str(term)))
            if bool(vc & comp.finals) == in_a:
                failures.append((i, "complement", str(term)))
            subset &= in_b or not in_a
        if bool(included(a, b)) != subset:
            failures.append((i, "included"))
        if len(comp.states) <= 4:
            everything = all(bool(va & a.finals) for va, *_ in vectors)
            if bool(universal(a)) != everything:
                failures.append((i, "universal"))
    assert failures == []
    assert included(lists_fta("listlist"), lists_fta("list"))
    verdict = included(lists_fta("list"), lists_fta("listlist"))
    assert not verdict and verdict.counterexample is not None


TEXTBOOK_LIMIT = 120.0


def _best_of(fn, rounds):
    best = float("inf")
    for _ in range(rounds):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _interleaved(fa, fb, rounds, reps):
    """Best-of timings for two functions run alternately."""
    ta = tb = float("inf")
    for _ in range(rounds):
        ta = min(ta, _best_of(fa, reps))
        tb = min(tb, _best_of(fb, reps))
    return ta, tb


def test_criterion_8_performance_ordering():
    opts = DetOptions(complete=True)
    rows = []
    k = 1
    while True:
        fta = synth_family(k)
        if k <= 32:
            t_opt, t_tb = _interleaved(lambda: determinize(fta, opts), lambda: determinize_textbook(fta), 20, 10)
            finished = True
        else:
            t_opt = _best_of(lambda: determinize(fta, opts), 3 if k <= 128 else 1)
            start = time.perf_counter()
            try:
                tb = determinize_textbook(fta, timeout=TEXTBOOK_LIMIT)
                finished = True
            except DeterminizationTimeout:
                finished = False
            t_tb = time.perf_counter() - start
        if not finished:
            rows.append((k, t_opt, None))
            break
        if k > 32:
            assert described(tb) == described(determinize(fta, opts))
        else:
            assert described(determinize_textbook(fta)) == described(determinize(fta, opts))
        rows.append((k, t_opt, t_tb))
        k *= 2
    print("\nk, opt+compl seconds, textbook seconds")
    for row in rows:
        print(*row, sep=", ")
    finished_rows = [r for r in rows if r[2] is not None]
    assert all(t_opt <= t_tb for _, t_opt, t_tb in finished_rows)
    k_max, t_opt, t_tb = finished_rows[-1]
    assert t_tb >= 10 * t_opt, (k_max, t_opt, t_tb)


def test_criterion_9_round_trips(corpus, outputs):
    automata = list(corpus) + [lists_fta(), synth_family(1), synth_family(7)]
    for fta in automata:
        back = parse_timbuk(serialize_timbuk(fta))
        assert serialize_timbuk(back) == serialize_timbuk(fta)
        assert back.states == fta.states and back.finals == fta.finals
        assert {str(t) for t in back.delta} == {str(t) for t in fta.delta}
        plain = ProductFta.from_fta(fta)
        again = parse_product(serialize_product(plain))
        assert again.same_structure(plain)
    for row in outputs:
        for d in row:
            for form in (d, explicit(d)):
                text = serialize_product(form)
                parsed = parse_product(text)
                assert parsed.same_structure(form)
                assert serialize_product(parsed) == text
