"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines are
printed at the end of the session.
"""
import itertools
import random
import time

from autostruct import automata as fa
from autostruct.analysis import (bitgraph_census, column_census, dilworth_check, gap_check,
                                 prefix_check, product_length_check, random_poset)
from autostruct.automata import PAD, Automaton
from autostruct.boolean_algebra import ba_invariant, ba_isomorphic
from autostruct.builtins import NAMES, FinCofin, builtin, oracle
from autostruct.logic import compile_query, parse_formula
from autostruct.presentation import product_presentation, validate
from autostruct.relations import image
from autostruct.turing import build_ar, config_graph, configurations, fixture, probe_invariants, run, step

from bruteforce import BruteForce
from corpus import CORPUS, DEFAULT_WINDOW, FREE_LEN, WINDOWS


def test_criterion_01_compiler_matches_bruteforce(report):
    start = time.time()
    assert len(CORPUS) >= 25
    assert sum("Einf" in text for _, text in CORPUS) >= 5
    assert {name for name, _ in CORPUS} == set(NAMES)
    mismatches, checked, oracles = [], 0, {}
    for name, text in CORPUS:
        p = builtin(name)
        if name not in oracles:
            oracles[name] = BruteForce(oracle(name), p.alphabet.names, WINDOWS.get(name, DEFAULT_WINDOW))
        bf = oracles[name]
        q = compile_query(text, p)
        f = parse_formula(text, p.signature)
        free = [w for w in bf.universe if len(w) <= FREE_LEN]
        for values in itertools.product(free, repeat=len(q.variables)):
            checked += 1
            got = q.contains(*values) if q.variables else q.truth
            if got != bf.holds(f, dict(zip(q.variables, values))):
                mismatches.append((name, text, values))
    elapsed = time.time() - start
    ok = not mismatches and elapsed < 60
    report(1, ok, f"{len(CORPUS)} formulas, {checked} assignments, {len(mismatches)} mismatches, {elapsed:.1f}s")
    assert not mismatches, mismatches[:5]
    assert elapsed < 60


def _lsb_bits(n):
    return format(n, "b")[::-1] if n else ""


def _short_operands(alpha, bound):
    """Tuple words whose first two components have length at most ``bound``."""
    symbols = list(alpha.symbols)
    delta = []
    for i in range(bound + 1):
        row = {}
        for s in symbols:
            if i < bound:
                row[s] = (i + 1,)
            elif s[0] == PAD and s[1] == PAD:
                row[s] = (bound,)
        delta.append(row)
    return Automaton(alpha, bound + 1, 0, set(range(bound + 1)), delta)


def test_criterion_02_presburger_addition(report):
    p = builtin("presburger")
    r = p.relation("plus")
    d = fa.minimal(r.automaton)
    idx = p.alphabet.index
    bits = [tuple(idx[c] for c in _lsb_bits(n)) for n in range(2048)]
    wrong = 0
    for x in range(1024):
        bx = bits[x]
        for y in range(1024):
            by, bz = bits[y], bits[x + y]
            q = d.initial
            for i in range(max(len(bx), len(by), len(bz))):
                sym = tuple(b[i] if i < len(b) else PAD for b in (bx, by, bz))
                nxt = d.delta[q].get(sym)
                if not nxt:
                    q = None
                    break
                q = nxt[0]
            if q is None or q not in d.finals:
                wrong += 1
    # no other sums: exactly one accepted z per pair, none longer than 12
    short = fa.intersect(r.automaton, _short_operands(r.alphabet, 10))
    triples = fa.count_words_upto(short, 12).upto(12)
    long_ones = fa.intersect(short, fa.concat(
        fa.Automaton(r.alphabet, 13, 0, {12}, [{s: (i + 1,) for s in r.alphabet.symbols} for i in range(12)] + [{}]),
        fa.universal(r.alphabet)))
    ok = wrong == 0 and triples == 1024 * 1024 and fa.is_empty(long_ones)
    report(2, ok, f"{wrong} wrong sums, {triples} accepted triples for x,y < 1024")
    assert wrong == 0
    assert triples == 1024 * 1024
    assert fa.is_empty(long_ones)


def test_criterion_03_b_omega_strings(report):
    orc = oracle("b_omega")
    p = builtin("b_omega")
    first = orc.decode("0#0110001111")
    second = orc.decode("1#0001")
    in_domain = all(p.domain.accepts(p.alphabet.encode(w)) for w in ("0#0110001111", "1#0001"))
    # the automaton's complement maps each string to the encoding of the complement set
    compl = p.relation("compl")
    images = [image(compl, {"_0": w}, 12) for w in ("0#0110001111", "1#0001")]
    decoded = [[orc.decode(p.alphabet.decode(y[0])) for y in ys] for ys in images]
    ok = (first.intervals() == [(1, 3), (6, 10)] and second.intervals() == [(0, 3), (4, None)]
          and in_domain and decoded == [[first.complement()], [second.complement()]])
    report(3, ok, f"0#0110001111 -> {first.intervals()}, 1#0001 -> {second.intervals()}")
    assert first == FinCofin([1, 2, 6, 7, 8, 9])
    assert first.intervals() == [(1, 3), (6, 10)]
    assert second == FinCofin([3], cofinite=True)
    assert second.intervals() == [(0, 3), (4, None)]
    assert in_domain
    assert decoded == [[first.complement()], [second.complement()]]


def test_criterion_04_boolean_algebra_classification(report):
    start = time.time()
    b1 = builtin("b_omega")
    b2 = product_presentation(b1, b1)
    b3 = product_presentation(b2, b1)
    invariants = [ba_invariant(b) for b in (b1, b2, b3)]
    distinct = [not ba_isomorphic(x, y) for x, y in ((b1, b2), (b1, b3), (b2, b3))]
    same = ba_isomorphic(b2, b2)
    elapsed = time.time() - start
    values = [str(v) for v in invariants]
    ok = values == ["i=1", "i=2", "i=3"] and all(distinct) and same and elapsed < 300
    report(4, ok, f"invariants {values}, pairwise distinct {distinct}, {elapsed:.0f}s")
    assert values == ["i=1", "i=2", "i=3"]
    assert all(distinct)
    assert same
    assert elapsed < 300


def test_criterion_05_length_gap(report):
    cases = [("presburger", "plus", (2, 1)), ("nat_succ", "succ", (1, 1)), ("int_add", "plus", (2, 1))]
    results = [gap_check(builtin(name), rel, split, 8) for name, rel, split in cases]
    summary = ", ".join(f"{n}: {r.max_gap}<={r.pump_bound}" for (n, _, _), r in zip(cases, results))
    ok = all(r.max_gap is not None and r.max_gap <= r.pump_bound for r in results)
    report(5, ok, summary)
    for r in results:
        assert r.tuples > 0
        assert r.max_gap <= r.pump_bound


def test_criterion_06_product_lengths(report):
    r = product_length_check(builtin("presburger"), "plus", m_max=8, factor_len=4)
    report(6, r.holds, f"{r.lists_checked} factor lists, worst slack {r.worst_slack}")
    assert r.holds
    assert r.violation is None


def test_criterion_07_prefix_growth(report):
    failures = []
    for name in NAMES:
        domain = builtin(name).domain
        for n in range(2, 13):
            r = prefix_check(domain, n)
            if not (r.prefix_bound_holds and r.growth_bound_holds):
                failures.append((name, n))
    report(7, not failures, f"{len(NAMES)} domains x n=2..12, {len(failures)} failures")
    assert not failures


def test_criterion_08_column_census(report):
    worst = {}
    for name, phi in (("nat_le", "le(x,y)"), ("q_le", "le(x,y)"), ("tree_a1", "E(x,y)")):
        p = builtin(name)
        worst[name] = max(column_census(p, phi, n).ratio for n in range(2, 9))
    bit = [bitgraph_census(k).distinct_columns for k in range(2, 11)]
    ok = all(v <= 4 for v in worst.values()) and bit == [2 ** k for k in range(2, 11)]
    report(8, ok, f"max ratios {{{', '.join(f'{k}: {float(v):.2f}' for k, v in worst.items())}}}, "
                  f"bit graph {bit}")
    assert all(v <= 4 for v in worst.values())
    assert bit == [2 ** k for k in range(2, 11)]


def test_criterion_09_configuration_graphs(report):
    bad, total = 0, 0
    for name in ("right_mover", "looper", "scan_accept"):
        tm = fixture(name)
        p = config_graph(tm)
        E = p.relation("E")
        for c in configurations(tm, 8):
            total += 1
            succ = [tuple(p.alphabet.names[s] for s in y[0])
                    for y in image(E, {"_0": p.alphabet.encode(c)}, len(c) + 2)]
            expected = step(tm, c)
            if succ != ([expected] if expected is not None else []):
                bad += 1
    report(9, bad == 0, f"{total} configurations, {bad} disagreements")
    assert total > 0
    assert bad == 0


def test_criterion_10_reduction_graph(report):
    details, ok = [], True
    for name in ("always_accept", "looper"):
        tm = fixture(name)
        g = build_ar(tm)
        valid = validate(g.presentation).ok
        probe = probe_invariants(g, depth=6, max_base_len=4)
        lengths_ok = all(all(e.chain_lengths.get(n, 0) >= 1 for n in range(1, 6)) for e in probe.entries)
        loops = [not run(tm, e.base, 1000)[0] for e in probe.entries]
        proxy_ok = all(e.proxy_infinite == lp for e, lp in zip(probe.entries, loops))
        ok = ok and valid and lengths_ok and proxy_ok and len(probe.entries) == 15
        details.append(f"{name}: valid={valid} lengths={lengths_ok} proxy={proxy_ok}")
    report(10, ok, "; ".join(details))
    assert ok


def test_criterion_11_dilworth(report):
    rng = random.Random(20240611)
    failures = 0
    for _ in range(1000):
        ps = random_poset(rng.randint(1, 12), rng, density=rng.random())
        if not dilworth_check(ps).holds:
            failures += 1
    report(11, failures == 0, f"1000 random posets, {failures} violations")
    assert failures == 0
