import itertools
import random

import pytest

from autostruct import automata as fa
from autostruct.analysis import (FinitePoset, bitgraph_census, column_census, dilworth_check, gap_check,
                                 longest_chain, max_antichain, prefix_check, product_length_check, random_poset)
from autostruct.builtins import builtin, contrast_bitgraph
from autostruct.errors import ArityMismatch, NotAPoset
from autostruct.logic import define


def value(w):
    return sum(1 << i for i, c in enumerate(w) if c == "1")


def nat_words(max_len):
    return ["".join(b) for n in range(max_len + 1) for b in itertools.product("01", repeat=n)
            if not b or b[-1] == "1"]


def test_gap_of_equality_is_zero():
    p = define(builtin("nat_le"), "same", "x = y", ("x", "y"))
    r = gap_check(p, "same", (1, 1), 6)
    assert r.max_gap == 0 and r.holds
    assert r.tuples == len(nat_words(6))


def test_gap_of_successor():
    r = gap_check(builtin("nat_succ"), "succ", (1, 1), 10)
    pairs = [(x, y) for x in nat_words(10) for y in nat_words(10) if value(y) == value(x) + 1]
    assert r.tuples == len(pairs)
    assert r.max_gap == max(len(y) - len(x) for x, y in pairs) == 1
    assert r.holds
    with pytest.raises(ArityMismatch):
        gap_check(builtin("nat_succ"), "succ", (1, 2), 4)


def test_product_lengths_single_factor():
    r = product_length_check(builtin("presburger"), "plus", m_max=1, factor_len=3)
    assert r.holds and r.violation is None
    assert r.lines()


@pytest.mark.parametrize("name", ["nat_le", "word_struct", "b_omega"])
def test_prefix_check_counts(name):
    d = builtin(name).domain
    names = d.alphabet.names
    lang = {w for w in (tuple(t) for n in range(8) for t in itertools.product(names, repeat=n))
            if d.accepts(d.alphabet.encode(list(w)))}
    r = prefix_check(d, 3)
    assert r.words_upto_n == sum(1 for w in lang if len(w) <= 3)
    assert r.words_upto_n_plus_k == sum(1 for w in lang if len(w) <= 5)
    assert r.prefix_bound_holds and r.growth_bound_holds


def test_column_census_on_the_order():
    r = column_census(builtin("nat_le"), "le(x,y)", 4, slack=4)
    xs = nat_words(4)
    columns = {frozenset(x for x in xs if value(x) <= value(y)) for y in nat_words(8)}
    assert r.distinct_columns == len(columns) == 16
    assert r.elements_upto_n == len(xs)
    assert r.distinct_columns <= r.elements_upto_n + 1


def test_bitgraph_census_is_exponential():
    for k in range(2, 7):
        r = bitgraph_census(k)
        # for y >= k the column of y on vertices 0..k-1 is the low k bits of y
        patterns = {y % 2 ** k for y in range(k, 2 ** (k + 1))}
        assert r.distinct_columns == len(patterns) == 2 ** k
        assert all(contrast_bitgraph(y, x) == bool(y >> x & 1) for y in range(k, 64) for x in range(k))


def test_antichain_matches_subset_search():
    rng = random.Random(7)
    for _ in range(60):
        ps = random_poset(rng.randint(1, 8), rng, density=rng.random())
        n = len(ps.elements)
        best = max(len(s) for r in range(n + 1) for s in itertools.combinations(range(n), r)
                   if all(not ps.comparable(i, j) for i, j in itertools.combinations(s, 2)))
        assert max_antichain(ps) == best
        assert dilworth_check(ps).holds


def test_divisibility_poset():
    ps = FinitePoset.from_relation(range(1, 13), lambda a, b: b % a == 0)
    assert longest_chain(ps) == 4  # 1 | 2 | 4 | 8
    assert max_antichain(ps) == 6  # 7..12
    assert dilworth_check(ps).holds


def test_not_a_poset():
    with pytest.raises(NotAPoset):
        FinitePoset.from_relation(range(3), lambda a, b: True)
    with pytest.raises(NotAPoset):
        FinitePoset([0, 1], [[False, False], [False, True]])
