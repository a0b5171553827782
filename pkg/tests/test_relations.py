import pytest
from hypothesis import given, strategies as st

from autostruct import automata as fa
from autostruct import relations as rel
from autostruct.automata import PAD, Alphabet
from autostruct.builtins import builtin
from autostruct.errors import ArityMismatch, DuplicateTape, UnknownTape

NAT = builtin("nat_le")
B = NAT.alphabet


def value(w):
    return sum(1 << i for i, c in enumerate(w) if c == "1")


def nat_words(max_len):
    return [B.decode(w) for w in fa.enumerate_llex(NAT.domain, max_len)]


def as_set(r, max_len, order=None):
    r = r if order is None else rel.reorder(r, order)
    return {tuple(B.decode(c) for c in t) for t in r.members(max_len)}


def le(x, y):
    return rel.rename(NAT.relation("le"), {"_0": x, "_1": y})


WORDS = nat_words(4)


@given(st.lists(st.sampled_from([0, 1]), max_size=6), st.lists(st.sampled_from([0, 1]), max_size=6))
def test_convolution_round_trip(u, v):
    word = rel.convolve([tuple(u), tuple(v)])
    assert len(word) == max(len(u), len(v))
    assert rel.deconvolve(word, 2) == (tuple(u), tuple(v))


def test_tuple_alphabet_excludes_all_padding():
    alpha = rel.TupleAlphabet(Alphabet("01"), 2)
    assert alpha.size == 8
    assert (PAD, PAD) not in set(alpha.symbols)
    assert alpha.parse_symbol("0,_") == (0, PAD)


def test_le_members_match_order():
    expected = {(x, y) for x in WORDS for y in WORDS if value(x) <= value(y)}
    assert as_set(le("x", "y"), 4) == expected


def test_join_is_natural_join():
    joined = rel.join(le("x", "y"), le("y", "z"))
    got = as_set(joined, 4, ("x", "y", "z"))
    expected = {(x, y, z) for x in WORDS for y in WORDS for z in WORDS if value(x) <= value(y) <= value(z)}
    assert got == expected


def test_antijoin_is_relative_complement():
    r = rel.join(le("x", "y"), rel.from_domain(NAT.domain, "z"))
    s = le("y", "x")
    got = as_set(rel.antijoin(r, s), 4, ("x", "y", "z"))
    expected = {(x, y, z) for x in WORDS for y in WORDS for z in WORDS if value(x) < value(y)}
    assert got == expected
    with pytest.raises(UnknownTape):
        rel.antijoin(le("x", "y"), le("x", "w"))


def test_project_keeps_short_witnesses_and_long_ones():
    # E y. y <= x and y != x, i.e. x > 0
    strict = rel.antijoin(le("y", "x"), le("x", "y"))
    got = as_set(rel.project(strict, "y"), 5)
    assert got == {(w,) for w in nat_words(5) if value(w) > 0}
    # E y. x <= y: every x, witnessed by longer y
    got = as_set(rel.project(le("x", "y"), "y"), 5)
    assert got == {(w,) for w in nat_words(5)}


def test_union_intersect_and_cylindrify():
    a, b = le("x", "y"), le("y", "x")
    assert as_set(rel.intersect(a, b), 4, ("x", "y")) == {(w, w) for w in WORDS}
    assert as_set(rel.union(a, b), 4, ("x", "y")) == {(x, y) for x in WORDS for y in WORDS}
    cyl = rel.cylindrify(le("x", "y"), ["z"], NAT.domain)
    assert as_set(cyl, 3, ("x", "y", "z")) == {
        (x, y, z) for x in nat_words(3) for y in nat_words(3) for z in nat_words(3) if value(x) <= value(y)}


def test_equality_and_universe():
    eq = rel.equality(NAT.domain, "b", "a")
    assert eq.tapes == ("a", "b")
    assert as_set(eq, 4) == {(w, w) for w in WORDS}
    u = rel.universe(NAT.domain, ["y", "x"])
    assert u.tapes == ("x", "y")
    assert len(as_set(u, 3)) == len(nat_words(3)) ** 2


def test_length_guard():
    r = rel.universe(NAT.domain, ["x", "y"])
    guarded = rel.length_guard(r, "y", ["x"], 1)
    for x, y in as_set(guarded, 5, ("x", "y")):
        assert len(y) > len(x) + 1
    assert ("1", "001") in as_set(guarded, 5, ("x", "y"))
    assert ("1", "01") not in as_set(guarded, 5, ("x", "y"))


def test_padding_witness_detects_invalid_convolution():
    alpha = rel.TupleAlphabet(B, 2)
    one, zero = B.index["1"], B.index["0"]
    bad = fa.from_word(alpha, [(one, PAD), (one, zero)])
    assert rel.padding_witness(rel.RegularRelation(("a", "b"), bad)) is not None
    assert rel.padding_witness(le("x", "y")) is None


def test_image_lists_completions():
    succ = builtin("nat_succ").relation("succ")
    assert [B.decode(t[0]) for t in rel.image(succ, {"_0": "11"}, 4)] == ["001"]
    below = rel.image(NAT.relation("le"), {"_1": "01"}, 2)
    assert sorted(B.decode(t[0]) for t in below) == ["", "01", "1"]  # 0, 2, 1


def test_construction_errors():
    alpha = rel.TupleAlphabet(B, 2)
    with pytest.raises(DuplicateTape):
        rel.RegularRelation(("a", "a"), fa.empty(alpha))
    with pytest.raises(ArityMismatch):
        rel.RegularRelation(("a",), fa.empty(alpha))
    with pytest.raises(ArityMismatch):
        le("x", "y").contains("1")
