import itertools

import pytest
from hypothesis import assume, given, settings, strategies as st

from autostruct import automata as fa
from autostruct import logic as L
from autostruct.builtins import builtin, oracle
from autostruct.errors import ArityMismatch, FreeVariablePresent, ParseError, RebindError, UnknownRelation
from autostruct.logic import compile_query, define, eval_sentence, normalize, parse_formula, solutions

from bruteforce import BruteForce

NAT = builtin("nat_le")
PRES = builtin("presburger")


def value(w):
    return sum(1 << i for i, c in enumerate(w) if c == "1")


def test_parse_shapes():
    f = parse_formula("A x. A y. E z. plus(x,y,z)")
    assert isinstance(f, L.Forall) and isinstance(f.body, L.Forall)
    assert isinstance(f.body.body, L.Exists) and isinstance(f.body.body.body, L.Atom)
    g = parse_formula("Einf x. le(x,y)")
    assert isinstance(g, L.ExistsInf)
    assert g.free_vars() == {"y"}


def test_precedence_and_scope():
    f = parse_formula("!a(x) & b(x) | c(x) -> d(x)")
    assert isinstance(f, L.Implies)
    assert isinstance(f.left, L.Or)
    assert isinstance(f.left.left, L.And)
    assert isinstance(f.left.left.left, L.Not)
    # a quantifier extends as far right as possible
    g = parse_formula("E x. a(x) & b(y)")
    assert isinstance(g, L.Exists) and g.free_vars() == {"y"}
    assert parse_formula("a(x) & E y. b(y)").free_vars() == {"x"}


def test_parse_errors():
    with pytest.raises(ArityMismatch):
        parse_formula("le(x)", NAT.signature)
    with pytest.raises(UnknownRelation):
        parse_formula("lt(x,y)", NAT.signature)
    with pytest.raises(RebindError):
        parse_formula("E x. E x. le(x,x)")
    with pytest.raises(ParseError) as info:
        parse_formula("le(x,y) &")
    assert info.value.column == 10
    with pytest.raises(ParseError):
        parse_formula("le(x,y) le(y,x)")


def test_round_trip_through_formatting():
    text = "A x. (E y. (le(x,y) & !x = y) -> Einf z. le(z,x) | false)"
    f = parse_formula(text)
    assert parse_formula(L.format_formula(f)) == f


def _nnf_ok(f, under_not=False):
    if isinstance(f, (L.Implies, L.Forall)):
        return False
    if isinstance(f, L.Not):
        return isinstance(f.body, (L.Atom, L.Eq, L.Exists, L.ExistsInf)) and _nnf_ok(f.body, True)
    for child in ("left", "right", "body"):
        if hasattr(f, child) and not isinstance(getattr(f, child), str):
            if not _nnf_ok(getattr(f, child)):
                return False
    return True


def test_normal_form_has_only_restricted_negation():
    for text in ["A x. (le(x,y) -> E z. !(le(z,x) | x = z))",
                 "!(A x. Einf y. le(x,y))",
                 "!(le(x,y) -> !le(y,x))"]:
        f = normalize(parse_formula(text))
        assert _nnf_ok(f)
        assert f.free_vars() == parse_formula(text).free_vars()


def test_sentences_from_the_catalog():
    assert eval_sentence("A x. A y. A z. (plus(x,y,z) -> plus(y,x,z))", PRES)
    assert eval_sentence("A x. A y. (lt(x,y) -> E z. (lt(x,z) & lt(z,y)))", builtin("q_le"))
    assert not eval_sentence("E x. ! eq(x,x)", NAT)
    assert eval_sentence("Einf x. eq(x,x)", builtin("b_omega"))
    assert eval_sentence("A x. E y. union(x,y,one)", builtin("b_omega"))
    assert not eval_sentence("E x. A y. le(y,x)", NAT)


def test_infinity_quantifier_on_the_order():
    words = [NAT.alphabet.decode(w) for w in fa.enumerate_llex(NAT.domain, 8)]
    up = compile_query("Einf x. le(y,x)", NAT)
    down = compile_query("Einf x. le(x,y)", NAT)
    assert all(up.contains(w) for w in words)
    assert not any(down.contains(w) for w in words)


@pytest.mark.parametrize("name, text", [
    ("nat_le", "Einf x. le(y,x)"),
    ("nat_le", "Einf x. le(x,y)"),
    ("presburger", "Einf y. E z. plus(x,y,z)"),
    ("b_omega", "Einf a. (!zero(a) & inter(a,x,a))"),
    ("word_struct", "Einf y. lex(y,x)"),
])
def test_infinity_constructions_agree(name, text):
    p = builtin(name)
    tail = compile_query(text, p, infinity="tail").relation
    guard = compile_query(text, p, infinity="guard").relation
    assert fa.equivalent(tail.automaton, guard.automaton)


def test_free_variables_rejected_for_sentences():
    with pytest.raises(FreeVariablePresent):
        eval_sentence("le(x,y)", NAT)


def test_solutions_doubling():
    pairs = list(solutions("plus(x,x,y)", PRES, 4))
    assert pairs
    assert all(value(y) == 2 * value(x) for x, y in pairs)
    assert {value(x) for x, _ in pairs} == set(range(8))
    assert list(solutions("le(x,y) & !le(x,y)", NAT, 4)) == []
    diagonal = list(solutions("eq(x,y)", NAT, 3))
    assert diagonal and all(x == y for x, y in diagonal)


def test_define_adds_a_relation_and_shares_cache():
    q = define(NAT, "lt", "le(x,y) & !x = y", ("x", "y"))
    assert q.signature["lt"] == 2
    assert "lt" not in NAT.relations
    assert q.holds("lt", "1", "01") and not q.holds("lt", "1", "1")
    assert eval_sentence("A x. !lt(x,x)", q)


def test_constants_from_singleton_relations():
    p = builtin("b_omega")
    f = parse_formula("union(x,y,one)", p.signature)
    assert f.free_vars() == {"x", "y"}
    assert eval_sentence("A x. inter(x,zero,zero)", p)


def test_repeated_arguments():
    q = compile_query("plus(x,x,x)", PRES)
    words = [PRES.alphabet.decode(w) for w in fa.enumerate_llex(PRES.domain, 5)]
    assert [w for w in words if q.contains(w)] == [""]


# random formulas over (N, <=) against the window oracle
atoms = st.sampled_from(["le(x,y)", "le(y,x)", "x = y", "le(x,x)"])


def _grow(children):
    return st.one_of(
        st.tuples(children, children).map(lambda p: f"({p[0]} & {p[1]})"),
        st.tuples(children, children).map(lambda p: f"({p[0]} | {p[1]})"),
        children.map(lambda c: f"!({c})"),
        children.map(lambda c: f"(E y. {c})"),
        children.map(lambda c: f"(A y. ({c}))"),
    )


formulas = st.recursive(atoms, _grow, max_leaves=4)
NAT_ORACLE = BruteForce(oracle("nat_le"), ("0", "1"), 6)


@settings(max_examples=40, deadline=None)
@given(formulas)
def test_random_formulas_match_window_oracle(text):
    # with x free and y the only bound variable, y < x, y = x and y = x + 1 cover every case
    # and all fit in the window when |x| <= 4
    try:
        f = parse_formula(text)
    except RebindError:
        assume(False)
    q = compile_query(text, NAT)
    free = [w for w in NAT_ORACLE.universe if len(w) <= 4]
    for values in itertools.product(free, repeat=len(q.variables)):
        env = dict(zip(q.variables, values))
        expected = NAT_ORACLE.holds(f, env)
        assert (q.contains(*values) if q.variables else q.truth) == expected, (text, env)
