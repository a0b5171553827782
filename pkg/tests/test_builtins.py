import itertools

import pytest

from autostruct import automata as fa
from autostruct.builtins import (NAMES, FinCofin, builtin, builtin_text, construct, contrast_bitgraph, data_path,
                                 oracle, oracle_eval)
from autostruct.errors import DecodeError, UnknownBuiltin
from autostruct.presentation import validate


def short_words(p, count):
    words = []
    for w in fa.enumerate_llex(p.domain, 12):
        words.append(p.alphabet.decode(w).replace(" ", ""))
        if len(words) == count:
            break
    return words


@pytest.mark.parametrize("name", NAMES)
def test_relations_agree_with_oracle(name):
    p, orc = builtin(name), oracle(name)
    for rel_name, arity in p.signature.items():
        words = short_words(p, {1: 40, 2: 25, 3: 12}[arity])
        for args in itertools.product(words, repeat=arity):
            assert p.holds(rel_name, *args) == orc.holds_words(rel_name, *args), (rel_name, args)


@pytest.mark.parametrize("name", NAMES)
def test_domain_agrees_with_oracle(name):
    p, orc = builtin(name), oracle(name)
    names = [n for n in p.alphabet.names]
    for n in range(5):
        for w in itertools.product(names, repeat=n):
            word = "".join(w)
            assert p.domain.accepts(p.alphabet.encode(list(w))) == orc.is_element(word), word


@pytest.mark.parametrize("name", NAMES)
def test_shipped_file_matches_construction(name):
    assert data_path(name).exists()
    assert builtin_text(name).startswith(f"# {name}\n")
    p, q = builtin(name), construct(name)
    assert fa.equivalent(p.domain, q.domain)
    assert validate(p).ok


def test_boolean_oracle_intersection():
    # [1,3) and [2,5) meet in [2,3)
    a, b = FinCofin({1, 2}), FinCofin({2, 3, 4})
    assert (a & b).intervals() == [(2, 3)]
    assert oracle_eval("b_omega", "inter", (a, b, FinCofin({2})))


def test_presburger_examples():
    orc = oracle("presburger")
    assert not orc.holds("plus", 3, 5, 9)
    assert orc.holds("plus", 3, 5, 8)
    p = builtin("presburger")
    assert p.holds("plus", "11", "101", "0001")
    assert not p.holds("plus", "11", "101", "1001")


def test_tree_examples():
    orc = oracle("tree_a1")
    assert orc.holds_words("E", "1", "11")
    assert not orc.holds_words("E", "1", "01")


def test_bitgraph_edges():
    assert [contrast_bitgraph(5, m) for m in range(3)] == [True, False, True]
    assert not any(contrast_bitgraph(0, m) for m in range(8))
    with pytest.raises(ValueError):
        contrast_bitgraph(-1, 0)


def test_errors():
    with pytest.raises(DecodeError):
        oracle("nat_le").decode("10")
    with pytest.raises(UnknownBuiltin):
        builtin("reals")
    with pytest.raises(UnknownBuiltin):
        oracle("reals")
