import pytest

from autostruct import relations as rel
from autostruct.boolean_algebra import ba_invariant, ba_isomorphic, failed_axiom, power_set_algebra
from autostruct.builtins import builtin
from autostruct.errors import NotABooleanAlgebra, SignatureMismatch
from autostruct.presentation import Presentation


def broken(n):
    p = power_set_algebra(n)
    relations = dict(p.relations)
    relations["compl"] = rel.equality(p.domain, "_0", "_1")
    return Presentation(p.alphabet, p.domain, relations)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_power_set_algebra_has_n_atoms(n):
    r = ba_invariant(power_set_algebra(n))
    assert r.kind == "finite" and r.value == n
    assert str(r) == f"finite({n})"


def test_finite_algebras_of_different_size_differ():
    assert not ba_isomorphic(power_set_algebra(2), power_set_algebra(3))
    assert ba_isomorphic(power_set_algebra(2), power_set_algebra(2))


def test_b_omega_invariant():
    p = builtin("b_omega")
    assert failed_axiom(p) is None
    r = ba_invariant(p)
    assert str(r) == "i=1"
    assert r.to_dict() == {"kind": "infinite", "value": 1, "failed_axiom": None}


def test_cap_is_reported():
    assert ba_invariant(builtin("b_omega"), cap=0).kind == "cap_exceeded"


def test_broken_complement_is_not_a_boolean_algebra():
    r = ba_invariant(broken(2))
    assert r.kind == "not_ba" and r.failed_axiom
    with pytest.raises(NotABooleanAlgebra):
        ba_isomorphic(broken(2), power_set_algebra(2))


def test_wrong_signature():
    with pytest.raises(SignatureMismatch):
        ba_invariant(builtin("nat_le"))
