"""Boolean algebras given as automatic presentations.

The signature is ``union/3``, ``inter/3``, ``compl/2`` (operation graphs)
and the singletons ``zero/1``, ``one/1``.  An infinite automatic Boolean
algebra is classified by the largest ``i`` such that there are ``i``
pairwise disjoint elements each lying above infinitely many atoms; a finite
one by its number of atoms.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import automata as fa
from .automata import Alphabet
from .errors import LimitExceeded, NotABooleanAlgebra, SignatureMismatch
from .logic import compile_query, define, eval_sentence
from .presentation import Presentation
from .relations import convolve, RegularRelation, TupleAlphabet

SIGNATURE = {"union": 3, "inter": 3, "compl": 2, "zero": 1, "one": 1}

# Helper relations, all with at most four tapes.
_DEFINITIONS = [
    ("ba_le", "inter(a,b,a)", ("a", "b")),
    ("ba_atom", "!zero(a) & A b. (ba_le(b,a) -> (zero(b) | b = a))", ("a",)),
    ("ba_big", "Einf a. (ba_atom(a) & ba_le(a,x))", ("x",)),
    ("ba_bigdiff", "Einf a. (ba_atom(a) & ba_le(a,x) & !ba_le(a,y))", ("x", "y")),
]

_AXIOM_DEFINITIONS = [
    ("ba_disjoint", "E z. (zero(z) & inter(a,b,z))", ("a", "b")),
]

# Distributivity uses the Horn form
# (x & y <= z and x <= y | z imply x <= z), which fails in both five-element
# non-distributive lattices and holds in every distributive one.
AXIOMS = [
    ("union total", "A x. A y. E z. union(x,y,z)"),
    ("inter total", "A x. A y. E z. inter(x,y,z)"),
    ("compl total", "A x. E y. compl(x,y)"),
    ("union functional", "A x. A y. A z. A w. (union(x,y,z) & union(x,y,w) -> z = w)"),
    ("inter functional", "A x. A y. A z. A w. (inter(x,y,z) & inter(x,y,w) -> z = w)"),
    ("compl functional", "A x. A y. A z. (compl(x,y) & compl(x,z) -> y = z)"),
    ("zero unique", "E x. (zero(x) & A y. (zero(y) -> y = x))"),
    ("one unique", "E x. (one(x) & A y. (one(y) -> y = x))"),
    ("le reflexive", "A x. ba_le(x,x)"),
    ("le antisymmetric", "A x. A y. (ba_le(x,y) & ba_le(y,x) -> x = y)"),
    ("le transitive", "A x. A y. A z. (ba_le(x,y) & ba_le(y,z) -> ba_le(x,z))"),
    ("union upper bound", "A x. A y. A z. (union(x,y,z) -> ba_le(x,z))"),
    ("union upper bound (right)", "A x. A y. A z. (union(x,y,z) -> ba_le(y,z))"),
    ("union least", "A x. A y. A z. A w. (union(x,y,z) & ba_le(x,w) & ba_le(y,w) -> ba_le(z,w))"),
    ("inter lower bound", "A x. A y. A z. (inter(x,y,z) -> ba_le(z,x))"),
    ("inter lower bound (right)", "A x. A y. A z. (inter(x,y,z) -> ba_le(z,y))"),
    ("inter greatest", "A x. A y. A z. A w. (inter(x,y,z) & ba_le(w,x) & ba_le(w,y) -> ba_le(w,z))"),
    ("zero bottom", "A x. A z. (zero(z) -> ba_le(z,x))"),
    ("one top", "A x. A o. (one(o) -> ba_le(x,o))"),
    ("complement meet", "A x. A y. (compl(x,y) -> ba_disjoint(x,y))"),
    ("complement join", "A x. A y. (compl(x,y) -> E o. (one(o) & union(x,y,o)))"),
    ("distributive", "A x. A y. A z. A m. A j. (inter(x,y,m) & ba_le(m,z) & union(y,z,j) & ba_le(x,j)"
                     " -> ba_le(x,z))"),
]


@dataclass(frozen=True)
class BAInvariant:
    kind: str  # "not_ba", "finite", "infinite" or "cap_exceeded"
    value: int | None = None
    failed_axiom: str | None = None

    def __str__(self):
        if self.kind == "infinite":
            return f"i={self.value}"
        if self.kind == "finite":
            return f"finite({self.value})"
        if self.kind == "not_ba":
            return f"not_ba ({self.failed_axiom})" if self.failed_axiom else "not_ba"
        return f"cap_exceeded (i>={self.value})"

    def to_dict(self):
        return {"kind": self.kind, "value": self.value, "failed_axiom": self.failed_axiom}


def _expand(p: Presentation, definitions=_DEFINITIONS) -> Presentation:
    missing = [n for n, k in SIGNATURE.items() if p.signature.get(n) != k]
    if missing:
        raise SignatureMismatch(f"Boolean algebra signature needs {', '.join(f'{n}/{SIGNATURE[n]}' for n in missing)}")
    for name, text, variables in definitions:
        if name not in p.relations:
            p = define(p, name, text, variables)
    return p


def failed_axiom(p: Presentation) -> str | None:
    """Name of the first violated axiom, or None if ``p`` is a Boolean algebra.

    A product of non-empty structures satisfies these axioms exactly when
    every factor does, so products built by ``product_presentation`` are
    checked factor by factor.
    """
    if p.factors:
        for factor in p.factors:
            bad = failed_axiom(factor)
            if bad is not None:
                return bad
        return None
    q = _expand(_expand(p), _AXIOM_DEFINITIONS)
    for name, text in AXIOMS:
        if not eval_sentence(text, q):
            return name
    return None


def disjoint_big_sentence(i: int) -> str:
    """Sentence: there are i pairwise disjoint elements, each above infinitely many atoms.

    It is phrased through chains t1 < ... < ti where t1 and every difference
    t(j+1) - tj lie above infinitely many atoms; the differences are then the
    disjoint elements, and conversely partial unions of disjoint ones form
    such a chain.
    """
    return f"E s. ba_chain{i}(s)"


def _define_levels(q: Presentation, upto: int) -> Presentation:
    if "ba_chain1" not in q.relations:
        q = define(q, "ba_chain1", "ba_big(s)", ("s",))
    for k in range(1, upto):
        name = f"ba_chain{k + 1}"
        if name not in q.relations:
            text = f"E t. (ba_le(t,s) & ba_bigdiff(s,t) & ba_chain{k}(t))"
            q = define(q, name, text, ("s",))
    return q


def ba_invariant(p: Presentation, cap: int = 8, check_axioms: bool = True) -> BAInvariant:
    q = _expand(p)
    if check_axioms:
        bad = failed_axiom(p)
        if bad is not None:
            return BAInvariant("not_ba", failed_axiom=bad)
    if fa.is_finite(p.domain):
        atoms = compile_query("ba_atom(a)", q).relation.automaton
        return BAInvariant("finite", fa.count_words_upto(atoms, _longest(atoms)).upto(_longest(atoms)))
    last = 0
    for i in range(1, cap + 1):
        q = _define_levels(q, i)
        if not eval_sentence(disjoint_big_sentence(i), q):
            return BAInvariant("infinite", last)
        last = i
    return BAInvariant("cap_exceeded", cap)


def _longest(a) -> int:
    return max((len(w) for w in fa.enumerate_llex(a, fa.minimal(a).n_states)), default=0)


def ba_isomorphic(p: Presentation, q: Presentation, cap: int = 8) -> bool:
    results = []
    for side in (p, q):
        r = ba_invariant(side, cap)
        if r.kind == "not_ba":
            raise NotABooleanAlgebra(f"axiom {r.failed_axiom!r} fails")
        if r.kind == "cap_exceeded":
            raise LimitExceeded(f"invariant exceeds cap {cap}")
        results.append((r.kind, r.value))
    return results[0] == results[1]


def power_set_algebra(n: int) -> Presentation:
    """The finite algebra of subsets of {0..n-1}; elements are length-n bit vectors."""
    if n < 0:
        raise ValueError("n must be non-negative")
    alphabet = Alphabet(("0", "1"))
    words = ["".join(bits) for bits in _bit_vectors(n)]
    domain = _finite_language(alphabet, words)

    def rel(arity, fn):
        tuples = [t for t in _tuples(words, arity) if fn(*t)]
        alpha = TupleAlphabet(alphabet, arity)
        autos = [fa.from_word(alpha, convolve([alphabet.encode(w) for w in t])) for t in tuples]
        a = fa.empty(alpha)
        for x in autos:
            a = fa.union(a, x)
        return RegularRelation(tuple(f"_{i}" for i in range(arity)), fa.minimal(a))

    def op(f):
        return lambda *ws: "".join(str(f(*(int(w[i]) for w in ws))) for i in range(n))

    union = op(lambda a, b: a | b)
    inter = op(lambda a, b: a & b)
    compl = op(lambda a: 1 - a)
    rels = {
        "union": rel(3, lambda x, y, z: union(x, y) == z),
        "inter": rel(3, lambda x, y, z: inter(x, y) == z),
        "compl": rel(2, lambda x, y: compl(x) == y),
        "zero": rel(1, lambda x: x == "0" * n),
        "one": rel(1, lambda x: x == "1" * n),
    }
    return Presentation(alphabet, domain, rels)


def _bit_vectors(n):
    if n == 0:
        yield ()
        return
    for rest in _bit_vectors(n - 1):
        yield rest + ("0",)
        yield rest + ("1",)


def _tuples(words, k):
    if k == 0:
        yield ()
        return
    for rest in _tuples(words, k - 1):
        for w in words:
            yield rest + (w,)


def _finite_language(alphabet, words):
    a = fa.empty(alphabet)
    for w in words:
        a = fa.union(a, fa.from_word(alphabet, alphabet.encode(w)))
    return fa.minimal(a)
