"""Catalog of ready-made automatic presentations, each with a semantic oracle.

The shipped ``data/*.pres`` files are generated by :func:`construct`, which
builds every relation from a small step function.  The step functions only
describe the intended semantics; a wrapper runs the domain automaton on each
tape, so padding validity and domain containment hold by construction.
The oracles work on decoded mathematical objects and share no code with
the automata.
"""
from __future__ import annotations

from collections import deque
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import automata as fa
from .automata import PAD, Alphabet, Automaton
from .errors import DecodeError, UnknownBuiltin, UnknownRelation
from .presentation import Presentation, load_presentation, parse_presentation, serialize_presentation
from .relations import RegularRelation, TupleAlphabet

NAMES = ("presburger", "nat_le", "nat_succ", "int_add", "word_struct",
         "b_omega", "q_le", "q_le_u", "tree_a1", "chains_j")

def stepper_relation(domain: Automaton, arity: int, start, step, accept) -> RegularRelation:
    """Explore ``step`` over all tuple symbols, restricted to convolutions of domain words.

    ``step(state, names)`` receives the component names (``None`` for padding)
    and returns the next state or ``None``; ``accept(state)`` marks finals.
    """
    dom = fa.minimal(domain)
    base = dom.alphabet
    alpha = TupleAlphabet(base, arity)
    symbols = list(alpha.symbols)
    named = [tuple(None if c == PAD else base.name(c) for c in s) for s in symbols]
    init = (start, (dom.initial,) * arity)
    ids = {init: 0}
    queue = deque([init])
    rows, finals = [], set()
    while queue:
        state = queue.popleft()
        user, tapes = state
        row = {}
        for sym, names in zip(symbols, named):
            nxt = []
            for c, q in zip(sym, tapes):
                if q is None:
                    if c != PAD:
                        break
                    nxt.append(None)
                elif c == PAD:
                    if q not in dom.finals:
                        break
                    nxt.append(None)
                else:
                    t = dom.delta[q].get(c)
                    if not t:
                        break
                    nxt.append(t[0])
            else:
                u = step(user, names)
                if u is None:
                    continue
                target = (u, tuple(nxt))
                if target not in ids:
                    ids[target] = len(ids)
                    queue.append(target)
                row[sym] = (ids[target],)
        rows.append(row)
        if accept(user) and all(q is None or q in dom.finals for q in tapes):
            finals.add(ids[state])
    a = Automaton(alpha, len(rows), 0, finals, rows)
    tapes = tuple(f"_{i}" for i in range(arity))
    return RegularRelation(tapes, fa.minimal(a))


# -- step functions -----------------------------------------------------------

_BIT = {None: 0, "0": 0, "1": 1}


def _linear(coeffs):
    """LSB-first check that sum(coeffs[i] * value(tape i)) + carry == 0."""
    def step(carry, names):
        s = carry + sum(c * _BIT[n] for c, n in zip(coeffs, names))
        return None if s % 2 else s // 2
    return step


def _compare(names_order):
    rank = {None: -1}
    rank.update({n: i for i, n in enumerate(names_order)})

    def step(state, names):
        a, b = names
        if state != "eq":
            return state
        if a is None:
            return "lt"  # x is a proper prefix of y
        if b is None:
            return None  # y is a proper prefix of x
        if a == b:
            return "eq"
        return "lt" if rank[a] < rank[b] else None
    return step


def _msb_compare(state, names):
    # LSB-first numbers: later (more significant) positions decide
    a, b = (_BIT[n] for n in names)
    if a < b:
        return "lt"
    if a > b:
        return "gt"
    return state


def _int_linear(coeffs):
    sign = {"p": 1, "m": -1, None: 0}

    def step(state, names):
        if state == "start":
            return (tuple(c * sign[n] for c, n in zip(coeffs, names)), 0)
        cs, carry = state
        s = carry + sum(c * _BIT[n] for c, n in zip(cs, names))
        return None if s % 2 else (cs, s // 2)
    return step


def _int_accept(state):
    # "start" means every component is the empty word, i.e. 0 + 0 = 0
    return state == "start" or state[1] == 0


def _append(bit):
    def step(state, names):
        a, b = names
        if state == "same" and a is not None and a == b:
            return "same"
        if state == "same" and a is None and b == bit:
            return "done"
        return None
    return step


def _same_length(state, names):
    return None if None in names else state


def _boolean_op(op):
    """Finite/co-finite sets: leading flag, '#', then raw characteristic bits.

    The last tape is the result; membership of element i is raw bit XOR flag.
    """
    def step(state, names):
        if state == "flags":
            flags = tuple(_BIT[n] for n in names)
            return ("sep", flags) if op(*flags[:-1]) == flags[-1] else None
        kind, flags = state
        if kind == "sep":
            return ("bits", flags)
        members = [_BIT[n] ^ f for n, f in zip(names, flags)]
        return state if op(*members[:-1]) == members[-1] else None
    return step


def _immediate_extension(state, names):
    a, b = names
    if state == "same":
        if a is not None and a == b:
            return "same"
        if a is None:
            return "done" if b == "1" else "zeros"
        return None
    if state == "zeros" and a is None:
        return "done" if b == "1" else "zeros"
    return None


def _flip_first_zero(state, names):
    a, b = names
    if state == "ones":
        if a == b == "1":
            return "ones"
        if a == "0" and b == "1":
            return "flipped"
        return None
    return "flipped" if a == b else None


def _even_length(parity, names):
    return 1 - parity


# -- construction -------------------------------------------------------------


def _build(alphabet_names, domain_regex, specs) -> Presentation:
    alphabet = Alphabet(alphabet_names)
    domain = fa.regex(domain_regex, alphabet)
    rels = {name: stepper_relation(domain, arity, start, step, accept)
            for name, (arity, start, step, accept) in specs.items()}
    return Presentation(alphabet, domain, rels, domain_regex)


def construct(name: str) -> Presentation:
    """Build a catalog entry from its step functions (the source of the data files)."""
    nat = ("0", "1"), "(|(0|1)*1)"
    zero = lambda c: c == 0  # noqa: E731
    if name == "presburger":
        return _build(*nat, {"plus": (3, 0, _linear((1, 1, -1)), zero)})
    if name == "nat_le":
        return _build(*nat, {"le": (2, "eq", _msb_compare, lambda s: s != "gt")})
    if name == "nat_succ":
        return _build(*nat, {"succ": (2, 1, _linear((1, -1)), zero)})
    if name == "int_add":
        return _build(("0", "1", "p", "m"), "(|(p|m)(0|1)*1)",
                      {"plus": (3, "start", _int_linear((1, 1, -1)), _int_accept)})
    if name == "word_struct":
        return _build(("0", "1"), "(0|1)*", {
            "L": (2, "same", _append("0"), lambda s: s == "done"),
            "R": (2, "same", _append("1"), lambda s: s == "done"),
            "E": (2, 0, _same_length, lambda s: True),
            "lex": (2, "eq", _compare("01"), lambda s: True),
        })
    if name == "b_omega":
        ops = {
            "union": (3, lambda x, y: x | y),
            "inter": (3, lambda x, y: x & y),
            "compl": (2, lambda x: 1 - x),
            "zero": (1, lambda: 0),
            "one": (1, lambda: 1),
        }
        return _build(("0", "1", "#"), "(0|1)#(|(0|1)*1)",
                      {n: (k, "flags", _boolean_op(op), lambda s: s != "flags")
                       for n, (k, op) in ops.items()})
    if name in ("q_le", "q_le_u"):
        specs = {
            "le": (2, "eq", _compare("01"), lambda s: True),
            "lt": (2, "eq", _compare("01"), lambda s: s == "lt"),
        }
        if name == "q_le_u":
            specs["U"] = (1, 0, _even_length, lambda s: s == 0)
        return _build(("0", "1"), "(0|1)*1", specs)
    if name == "tree_a1":
        return _build(("0", "1"), "(|(0|1)*1)",
                      {"E": (2, "same", _immediate_extension, lambda s: s == "done")})
    if name == "chains_j":
        return _build(("0", "1", "#"), "11*0*#1*",
                      {"E": (2, "ones", _flip_first_zero, lambda s: s == "flipped")})
    raise UnknownBuiltin(name)


def data_path(name: str) -> Path:
    return Path(str(resources.files("autostruct") / "data" / f"{name}.pres"))


def builtin(name: str) -> Presentation:
    """Load a catalog entry from its shipped presentation file."""
    if name not in NAMES:
        raise UnknownBuiltin(f"unknown builtin {name!r}; choose from {', '.join(NAMES)}")
    path = data_path(name)
    if not path.exists():
        return construct(name)
    return load_presentation(path)


def builtin_text(name: str) -> str:
    if name not in NAMES:
        raise UnknownBuiltin(f"unknown builtin {name!r}")
    path = data_path(name)
    return path.read_text() if path.exists() else serialize_presentation(construct(name))


def write_catalog(directory) -> list[Path]:
    """Regenerate the presentation files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for name in NAMES:
        path = directory / f"{name}.pres"
        text = serialize_presentation(construct(name))
        parse_presentation(text)
        path.write_text(f"# {name}\n{text}")
        out.append(path)
    return out


# -- oracles --------------------------------------------------------------------


def _bits_value(word: str) -> int:
    return sum(1 << i for i, c in enumerate(word) if c == "1")


class Oracle:
    """Decodes words to objects and evaluates relations on the objects."""

    relations: dict = {}

    def is_element(self, word: str) -> bool:
        raise NotImplementedError

    def decode(self, word: str):
        if not self.is_element(word):
            raise DecodeError(f"{word!r} is not a domain word")
        return self._decode(word)

    def holds(self, relation: str, *objects) -> bool:
        try:
            fn = self.relations[relation]
        except KeyError:
            raise UnknownRelation(relation) from None
        return bool(fn(*objects))

    def holds_words(self, relation: str, *words) -> bool:
        return self.holds(relation, *(self.decode(w) for w in words))


def _is_binary(word):
    return set(word) <= {"0", "1"} and not word.endswith("0")


class NaturalOracle(Oracle):
    def __init__(self, relations):
        self.relations = relations

    def is_element(self, word):
        return _is_binary(word)

    def _decode(self, word):
        return _bits_value(word)


class IntegerOracle(Oracle):
    relations = {"plus": lambda a, b, c: a + b == c}

    def is_element(self, word):
        return word == "" or (word[0] in "pm" and word[1:] != "" and _is_binary(word[1:]))

    def _decode(self, word):
        if word == "":
            return 0
        return (-1 if word[0] == "m" else 1) * _bits_value(word[1:])


class WordOracle(Oracle):
    relations = {
        "L": lambda x, y: y == x + "0",
        "R": lambda x, y: y == x + "1",
        "E": lambda x, y: len(x) == len(y),
        "lex": lambda x, y: x <= y,
    }

    def is_element(self, word):
        return set(word) <= {"0", "1"}

    def _decode(self, word):
        return word


class FinCofin:
    """A finite or co-finite subset of the naturals."""

    __slots__ = ("cofinite", "members")

    def __init__(self, members, cofinite=False):
        self.members = frozenset(members)  # the set itself, or its complement when co-finite
        self.cofinite = bool(cofinite)

    def __contains__(self, n):
        return (n in self.members) != self.cofinite

    def complement(self):
        return FinCofin(self.members, not self.cofinite)

    def __or__(self, other):
        if not self.cofinite and not other.cofinite:
            return FinCofin(self.members | other.members)
        if self.cofinite and other.cofinite:
            return FinCofin(self.members & other.members, True)
        fin, co = (self, other) if other.cofinite else (other, self)
        return FinCofin(co.members - fin.members, True)

    def __and__(self, other):
        return (self.complement() | other.complement()).complement()

    def __eq__(self, other):
        return isinstance(other, FinCofin) and (self.cofinite, self.members) == (other.cofinite, other.members)

    def __hash__(self):
        return hash((self.cofinite, self.members))

    def intervals(self):
        """Maximal half-open intervals [a, b) of the finite part; b is None for an unbounded tail."""
        top = max(self.members, default=-1) + 2
        out, start = [], None
        for n in range(top):
            if n in self and start is None:
                start = n
            elif n not in self and start is not None:
                out.append((start, n))
                start = None
        if start is not None:
            out.append((start, None))
        return out

    def __repr__(self):
        kind = "cofinite" if self.cofinite else "finite"
        return f"FinCofin({sorted(self.members)}, {kind})"


class BooleanOracle(Oracle):
    relations = {
        "union": lambda x, y, z: (x | y) == z,
        "inter": lambda x, y, z: (x & y) == z,
        "compl": lambda x, y: x.complement() == y,
        "zero": lambda x: x == FinCofin(()),
        "one": lambda x: x == FinCofin((), True),
    }

    def is_element(self, word):
        return (len(word) >= 2 and word[0] in "01" and word[1] == "#"
                and set(word[2:]) <= {"0", "1"} and not word.endswith("0"))

    def _decode(self, word):
        return FinCofin((i for i, c in enumerate(word[2:]) if c == "1"), word[0] == "1")


def _dyadic(word):
    return Fraction(_bits_value(word[::-1]), 2 ** len(word))


class RationalOracle(Oracle):
    def __init__(self, with_u):
        self.relations = {"le": lambda a, b: a <= b, "lt": lambda a, b: a < b}
        if with_u:
            # denominators are exact powers of two since the word ends in 1
            self.relations["U"] = lambda a: (a.denominator.bit_length() - 1) % 2 == 0

    def is_element(self, word):
        return set(word) <= {"0", "1"} and word.endswith("1")

    def _decode(self, word):
        return _dyadic(word)


class TreeOracle(Oracle):
    """Words 0^{n1}1...0^{nk}1 decode to the sequence (n1, ..., nk)."""

    relations = {"E": lambda s, t: len(t) == len(s) + 1 and t[:-1] == s}

    def is_element(self, word):
        return set(word) <= {"0", "1"} and (word == "" or word.endswith("1"))

    def _decode(self, word):
        return tuple(len(block) for block in word.split("1")[:-1])


class ChainOracle(Oracle):
    """1^b 0^(L-b) # 1^c decodes to (L, b, c): vertex b of copy c of the L-vertex chain."""

    relations = {"E": lambda u, v: u[0] == v[0] and u[2] == v[2] and v[1] == u[1] + 1}

    def is_element(self, word):
        if word.count("#") != 1:
            return False
        left, right = word.split("#")
        b = len(left) - len(left.lstrip("1"))
        return b >= 1 and set(left[b:]) <= {"0"} and set(right) <= {"1"}

    def _decode(self, word):
        left, right = word.split("#")
        return (len(left), left.count("1"), len(right))


ORACLES = {
    "presburger": NaturalOracle({"plus": lambda a, b, c: a + b == c}),
    "nat_le": NaturalOracle({"le": lambda a, b: a <= b}),
    "nat_succ": NaturalOracle({"succ": lambda a, b: b == a + 1}),
    "int_add": IntegerOracle(),
    "word_struct": WordOracle(),
    "b_omega": BooleanOracle(),
    "q_le": RationalOracle(False),
    "q_le_u": RationalOracle(True),
    "tree_a1": TreeOracle(),
    "chains_j": ChainOracle(),
}


def oracle(name: str) -> Oracle:
    try:
        return ORACLES[name]
    except KeyError:
        raise UnknownBuiltin(name) from None


def oracle_eval(name: str, relation: str, args) -> bool:
    """Evaluate ``relation`` on already decoded objects of builtin ``name``."""
    return oracle(name).holds(relation, *args)


def contrast_bitgraph(n: int, m: int) -> bool:
    """True iff bit m of n is set; the edge rule of an explicit random graph."""
    if n < 0 or m < 0:
        raise ValueError("arguments must be natural numbers")
    return bool((n >> m) & 1)
