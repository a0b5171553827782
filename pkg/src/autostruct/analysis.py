"""Counting diagnostics for automatic presentations.

Each check enumerates a bounded fragment and compares what it sees with a
bound that every automatic presentation must obey: the length gap of locally
finite relations, the length of iterated products, prefix counts of regular
domains, the number of distinct columns of a definable binary relation, and
the Dilworth bound for finite partial orders.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import automata as fa
from . import relations as rel
from .builtins import contrast_bitgraph
from .errors import ArityMismatch, NotAFunction, NotAPoset
from .logic import compile_query
from .presentation import Presentation


def _report_lines(obj) -> list[str]:
    out = []
    for key, value in asdict(obj).items():
        if isinstance(value, Fraction):
            value = f"{value.numerator}/{value.denominator}"
        out.append(f"{key}: {value}")
    return out


def _report_dict(obj) -> dict:
    out = {}
    for key, value in asdict(obj).items():
        if isinstance(value, Fraction):
            value = str(value)
        elif isinstance(value, tuple):
            value = list(value)
        out[key] = value
    return out


class _Report:
    def lines(self) -> list[str]:
        return _report_lines(self)

    def to_dict(self) -> dict:
        return _report_dict(self)


# -- length gap ----------------------------------------------------------------


@dataclass(frozen=True)
class GapReport(_Report):
    relation: str
    split: tuple
    max_gap: int | None
    pump_bound: int
    depth: int
    tuples: int
    holds: bool


def gap_check(p: Presentation, relation: str, split, depth: int) -> GapReport:
    """Largest excess of the back components' length over the front components' length."""
    r = p.relation(relation)
    k, l = split
    if k < 0 or l < 0 or k + l != r.arity:
        raise ArityMismatch(f"split {k},{l} does not match arity {r.arity}")
    a = fa.minimal(r.automaton)
    worst, count = None, 0
    for comps in rel.RegularRelation(r.tapes, a).members(depth):
        count += 1
        front = max((len(c) for c in comps[:k]), default=0)
        back = max((len(c) for c in comps[k:]), default=0)
        gap = back - front
        worst = gap if worst is None else max(worst, gap)
    bound = a.n_states
    return GapReport(relation, (k, l), worst, bound, depth, count, worst is None or worst <= bound)


# -- product lengths -------------------------------------------------------------


@dataclass(frozen=True)
class ProductLengthReport(_Report):
    relation: str
    states: int
    m_max: int
    factor_len: int
    lists_checked: int
    worst_slack: int | None
    violation: tuple | None
    holds: bool


class _Operation:
    """A binary operation given by the graph relation ``r(a, b, c)``: a * b = c."""

    def __init__(self, p: Presentation, relation: str):
        self.p = p
        self.r = p.relation(relation)
        if self.r.arity != 3:
            raise ArityMismatch(f"{relation!r} must have arity 3 to be an operation graph")
        self.states = fa.minimal(self.r.automaton).n_states
        self.memo: dict = {}

    def __call__(self, a: tuple, b: tuple) -> tuple:
        key = (a, b)
        hit = self.memo.get(key)
        if hit is None:
            t0, t1, t2 = self.r.tapes
            bound = max(len(a), len(b)) + self.states + 1
            out = rel.image(self.r, {t0: a, t1: b}, bound)
            if len(out) != 1:
                raise NotAFunction(
                    f"{self.p.alphabet.decode(a)!r} * {self.p.alphabet.decode(b)!r} has {len(out)} results")
            hit = self.memo[key] = out[0][0]
        return hit


def _log_bound(m: int) -> int:
    return math.ceil(math.log2(m)) if m > 1 else 0


def product_length_check(p: Presentation, relation: str, m_max: int = 8, factor_len: int = 4,
                         samples=None) -> ProductLengthReport:
    """Check |s1 * ... * sm| <= max|si| + k * ceil(log2 m), folding products from the left.

    Without ``samples`` every list of up to ``m_max`` factors drawn from the
    domain words of length <= ``factor_len`` is covered; lists that reach the
    same (partial product, longest factor) are merged, so the work stays small.
    ``samples`` may instead give explicit factor lists (words).
    """
    op = _Operation(p, relation)
    k = op.states
    worst, violation, checked = None, None, 0

    def record(prod, longest, m, witness):
        nonlocal worst, violation
        slack = longest + k * _log_bound(m) - len(prod)
        if worst is None or slack < worst:
            worst = slack
            if slack < 0 and violation is None:
                violation = witness

    if samples is not None:
        for factors in samples:
            words = [p.alphabet.encode(w) for w in factors]
            if not words:
                continue
            prod = words[0]
            for w in words[1:]:
                prod = op(prod, w)
            checked += 1
            record(prod, max(len(w) for w in words), len(words), tuple(factors))
        return ProductLengthReport(relation, k, max((len(s) for s in samples), default=0), factor_len,
                                   checked, worst, violation, violation is None)

    factors = list(fa.enumerate_llex(p.domain, factor_len))
    level = {}
    for w in factors:
        state = (w, len(w))
        level[state] = level.get(state, 0) + 1
        record(w, len(w), 1, (p.alphabet.decode(w),))
    checked += len(factors)
    for m in range(2, m_max + 1):
        nxt: dict = {}
        for (prod, longest), mult in level.items():
            for w in factors:
                state = (op(prod, w), max(longest, len(w)))
                nxt[state] = nxt.get(state, 0) + mult
        for (prod, longest), mult in nxt.items():
            record(prod, longest, m, (m, p.alphabet.decode(prod), longest))
            checked += mult
        level = nxt
    return ProductLengthReport(relation, k, m_max, factor_len, checked, worst, violation, violation is None)


# -- prefix counts -----------------------------------------------------------------


@dataclass(frozen=True)
class PrefixReport(_Report):
    n: int
    k: int
    states: int
    alphabet_size: int
    prefixes: int
    words_upto_n: int
    words_upto_n_plus_k: int
    prefix_bound_holds: bool
    growth_bound_holds: bool


def prefix_check(domain: fa.Automaton, n: int, k: int = 2) -> PrefixReport:
    """Prefix count and growth of a regular domain against |Sigma|^c bounds (c = trimmed DFA size)."""
    d = fa.minimal(domain)
    c = d.n_states
    sigma = domain.alphabet.size
    counts = fa.count_words_upto(d, n + k)
    prefixes = fa.prefix_count(d, n)
    upto_n = counts.upto(n)
    upto_nk = counts.upto(n + k)
    return PrefixReport(n, k, c, sigma, prefixes, upto_n, upto_nk,
                        prefixes <= sigma ** c * upto_n, upto_nk <= sigma ** (k + c) * upto_n)


# -- column census -------------------------------------------------------------------


@dataclass(frozen=True)
class ColumnCensus(_Report):
    n: int
    scan_bound: int
    distinct_columns: int
    elements_upto_n: int
    ratio: Fraction


def column_census(p: Presentation, phi, n: int, slack: int | None = None) -> ColumnCensus:
    """Distinct columns {x in A^{<=n} : phi(x, y)} over y in A^{<=n+slack}; a lower bound on the true count.

    The column variable is ``x`` and the row variable ``y`` when both occur,
    otherwise the two free variables in sorted order.
    """
    q = compile_query(phi, p)
    if len(q.variables) != 2:
        raise ArityMismatch(f"census needs exactly two free variables, got {q.variables}")
    xv, yv = ("x", "y") if set(q.variables) == {"x", "y"} else q.variables
    if slack is None:
        slack = fa.minimal(q.relation.automaton).n_states
    bound = n + slack
    xs = list(fa.enumerate_llex(p.domain, n))
    columns = _columns(rel.reorder(q.relation, (xv, yv)).automaton, fa.minimal(p.domain), xs, bound)
    return ColumnCensus(n, bound, len(columns), len(xs), Fraction(len(columns), len(xs)))


def _columns(a: fa.Automaton, dom: fa.Automaton, xs, bound: int) -> set:
    """Distinct sets {i : (xs[i], y) accepted} over domain words y of length <= bound.

    All x are run in lockstep while y is extended one symbol at a time;
    prefixes of y reaching the same depth, domain state and state vector
    have the same future columns, so each such node is expanded once.
    """
    a = fa.determinize(a, complete_it=False)
    pad = fa.PAD

    def move(q, sym):
        if q is None:
            return None
        t = a.delta[q].get(sym)
        return t[0] if t else None

    def finishes(q, x, k):
        for j in range(k, len(x)):
            q = move(q, (x[j], pad))
            if q is None:
                return False
        return q in a.finals

    columns, seen = set(), set()
    stack = [(0, dom.initial, tuple(a.initial for _ in xs))]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        k, d, vec = node
        if d in dom.finals:
            columns.add(frozenset(i for i, (q, x) in enumerate(zip(vec, xs))
                                  if q is not None and finishes(q, x, k)))
        if k >= bound:
            continue
        for c, targets in dom.delta[d].items():
            nvec = tuple(move(q, (x[k] if k < len(x) else pad, c)) for q, x in zip(vec, xs))
            stack.append((k + 1, targets[0], nvec))
    return columns


def bitgraph_census(k: int) -> ColumnCensus:
    """Census of the symmetric bit graph on {0..2^(k+1)-1} with columns over the first k vertices."""
    xs = range(k)
    ys = range(2 ** (k + 1))

    def edge(a, b):
        return a != b and (contrast_bitgraph(a, b) or contrast_bitgraph(b, a))

    distinct = len({tuple(edge(x, y) for x in xs) for y in ys})
    return ColumnCensus(k, len(ys), distinct, k, Fraction(distinct, k))


# -- Dilworth ----------------------------------------------------------------------------


@dataclass
class FinitePoset:
    elements: list
    leq: list = field(repr=False)

    def __post_init__(self):
        n = len(self.elements)
        if len(self.leq) != n or any(len(row) != n for row in self.leq):
            raise NotAPoset("order matrix does not match the element count")
        for i in range(n):
            if not self.leq[i][i]:
                raise NotAPoset(f"not reflexive at {self.elements[i]!r}")
        for i, j in itertools.combinations(range(n), 2):
            if self.leq[i][j] and self.leq[j][i]:
                raise NotAPoset(f"not antisymmetric at {self.elements[i]!r}, {self.elements[j]!r}")
        for i, j, k in itertools.product(range(n), repeat=3):
            if self.leq[i][j] and self.leq[j][k] and not self.leq[i][k]:
                raise NotAPoset(f"not transitive at {self.elements[i]!r}, {self.elements[j]!r}, {self.elements[k]!r}")

    @classmethod
    def from_relation(cls, elements, le):
        elements = list(elements)
        return cls(elements, [[bool(le(a, b)) for b in elements] for a in elements])

    def comparable(self, i, j) -> bool:
        return self.leq[i][j] or self.leq[j][i]


@dataclass(frozen=True)
class DilworthResult(_Report):
    n: int
    antichain: int
    chain: int
    holds: bool


def max_antichain(ps: FinitePoset) -> int:
    n = len(ps.elements)
    best = 0

    def grow(chosen, candidates):
        nonlocal best
        if len(chosen) + len(candidates) <= best:
            return
        if not candidates:
            best = max(best, len(chosen))
            return
        v, rest = candidates[0], candidates[1:]
        grow(chosen + [v], [u for u in rest if not ps.comparable(u, v)])
        grow(chosen, rest)

    grow([], list(range(n)))
    return best


def longest_chain(ps: FinitePoset) -> int:
    n = len(ps.elements)
    below = {j: [i for i in range(n) if i != j and ps.leq[i][j]] for j in range(n)}
    order = sorted(range(n), key=lambda j: len(below[j]))
    length = {}
    for j in order:
        length[j] = 1 + max((length[i] for i in below[j]), default=0)
    return max(length.values(), default=0)


def dilworth_check(ps: FinitePoset) -> DilworthResult:
    if len(ps.elements) > 20:
        raise ValueError("exhaustive antichain search is limited to 20 elements")
    n = len(ps.elements)
    a, c = max_antichain(ps), longest_chain(ps)
    return DilworthResult(n, a, c, n <= a * c)


def random_poset(n: int, rng: random.Random, density: float = 0.3) -> FinitePoset:
    """Transitive closure of a random DAG on 0..n-1 (edges only go upward)."""
    leq = [[i == j for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                leq[i][j] = True
    for k in range(n):
        for i in range(n):
            if leq[i][k]:
                for j in range(n):
                    if leq[k][j]:
                        leq[i][j] = True
    return FinitePoset(list(range(n)), leq)
