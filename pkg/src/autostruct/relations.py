"""Regular relations: automata reading convolutions of word tuples.

A tuple symbol is a tuple of base-symbol indices, with ``PAD`` standing for
the padding letter.  Every relation keeps its tapes labelled; binary
operations line tapes up by label, so operands need not share a tape set.
"""
from __future__ import annotations

import itertools
from collections import deque
from typing import Iterable, Sequence

from . import automata as fa
from .automata import PAD, PAD_NAME, Alphabet, Automaton
from .errors import ArityMismatch, DuplicateTape, UnknownSymbol, UnknownTape

_DONE = -1
_SINK = -2


class TupleAlphabet:
    """All ``arity``-tuples over base + padding, except the all-padding tuple."""

    def __init__(self, base: Alphabet, arity: int):
        if arity < 0:
            raise ValueError("arity must be non-negative")
        self.base = base
        self.arity = arity

    @property
    def size(self) -> int:
        return (self.base.size + 1) ** self.arity - 1

    @property
    def symbols(self):
        letters = list(self.base.symbols) + [PAD]
        allpad = (PAD,) * self.arity
        for sym in itertools.product(letters, repeat=self.arity):
            if sym != allpad:
                yield sym

    def name(self, symbol) -> str:
        return ",".join(self.base.name(c) for c in symbol)

    def parse_symbol(self, token: str):
        parts = token.split(",")
        if len(parts) != self.arity:
            raise ArityMismatch(f"symbol {token!r} has {len(parts)} components, expected {self.arity}")
        sym = tuple(PAD if p == PAD_NAME else self.base.parse_symbol(p) for p in parts)
        if all(c == PAD for c in sym):
            raise UnknownSymbol("the all-padding tuple is not a symbol")
        return sym

    def __eq__(self, other):
        return type(other) is TupleAlphabet and other.base == self.base and other.arity == self.arity

    def __hash__(self):
        return hash(("TupleAlphabet", self.base, self.arity))

    def __repr__(self):
        return f"TupleAlphabet({self.base!r}, {self.arity})"


def convolve(components: Sequence[Sequence[int]]) -> tuple:
    """Convolution of a word tuple: k-th letter is the tuple of k-th letters, padded."""
    length = max((len(w) for w in components), default=0)
    return tuple(
        tuple(w[k] if k < len(w) else PAD for w in components) for k in range(length)
    )


def deconvolve(word: Sequence[tuple], arity: int) -> tuple:
    out = [[] for _ in range(arity)]
    for sym in word:
        for i, c in enumerate(sym):
            if c != PAD:
                out[i].append(c)
    return tuple(tuple(w) for w in out)


class RegularRelation:
    """An automaton over a tuple alphabet together with tape labels."""

    __slots__ = ("tapes", "automaton")

    def __init__(self, tapes: Sequence[str], automaton: Automaton):
        tapes = tuple(tapes)
        if len(set(tapes)) != len(tapes):
            raise DuplicateTape(f"duplicate tapes in {tapes}")
        if not isinstance(automaton.alphabet, TupleAlphabet) or automaton.alphabet.arity != len(tapes):
            raise ArityMismatch("automaton alphabet does not match the tape count")
        self.tapes = tapes
        self.automaton = automaton

    @property
    def arity(self) -> int:
        return len(self.tapes)

    @property
    def base(self) -> Alphabet:
        return self.automaton.alphabet.base

    @property
    def alphabet(self) -> TupleAlphabet:
        return self.automaton.alphabet

    def index(self, tape: str) -> int:
        try:
            return self.tapes.index(tape)
        except ValueError:
            raise UnknownTape(tape) from None

    def contains(self, *words) -> bool:
        if len(words) != self.arity:
            raise ArityMismatch(f"expected {self.arity} words, got {len(words)}")
        encoded = [self.base.encode(w) if isinstance(w, str) else tuple(w) for w in words]
        return self.automaton.accepts(convolve(encoded))

    def members(self, max_len: int):
        """Tuples whose convolution has length <= max_len, in length-lex order of convolutions."""
        for word in fa.enumerate_llex(self.automaton, max_len):
            yield deconvolve(word, self.arity)

    def minimal(self) -> "RegularRelation":
        return RegularRelation(self.tapes, fa.minimal(self.automaton))

    def __repr__(self):
        return f"<RegularRelation tapes={self.tapes} {self.automaton!r}>"


# -- basic relations ---------------------------------------------------------


def from_domain(domain: Automaton, tape: str) -> RegularRelation:
    """The unary relation of a domain automaton."""
    alpha = TupleAlphabet(domain.alphabet, 1)
    return RegularRelation((tape,), fa.map_symbols(domain, lambda s: (s,), alpha))


def to_domain(r: RegularRelation) -> Automaton:
    if r.arity != 1:
        raise ArityMismatch("only unary relations convert to plain automata")
    return fa.map_symbols(r.automaton, lambda s: s[0], r.base)


def equality(domain: Automaton, x: str, y: str) -> RegularRelation:
    alpha = TupleAlphabet(domain.alphabet, 2)
    r = RegularRelation((x, y), fa.map_symbols(domain, lambda s: (s, s), alpha))
    return reorder(r, tuple(sorted((x, y))))


def everything(base: Alphabet, tapes: Sequence[str]) -> RegularRelation:
    """All padding-valid convolutions over ``tapes`` (no domain constraint)."""
    rel = true_relation(base)
    for t in tapes:
        rel = join(rel, from_domain(fa.universal(base), t))
    return rel


def true_relation(base: Alphabet) -> RegularRelation:
    return RegularRelation((), fa.epsilon(TupleAlphabet(base, 0)))


def false_relation(base: Alphabet, tapes: Sequence[str] = ()) -> RegularRelation:
    return RegularRelation(tuple(tapes), fa.empty(TupleAlphabet(base, len(tapes))))


def universe(domain: Automaton, tapes: Sequence[str]) -> RegularRelation:
    """Convolutions of all tuples of domain elements."""
    rel = true_relation(domain.alphabet)
    for t in sorted(tapes):
        rel = join(rel, from_domain(domain, t))
    return rel


# -- structural operations --------------------------------------------------


def reorder(r: RegularRelation, order: Sequence[str]) -> RegularRelation:
    order = tuple(order)
    if sorted(order) != sorted(r.tapes):
        raise UnknownTape(f"{order} is not a permutation of {r.tapes}")
    if order == r.tapes:
        return r
    perm = [r.tapes.index(t) for t in order]
    alpha = TupleAlphabet(r.base, r.arity)
    return RegularRelation(order, fa.map_symbols(r.automaton, lambda s: tuple(s[i] for i in perm), alpha))


def rename(r: RegularRelation, mapping: dict) -> RegularRelation:
    """Relabel tapes; the symbol layout is unchanged."""
    return RegularRelation(tuple(mapping.get(t, t) for t in r.tapes), r.automaton)


def canonical_order(r: RegularRelation) -> RegularRelation:
    return reorder(r, tuple(sorted(r.tapes)))


def _options(a: Automaton, state, cache):
    """Moves available to one side of a join: (symbol or None for all-padding, next state)."""
    opts = cache.get(state)
    if opts is None:
        opts = []
        if state != _DONE:
            for s, ts in a.delta[state].items():
                for t in ts:
                    opts.append((s, t))
        if state == _DONE or state in a.finals:
            opts.append((None, _DONE))
        cache[state] = opts
    return opts


def join(r1: RegularRelation, r2: RegularRelation) -> RegularRelation:
    """Tuples over the union of both tape sets whose restrictions lie in r1 and r2.

    A side whose tapes have all run into padding is marked done; it must have
    been in a final state at that point and reads nothing afterwards.
    """
    if r1.base != r2.base:
        raise fa.AlphabetMismatch("relations over different base alphabets")
    tapes = tuple(sorted(set(r1.tapes) | set(r2.tapes)))
    shared = [t for t in tapes if t in r1.tapes and t in r2.tapes]
    k1 = [r1.tapes.index(t) for t in shared]
    k2 = [r2.tapes.index(t) for t in shared]
    # each output position reads from side 1 if possible, else side 2
    src = [(0, r1.tapes.index(t)) if t in r1.tapes else (1, r2.tapes.index(t)) for t in tapes]
    pad1 = (PAD,) * r1.arity
    pad2 = (PAD,) * r2.arity
    a1, a2 = r1.automaton, r2.automaton
    c1: dict = {}
    c2: dict = {}
    grouped2: dict = {}

    def groups(q):
        g = grouped2.get(q)
        if g is None:
            g = {}
            for s, t in _options(a2, q, c2):
                sym = pad2 if s is None else s
                g.setdefault(tuple(sym[i] for i in k2), []).append((s, t))
            grouped2[q] = g
        return g

    allpad = (PAD,) * len(tapes)
    start = (a1.initial, a2.initial)
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        p, q = order[i]
        i += 1
        row: dict = {}
        g2 = groups(q)
        for s1, t1 in _options(a1, p, c1):
            sym1 = pad1 if s1 is None else s1
            for s2, t2 in g2.get(tuple(sym1[j] for j in k1), ()):
                sym2 = pad2 if s2 is None else s2
                joint = tuple(sym1[j] if side == 0 else sym2[j] for side, j in src)
                if joint == allpad:
                    continue
                key = (t1, t2)
                n = index.get(key)
                if n is None:
                    n = index[key] = len(order)
                    order.append(key)
                row.setdefault(joint, set()).add(n)
        delta.append({s: tuple(sorted(ts)) for s, ts in row.items()})
    finals = [
        n for n, (p, q) in enumerate(order)
        if (p == _DONE or p in a1.finals) and (q == _DONE or q in a2.finals)
    ]
    alpha = TupleAlphabet(r1.base, len(tapes))
    return RegularRelation(tapes, Automaton(alpha, len(order), 0, finals, delta))


def antijoin(r: RegularRelation, s: RegularRelation) -> RegularRelation:
    """Tuples of r whose restriction to s's tapes is *not* in s (tapes(s) must be within tapes(r))."""
    missing = set(s.tapes) - set(r.tapes)
    if missing:
        raise UnknownTape(f"tapes {sorted(missing)} not present in the left operand")
    ks = [r.tapes.index(t) for t in s.tapes]
    ds = fa.determinize(s.automaton, complete_it=False)
    a = r.automaton
    start = (a.initial, ds.initial)
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        p, q = order[i]
        i += 1
        row = {}
        for sym, ts in a.delta[p].items():
            proj = tuple(sym[j] for j in ks)
            if all(c == PAD for c in proj):
                if q in (_DONE, _SINK):
                    nq = q
                else:
                    nq = _DONE if q in ds.finals else _SINK
            elif q in (_DONE, _SINK):
                nq = _SINK
            else:
                hit = ds.delta[q].get(proj)
                nq = hit[0] if hit else _SINK
            targets = []
            for t in ts:
                key = (t, nq)
                n = index.get(key)
                if n is None:
                    n = index[key] = len(order)
                    order.append(key)
                targets.append(n)
            row[sym] = tuple(sorted(targets))
        delta.append(row)
    finals = [
        n for n, (p, q) in enumerate(order)
        if p in a.finals and not (q == _DONE or (q >= 0 and q in ds.finals))
    ]
    return RegularRelation(r.tapes, Automaton(r.alphabet, len(order), 0, finals, delta))


def union(r1: RegularRelation, r2: RegularRelation) -> RegularRelation:
    if set(r1.tapes) != set(r2.tapes):
        raise UnknownTape(f"union needs equal tape sets, got {r1.tapes} and {r2.tapes}")
    r2 = reorder(r2, r1.tapes)
    return RegularRelation(r1.tapes, fa.union(r1.automaton, r2.automaton))


def intersect(r1: RegularRelation, r2: RegularRelation) -> RegularRelation:
    if set(r1.tapes) != set(r2.tapes):
        raise UnknownTape(f"intersection needs equal tape sets, got {r1.tapes} and {r2.tapes}")
    r2 = reorder(r2, r1.tapes)
    return RegularRelation(r1.tapes, fa.intersect(r1.automaton, r2.automaton))


def cylindrify(r: RegularRelation, new_tapes: Iterable[str], domain: Automaton | None = None) -> RegularRelation:
    """Add unconstrained tapes (or tapes ranging over ``domain`` when given)."""
    new_tapes = list(new_tapes)
    for t in new_tapes:
        if t in r.tapes or new_tapes.count(t) > 1:
            raise DuplicateTape(t)
    fill = domain if domain is not None else fa.universal(r.base)
    out = r
    for t in new_tapes:
        out = join(out, from_domain(fill, t))
    return out


def project(r: RegularRelation, tape: str) -> RegularRelation:
    """Existentially quantify one tape away.

    Letters that become all-padding after dropping the tape can only occur
    at the end of a word; states that reach acceptance through such a tail
    become final and the tail transitions are removed.
    """
    k = r.index(tape)
    a = r.automaton
    tail = [set() for _ in range(a.n_states)]
    delta = []
    for p, row in enumerate(a.delta):
        new: dict = {}
        for sym, ts in row.items():
            rest = sym[:k] + sym[k + 1:]
            if all(c == PAD for c in rest):
                tail[p].update(ts)
                continue
            new.setdefault(rest, set()).update(ts)
        delta.append({s: tuple(sorted(ts)) for s, ts in new.items()})
    rev = [[] for _ in range(a.n_states)]
    for p, ts in enumerate(tail):
        for q in ts:
            rev[q].append(p)
    finals = set(a.finals)
    stack = list(finals)
    while stack:
        q = stack.pop()
        for p in rev[q]:
            if p not in finals:
                finals.add(p)
                stack.append(p)
    tapes = r.tapes[:k] + r.tapes[k + 1:]
    alpha = TupleAlphabet(r.base, len(tapes))
    return RegularRelation(tapes, Automaton(alpha, a.n_states, a.initial, finals, delta))


def length_guard(r: RegularRelation, tape: str, others: Sequence[str], slack: int) -> RegularRelation:
    """Restrict r to tuples with |tape| > max(|o| for o in others) + slack."""
    k = r.index(tape)
    ko = [r.index(o) for o in others]
    cap = slack + 1
    a = r.automaton
    start = (a.initial, 0)
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        p, c = order[i]
        i += 1
        row = {}
        for sym, ts in a.delta[p].items():
            nc = c
            if sym[k] != PAD and all(sym[j] == PAD for j in ko):
                nc = min(c + 1, cap)
            targets = []
            for t in ts:
                key = (t, nc)
                n = index.get(key)
                if n is None:
                    n = index[key] = len(order)
                    order.append(key)
                targets.append(n)
            row[sym] = tuple(sorted(targets))
        delta.append(row)
    finals = [n for n, (p, c) in enumerate(order) if p in a.finals and c == cap]
    return RegularRelation(r.tapes, Automaton(r.alphabet, len(order), 0, finals, delta))


# -- validity and enumeration -------------------------------------------------


def padding_violation_detector(alphabet: TupleAlphabet) -> Automaton:
    """Words in which some tape shows padding followed by a real letter."""
    n = alphabet.arity
    symbols = list(alphabet.symbols)
    # state 0: scanning; 1+i: tape i has padded; n+1: violation seen
    transitions = []
    bad = n + 1
    for s in symbols:
        transitions.append((0, s, 0))
        transitions.append((bad, s, bad))
        for i in range(n):
            if s[i] == PAD:
                transitions.append((0, s, 1 + i))
                transitions.append((1 + i, s, 1 + i))
            else:
                transitions.append((1 + i, s, bad))
    return Automaton.from_transitions(alphabet, n + 2, 0, (bad,), transitions)


def padding_witness(r: RegularRelation):
    """A word accepted by r that is not a valid convolution, or None."""
    a = fa.trim(r.automaton)
    if not a.finals:
        return None
    dist_path = _shortest_completions(a)
    start = (a.initial, frozenset())
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        q, padded = node
        for sym, ts in a.delta[q].items():
            bad = any(sym[i] != PAD for i in padded)
            now = padded | {i for i, c in enumerate(sym) if c == PAD}
            for t in ts:
                if bad:
                    prefix = []
                    cur = node
                    while parent[cur] is not None:
                        cur, s = parent[cur]
                        prefix.append(s)
                    prefix.reverse()
                    return tuple(prefix) + (sym,) + dist_path[t]
                nxt = (t, frozenset(now))
                if nxt not in parent:
                    parent[nxt] = (node, sym)
                    queue.append(nxt)
    return None


def _shortest_completions(a: Automaton):
    """For every state, a shortest word leading to acceptance."""
    rev = [[] for _ in range(a.n_states)]
    for p, row in enumerate(a.delta):
        for s, ts in row.items():
            for q in ts:
                rev[q].append((p, s))
    best = {f: () for f in a.finals}
    queue = deque(a.finals)
    while queue:
        q = queue.popleft()
        for p, s in rev[q]:
            if p not in best:
                best[p] = (s,) + best[q]
                queue.append(p)
    return best


def image(r: RegularRelation, fixed: dict, max_len: int):
    """Tuples of the unfixed tapes completing ``fixed`` (tape -> word) with convolution length <= max_len.

    Returned sorted by (convolution length, components).
    """
    a = fa.trim(r.automaton)
    fixed_idx = {}
    for tape, word in fixed.items():
        w = r.base.encode(word) if isinstance(word, str) else tuple(word)
        fixed_idx[r.index(tape)] = w
    free = [i for i in range(r.arity) if i not in fixed_idx]
    min_len = max((len(w) for w in fixed_idx.values()), default=0)
    results = []
    if not a.finals:
        return results

    def expected(k):
        return {i: (w[k] if k < len(w) else PAD) for i, w in fixed_idx.items()}

    stack = [(frozenset((a.initial,)), ())]
    while stack:
        states, word = stack.pop()
        k = len(word)
        if k >= min_len and not states.isdisjoint(a.finals):
            comps = deconvolve(word, r.arity)
            results.append(tuple(comps[i] for i in free))
        if k >= max_len:
            continue
        want = expected(k)
        moves: dict = {}
        for q in states:
            for sym, ts in a.delta[q].items():
                if all(sym[i] == c for i, c in want.items()):
                    moves.setdefault(sym, set()).update(ts)
        for sym, ts in moves.items():
            stack.append((frozenset(ts), word + (sym,)))
    results.sort(key=lambda comps: (max((len(c) for c in comps), default=0), comps))
    return results
