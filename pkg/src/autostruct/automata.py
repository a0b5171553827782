"""Finite automata: representation, closure operations, counting and enumeration.

Automata are immutable. Transition tables are sparse: a missing entry means
the run dies, so a deterministic automaton is usually *partial* and only
``complete`` materialises the sink state.  That matters for tuple alphabets,
whose symbol sets grow as ``(|base| + 1) ** arity``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import AlphabetMismatch, ParseError, UnknownSymbol

PAD = 1 << 30  # the padding symbol; larger than any symbol index so it sorts last
PAD_NAME = "_"


class Alphabet:
    """An ordered finite set of named symbols, encoded internally as ints."""

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if not names:
            raise ValueError("alphabet must be non-empty")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate symbol names in {names!r}")
        for name in names:
            if not name or name == PAD_NAME or any(c.isspace() or c in ",()|*" for c in name):
                raise ValueError(f"illegal symbol name {name!r}")
        self.names = names
        self.index = {n: i for i, n in enumerate(names)}
        self.single_char = all(len(n) == 1 for n in names)
        self._by_length = sorted(names, key=len, reverse=True)

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def symbols(self) -> range:
        return range(len(self.names))

    def name(self, symbol: int) -> str:
        return PAD_NAME if symbol == PAD else self.names[symbol]

    def parse_symbol(self, token: str) -> int:
        try:
            return self.index[token]
        except KeyError:
            raise UnknownSymbol(f"symbol {token!r} not in alphabet") from None

    def tokenize(self, text: str) -> list[str]:
        """Split ``text`` into symbol names by greedy longest match."""
        out = []
        i = 0
        while i < len(text):
            if text[i].isspace():
                i += 1
                continue
            for name in self._by_length:
                if text.startswith(name, i):
                    out.append(name)
                    i += len(name)
                    break
            else:
                raise UnknownSymbol(f"cannot read a symbol at {text[i:]!r}")
        return out

    def encode(self, word) -> tuple[int, ...]:
        if isinstance(word, str):
            word = self.tokenize(word)
        return tuple(self.parse_symbol(s) for s in word)

    def decode(self, word: Sequence[int]) -> str:
        sep = "" if self.single_char else " "
        return sep.join(self.names[s] for s in word)

    def __eq__(self, other):
        return type(other) is Alphabet and other.names == self.names

    def __hash__(self):
        return hash(("Alphabet", self.names))

    def __repr__(self):
        return f"Alphabet({list(self.names)!r})"


class Automaton:
    """A finite automaton ``(S, initial, delta, F)`` with states ``0..n-1``.

    ``delta[q]`` maps a symbol to a sorted tuple of successor states.
    """

    __slots__ = ("alphabet", "n_states", "initial", "finals", "delta", "deterministic")

    def __init__(self, alphabet, n_states, initial, finals, delta):
        if not 0 <= initial < n_states:
            raise ValueError(f"initial state {initial} out of range")
        self.alphabet = alphabet
        self.n_states = n_states
        self.initial = initial
        self.finals = frozenset(finals)
        self.delta = tuple(delta)
        if len(self.delta) != n_states:
            raise ValueError("transition table does not match the state count")
        det = True
        for row in self.delta:
            for targets in row.values():
                if len(targets) != 1:
                    det = False
                for t in targets:
                    if not 0 <= t < n_states:
                        raise ValueError(f"transition target {t} out of range")
        for f in self.finals:
            if not 0 <= f < n_states:
                raise ValueError(f"final state {f} out of range")
        self.deterministic = det

    @classmethod
    def from_transitions(cls, alphabet, n_states, initial, finals, transitions):
        rows = [dict() for _ in range(n_states)]
        for p, sym, q in transitions:
            rows[p].setdefault(sym, set()).add(q)
        delta = [{s: tuple(sorted(ts)) for s, ts in row.items()} for row in rows]
        return cls(alphabet, n_states, initial, finals, delta)

    def transitions(self) -> Iterator[tuple[int, object, int]]:
        for p, row in enumerate(self.delta):
            for s in sorted(row):
                for q in row[s]:
                    yield p, s, q

    @property
    def n_transitions(self) -> int:
        return sum(len(ts) for row in self.delta for ts in row.values())

    def step(self, states, symbol):
        out = set()
        for q in states:
            out.update(self.delta[q].get(symbol, ()))
        return out

    def accepts(self, word) -> bool:
        if isinstance(word, str):
            word = self.alphabet.encode(word)
        current = {self.initial}
        for sym in word:
            current = self.step(current, sym)
            if not current:
                return False
        return not current.isdisjoint(self.finals)

    def __repr__(self):
        kind = "DFA" if self.deterministic else "NFA"
        return f"<{kind} states={self.n_states} finals={len(self.finals)} transitions={self.n_transitions}>"


@dataclass(frozen=True)
class CountTable:
    """Exact word counts per length; ``counts[n]`` is the number of accepted words of length n."""

    counts: tuple[int, ...]

    @property
    def cumulative(self) -> tuple[int, ...]:
        out, total = [], 0
        for c in self.counts:
            total += c
            out.append(total)
        return tuple(out)

    def upto(self, n: int) -> int:
        return sum(self.counts[: n + 1])


# -- construction helpers -------------------------------------------------


def empty(alphabet) -> Automaton:
    return Automaton(alphabet, 1, 0, (), [{}])


def epsilon(alphabet) -> Automaton:
    return Automaton(alphabet, 1, 0, (0,), [{}])


def from_symbols(alphabet, symbols) -> Automaton:
    """The language of one-letter words drawn from ``symbols``."""
    row = {s: (1,) for s in symbols}
    return Automaton(alphabet, 2, 0, (1,), [row, {}])


def from_word(alphabet, word) -> Automaton:
    if isinstance(word, str):
        word = alphabet.encode(word)
    delta = [{s: (i + 1,)} for i, s in enumerate(word)] + [{}]
    return Automaton(alphabet, len(word) + 1, 0, (len(word),), delta)


def universal(alphabet) -> Automaton:
    return Automaton(alphabet, 1, 0, (0,), [{s: (0,) for s in alphabet.symbols}])


def _check_same(a: Automaton, b: Automaton):
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch(f"{a.alphabet!r} != {b.alphabet!r}")


def _merge_row(dst: dict, src: dict, offset: int):
    for s, ts in src.items():
        shifted = tuple(t + offset for t in ts)
        if s in dst:
            dst[s] = tuple(sorted(set(dst[s]) | set(shifted)))
        else:
            dst[s] = shifted


def concat(a: Automaton, b: Automaton) -> Automaton:
    _check_same(a, b)
    off = a.n_states
    delta = [dict(row) for row in a.delta] + [
        {s: tuple(t + off for t in ts) for s, ts in row.items()} for row in b.delta
    ]
    for f in a.finals:
        _merge_row(delta[f], b.delta[b.initial], off)
    finals = {f + off for f in b.finals}
    if b.initial in b.finals:
        finals |= a.finals
    return Automaton(a.alphabet, a.n_states + b.n_states, a.initial, finals, delta)


def star(a: Automaton) -> Automaton:
    delta = [dict()] + [{s: tuple(t + 1 for t in ts) for s, ts in row.items()} for row in a.delta]
    _merge_row(delta[0], a.delta[a.initial], 1)
    for f in a.finals:
        _merge_row(delta[f + 1], a.delta[a.initial], 1)
    finals = {0} | {f + 1 for f in a.finals}
    return Automaton(a.alphabet, a.n_states + 1, 0, finals, delta)


def map_symbols(a: Automaton, fn, alphabet) -> Automaton:
    """Rewrite every transition label through ``fn``; labels mapped to None are dropped."""
    delta = []
    for row in a.delta:
        new = {}
        for s, ts in row.items():
            t = fn(s)
            if t is None:
                continue
            if t in new:
                new[t] = tuple(sorted(set(new[t]) | set(ts)))
            else:
                new[t] = ts
        delta.append(new)
    return Automaton(alphabet, a.n_states, a.initial, a.finals, delta)


# -- determinisation and minimisation --------------------------------------


def _subset_construction(a: Automaton) -> Automaton:
    start = frozenset((a.initial,))
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        current = order[i]
        i += 1
        moves: dict = {}
        for q in current:
            for s, ts in a.delta[q].items():
                if s in moves:
                    moves[s].update(ts)
                else:
                    moves[s] = set(ts)
        row = {}
        for s, ts in moves.items():
            key = frozenset(ts)
            j = index.get(key)
            if j is None:
                j = index[key] = len(order)
                order.append(key)
            row[s] = (j,)
        delta.append(row)
    finals = [j for j, subset in enumerate(order) if not subset.isdisjoint(a.finals)]
    return Automaton(a.alphabet, len(order), 0, finals, delta)


def complete(a: Automaton) -> Automaton:
    """Make a deterministic automaton total by routing missing moves to a sink."""
    if not a.deterministic:
        raise ValueError("complete() needs a deterministic automaton")
    symbols = list(a.alphabet.symbols)
    sink = a.n_states
    delta = [dict(row) for row in a.delta]
    needs_sink = False
    for row in delta:
        for s in symbols:
            if s not in row:
                row[s] = (sink,)
                needs_sink = True
    if not needs_sink:
        return a
    delta.append({s: (sink,) for s in symbols})
    return Automaton(a.alphabet, a.n_states + 1, a.initial, a.finals, delta)


def determinize(a: Automaton, complete_it: bool = True) -> Automaton:
    """Subset construction; the result is complete unless ``complete_it`` is false."""
    d = a if a.deterministic else _subset_construction(a)
    return complete(d) if complete_it else d


def _reverse_adjacency(a: Automaton):
    rev = [[] for _ in range(a.n_states)]
    for p, row in enumerate(a.delta):
        for ts in row.values():
            for q in ts:
                rev[q].append(p)
    return rev


def reachable(a: Automaton) -> set[int]:
    seen = {a.initial}
    stack = [a.initial]
    while stack:
        p = stack.pop()
        for ts in a.delta[p].values():
            for q in ts:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
    return seen


def coreachable(a: Automaton) -> set[int]:
    rev = _reverse_adjacency(a)
    seen = set(a.finals)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for p in rev[q]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def trim(a: Automaton) -> Automaton:
    """Drop states that are unreachable or cannot reach a final state."""
    keep = reachable(a) & coreachable(a)
    if a.initial not in keep:
        return empty(a.alphabet)
    if len(keep) == a.n_states:
        return a
    order = sorted(keep)
    new = {q: i for i, q in enumerate(order)}
    delta = []
    for q in order:
        row = {}
        for s, ts in a.delta[q].items():
            kept = tuple(new[t] for t in ts if t in new)
            if kept:
                row[s] = kept
        delta.append(row)
    finals = [new[f] for f in a.finals if f in new]
    return Automaton(a.alphabet, len(order), new[a.initial], finals, delta)


def _hopcroft(a: Automaton) -> Automaton:
    """Quotient of a trimmed partial DFA by language equivalence."""
    n = a.n_states
    rinv = [dict() for _ in range(n)]
    for p, row in enumerate(a.delta):
        for s, (q,) in row.items():
            rinv[q].setdefault(s, []).append(p)
    block_of = [0] * n
    blocks: list[set[int]] = []
    for group in ([q for q in range(n) if q in a.finals], [q for q in range(n) if q not in a.finals]):
        if group:
            for q in group:
                block_of[q] = len(blocks)
            blocks.append(set(group))
    work = list(range(len(blocks)))
    in_work = set(work)
    while work:
        b = work.pop()
        in_work.discard(b)
        by_symbol: dict = {}
        for q in list(blocks[b]):
            for s, sources in rinv[q].items():
                by_symbol.setdefault(s, []).extend(sources)
        for sources in by_symbol.values():
            touched: dict[int, list[int]] = {}
            for p in sources:
                touched.setdefault(block_of[p], []).append(p)
            for c, members in touched.items():
                if len(members) == len(blocks[c]):
                    continue
                split = set(members)
                blocks[c] -= split
                new_id = len(blocks)
                blocks.append(split)
                for p in split:
                    block_of[p] = new_id
                if c in in_work:
                    work.append(new_id)
                    in_work.add(new_id)
                else:
                    smaller = new_id if len(split) <= len(blocks[c]) else c
                    work.append(smaller)
                    in_work.add(smaller)
    delta = [dict() for _ in blocks]
    for p, row in enumerate(a.delta):
        bp = block_of[p]
        if delta[bp]:
            continue
        delta[bp] = {s: (block_of[q],) for s, (q,) in row.items()}
    finals = {block_of[f] for f in a.finals}
    return Automaton(a.alphabet, len(blocks), block_of[a.initial], finals, delta)


def canonical(a: Automaton) -> Automaton:
    """Renumber a DFA's reachable states in BFS order, visiting symbols in order."""
    order = {a.initial: 0}
    queue = deque([a.initial])
    seq = []
    while queue:
        p = queue.popleft()
        seq.append(p)
        for s in sorted(a.delta[p]):
            (q,) = a.delta[p][s]
            if q not in order:
                order[q] = len(order)
                queue.append(q)
    delta = [{s: (order[q],) for s, (q,) in sorted(a.delta[p].items())} for p in seq]
    finals = [order[f] for f in a.finals if f in order]
    return Automaton(a.alphabet, len(seq), 0, finals, delta)


def minimal(a: Automaton) -> Automaton:
    """Minimal trimmed (partial) DFA in canonical numbering."""
    return canonical(_hopcroft(trim(determinize(a, complete_it=False))))


def minimize(a: Automaton, complete_it: bool = True) -> Automaton:
    """Minimal complete DFA with canonical BFS numbering."""
    m = minimal(a)
    return canonical(complete(m)) if complete_it else m


def equivalent(a: Automaton, b: Automaton) -> bool:
    _check_same(a, b)
    ma, mb = minimal(a), minimal(b)
    return (ma.n_states, ma.finals, ma.delta) == (mb.n_states, mb.finals, mb.delta)


# -- Boolean operations ----------------------------------------------------


def intersect(a: Automaton, b: Automaton) -> Automaton:
    _check_same(a, b)
    start = (a.initial, b.initial)
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        p, q = order[i]
        i += 1
        ra, rb = a.delta[p], b.delta[q]
        if len(rb) < len(ra):
            common = [s for s in rb if s in ra]
        else:
            common = [s for s in ra if s in rb]
        row = {}
        for s in common:
            targets = []
            for tp in ra[s]:
                for tq in rb[s]:
                    key = (tp, tq)
                    j = index.get(key)
                    if j is None:
                        j = index[key] = len(order)
                        order.append(key)
                    targets.append(j)
            row[s] = tuple(sorted(targets))
        delta.append(row)
    finals = [j for j, (p, q) in enumerate(order) if p in a.finals and q in b.finals]
    return Automaton(a.alphabet, len(order), 0, finals, delta)


def union(a: Automaton, b: Automaton) -> Automaton:
    _check_same(a, b)
    oa, ob = 1, 1 + a.n_states
    delta = [dict()]
    delta += [{s: tuple(t + oa for t in ts) for s, ts in row.items()} for row in a.delta]
    delta += [{s: tuple(t + ob for t in ts) for s, ts in row.items()} for row in b.delta]
    _merge_row(delta[0], a.delta[a.initial], oa)
    _merge_row(delta[0], b.delta[b.initial], ob)
    finals = {f + oa for f in a.finals} | {f + ob for f in b.finals}
    if a.initial in a.finals or b.initial in b.finals:
        finals.add(0)
    return Automaton(a.alphabet, 1 + a.n_states + b.n_states, 0, finals, delta)


def complement(a: Automaton) -> Automaton:
    """Complement relative to the full alphabet star."""
    d = determinize(a, complete_it=True)
    return Automaton(d.alphabet, d.n_states, d.initial, set(range(d.n_states)) - d.finals, d.delta)


def difference(a: Automaton, b: Automaton) -> Automaton:
    """Words of ``a`` not accepted by ``b``; only ``b`` is determinised."""
    _check_same(a, b)
    db = determinize(b, complete_it=False)
    sink = -1
    start = (a.initial, db.initial)
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        p, q = order[i]
        i += 1
        rb = db.delta[q] if q != sink else {}
        row = {}
        for s, ts in a.delta[p].items():
            nq = rb[s][0] if s in rb else sink
            targets = []
            for tp in ts:
                key = (tp, nq)
                j = index.get(key)
                if j is None:
                    j = index[key] = len(order)
                    order.append(key)
                targets.append(j)
            row[s] = tuple(sorted(targets))
        delta.append(row)
    finals = [j for j, (p, q) in enumerate(order) if p in a.finals and (q == sink or q not in db.finals)]
    return Automaton(a.alphabet, len(order), 0, finals, delta)


# -- emptiness, finiteness, counting --------------------------------------


def is_empty(a: Automaton) -> bool:
    return reachable(a).isdisjoint(a.finals)


def is_finite(a: Automaton) -> bool:
    t = trim(a)
    color = [0] * t.n_states  # 0 new, 1 on stack, 2 done
    for root in range(t.n_states):
        if color[root]:
            continue
        stack = [(root, iter(sorted({q for ts in t.delta[root].values() for q in ts})))]
        color[root] = 1
        while stack:
            p, it = stack[-1]
            for q in it:
                if color[q] == 1:
                    return False
                if color[q] == 0:
                    color[q] = 1
                    stack.append((q, iter(sorted({r for ts in t.delta[q].values() for r in ts}))))
                    break
            else:
                color[p] = 2
                stack.pop()
    return True


def count_words_upto(a: Automaton, n: int) -> CountTable:
    if n < 0:
        raise ValueError("n must be non-negative")
    d = trim(determinize(a, complete_it=False))
    vec = {d.initial: 1}
    counts = []
    for length in range(n + 1):
        counts.append(sum(c for q, c in vec.items() if q in d.finals))
        if length == n:
            break
        nxt: dict[int, int] = {}
        for q, c in vec.items():
            for (t,) in d.delta[q].values():
                nxt[t] = nxt.get(t, 0) + c
        vec = nxt
    return CountTable(tuple(counts))


def prefix_count(a: Automaton, n: int) -> int:
    """Number of length-``n`` words that extend to an accepted word."""
    if n < 0:
        raise ValueError("n must be non-negative")
    d = trim(determinize(a, complete_it=False))
    if not d.finals:
        return 0
    vec = {d.initial: 1}
    for _ in range(n):
        nxt: dict[int, int] = {}
        for q, c in vec.items():
            for (t,) in d.delta[q].values():
                nxt[t] = nxt.get(t, 0) + c
        vec = nxt
    return sum(vec.values())


def _distance_to_final(a: Automaton) -> list[float]:
    rev = _reverse_adjacency(a)
    dist = [float("inf")] * a.n_states
    queue = deque()
    for f in a.finals:
        dist[f] = 0
        queue.append(f)
    while queue:
        q = queue.popleft()
        for p in rev[q]:
            if dist[p] == float("inf"):
                dist[p] = dist[q] + 1
                queue.append(p)
    return dist


def enumerate_llex(a: Automaton, max_len: int) -> Iterator[tuple]:
    """Accepted words of length <= max_len in length-lexicographic order."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    d = trim(determinize(a, complete_it=False))
    if not d.finals:
        return
    dist = _distance_to_final(d)
    frontier = [((), d.initial)]
    for length in range(max_len + 1):
        for word, q in frontier:
            if q in d.finals:
                yield word
        if length == max_len:
            break
        remaining = max_len - length - 1
        nxt = []
        for word, q in frontier:
            row = d.delta[q]
            for s in sorted(row):
                (t,) = row[s]
                if dist[t] <= remaining:
                    nxt.append((word + (s,), t))
        frontier = nxt
        if not frontier:
            break


def to_dot(a: Automaton, name: str = "automaton") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  __start [shape=point];"]
    for q in range(a.n_states):
        shape = "doublecircle" if q in a.finals else "circle"
        lines.append(f'  {q} [shape={shape}, label="{q}"];')
    lines.append(f"  __start -> {a.initial};")
    for p, s, q in a.transitions():
        lines.append(f'  {p} -> {q} [label="{a.alphabet.name(s)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- regular expressions ----------------------------------------------------


class _RegexParser:
    def __init__(self, text: str, alphabet: Alphabet, line: int = 1):
        self.text = text
        self.alphabet = alphabet
        self.line = line
        self.pos = 0

    def error(self, message):
        raise ParseError(message, self.line, self.pos + 1)

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else None

    def parse(self) -> Automaton:
        result = self.alternation()
        if self.peek() is not None:
            self.error(f"unexpected {self.text[self.pos]!r}")
        return result

    def alternation(self):
        result = self.concatenation()
        while self.peek() == "|":
            self.pos += 1
            result = union(result, self.concatenation())
        return result

    def concatenation(self):
        result = epsilon(self.alphabet)
        while self.peek() not in (None, "|", ")"):
            result = concat(result, self.repetition())
        return result

    def repetition(self):
        base = self.atom()
        while self.peek() in ("*", "+", "?"):
            op = self.text[self.pos]
            self.pos += 1
            if op == "*":
                base = star(base)
            elif op == "+":
                base = concat(base, star(base))
            else:
                base = union(base, epsilon(self.alphabet))
        return base

    def atom(self):
        c = self.peek()
        if c == "(":
            self.pos += 1
            inner = self.alternation()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return inner
        if c in ("*", "+", "?"):
            self.error(f"nothing to repeat before {c!r}")
        for name in self.alphabet._by_length:
            if self.text.startswith(name, self.pos):
                self.pos += len(name)
                return from_symbols(self.alphabet, [self.alphabet.index[name]])
        raise UnknownSymbol(f"{self.line}:{self.pos + 1}: symbol at {self.text[self.pos:]!r} not in alphabet")


def regex(text: str, alphabet: Alphabet, line: int = 1) -> Automaton:
    """Compile a regular expression (``|``, ``*``, ``+``, ``?``, parentheses) to a minimal DFA."""
    return minimal(_RegexParser(text, alphabet, line).parse())
