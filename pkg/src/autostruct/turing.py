"""Turing machines, their configuration graphs and the reduction graph A_R.

A configuration is the word ``u q v``: the tape contents left of the head,
the current state, then the tape from the head rightwards.  ``u`` carries no
leading blank and ``v`` no trailing blank, so every configuration of the
two-way infinite tape has exactly one word.  A configuration is a tuple of
symbol names; state and tape symbol names are disjoint.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from . import automata as fa
from .automata import Alphabet
from .builtins import construct, stepper_relation
from .errors import InvalidTm, NotReversible, RejectingHaltState
from .logic import define, eval_sentence
from .presentation import Presentation
from .relations import image, RegularRelation, TupleAlphabet

RESERVED = ("T", "G", "C", "J", "I", "$", "#")


@dataclass(frozen=True)
class Rule:
    state: str
    read: str
    target: str
    write: str
    move: str  # "L" or "R"


@dataclass
class TmSpec:
    states: tuple
    initial: str
    accept: str
    blank: str
    tape: tuple  # tape symbols including the blank
    rules: dict = field(default_factory=dict)  # (state, read) -> Rule

    def __post_init__(self):
        self.states = tuple(self.states)
        self.tape = tuple(self.tape)
        _validate(self)

    @property
    def symbols(self) -> tuple:
        return self.tape + self.states

    def rule(self, state, read):
        return self.rules.get((state, read))


def _validate(tm: TmSpec):
    if tm.blank == "_":
        raise InvalidTm("the blank may not be '_', which is reserved for padding")
    if len(set(tm.states)) != len(tm.states) or len(set(tm.tape)) != len(tm.tape):
        raise InvalidTm("duplicate state or tape symbol")
    clash = set(tm.states) & set(tm.tape)
    if clash:
        raise InvalidTm(f"names used both as state and tape symbol: {sorted(clash)}")
    try:
        Alphabet(tm.symbols)
    except ValueError as exc:
        raise InvalidTm(str(exc)) from None
    if tm.blank not in tm.tape:
        raise InvalidTm("the blank must be a tape symbol")
    for q in (tm.initial, tm.accept):
        if q not in tm.states:
            raise InvalidTm(f"unknown state {q!r}")
    for (q, a), r in tm.rules.items():
        if r.target not in tm.states or q not in tm.states:
            raise InvalidTm(f"rule {q} {a}: unknown state")
        if a not in tm.tape or r.write not in tm.tape:
            raise InvalidTm(f"rule {q} {a}: unknown tape symbol")
        if r.move not in ("L", "R"):
            raise InvalidTm(f"rule {q} {a}: move must be L or R")
        if q == tm.accept:
            raise InvalidTm("the accepting state has no rules")


def parse_tm(text: str) -> TmSpec:
    """Read the line format ``states:/initial:/accept:/blank:[/alphabet:]``, rules, ``end``."""
    header, rules = {}, {}
    ended = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ended:
            raise InvalidTm(f"line {lineno}: text after 'end'")
        if line == "end":
            ended = True
            continue
        if ":" in line and "->" not in line:
            key, _, value = line.partition(":")
            key = key.strip()
            if key not in ("states", "initial", "accept", "blank", "alphabet"):
                raise InvalidTm(f"line {lineno}: unknown field {key!r}")
            header[key] = value.split()
            continue
        left, arrow, right = line.partition("->")
        lhs, rhs = left.split(), right.split()
        if not arrow or len(lhs) != 2 or len(rhs) != 3:
            raise InvalidTm(f"line {lineno}: expected 'q a -> q2 b L|R'")
        if tuple(lhs) in rules:
            raise InvalidTm(f"line {lineno}: second rule for {lhs[0]} {lhs[1]}")
        rules[tuple(lhs)] = Rule(lhs[0], lhs[1], rhs[0], rhs[1], rhs[2])
    if not ended:
        raise InvalidTm("missing 'end'")
    for key in ("states", "initial", "accept", "blank"):
        if key not in header:
            raise InvalidTm(f"missing field {key!r}")
        if key != "states" and len(header[key]) != 1:
            raise InvalidTm(f"field {key!r} takes one name")
    blank = header["blank"][0]
    tape = list(header.get("alphabet", []))
    for r in rules.values():
        for a in (r.read, r.write):
            if a not in tape and a != blank:
                tape.append(a)
    tape = [a for a in tape if a != blank] + [blank]
    return TmSpec(header["states"], header["initial"][0], header["accept"][0], blank, tape, rules)


def format_tm(tm: TmSpec) -> str:
    lines = [
        f"states: {' '.join(tm.states)}",
        f"initial: {tm.initial}",
        f"accept: {tm.accept}",
        f"blank: {tm.blank}",
        f"alphabet: {' '.join(a for a in tm.tape if a != tm.blank)}",
    ]
    lines += [f"{r.state} {r.read} -> {r.target} {r.write} {r.move}" for r in tm.rules.values()]
    return "\n".join(lines + ["end"]) + "\n"


# -- simulation -------------------------------------------------------------

def split_config(tm: TmSpec, word) -> tuple:
    word = tuple(word)
    heads = [i for i, s in enumerate(word) if s in tm.states]
    if len(heads) != 1:
        raise InvalidTm(f"not a configuration: {' '.join(word)}")
    i = heads[0]
    return word[:i], word[i], word[i + 1:]


def is_config(tm: TmSpec, word) -> bool:
    try:
        u, _, v = split_config(tm, word)
    except InvalidTm:
        return False
    return (all(s in tm.tape for s in u + v) and not (u and u[0] == tm.blank)
            and not (v and v[-1] == tm.blank))


def initial_config(tm: TmSpec, w) -> tuple:
    return (tm.initial,) + tuple(w)


def _trim(u, v, blank):
    while u and u[0] == blank:
        u = u[1:]
    while v and v[-1] == blank:
        v = v[:-1]
    return u, v


def step(tm: TmSpec, word):
    """The successor configuration, or None when no rule applies."""
    u, q, v = split_config(tm, word)
    a = v[0] if v else tm.blank
    rule = tm.rule(q, a)
    if rule is None:
        return None
    rest = v[1:]
    if rule.move == "R":
        u2, v2 = _trim(u + (rule.write,), rest, tm.blank)
    else:
        c = u[-1] if u else tm.blank
        u2, v2 = _trim(u[:-1], (c, rule.write) + rest, tm.blank)
    return u2 + (rule.target,) + v2


def run(tm: TmSpec, w, max_steps: int):
    """Simulate on input ``w``; returns (halted, steps, final configuration)."""
    c = initial_config(tm, w)
    for n in range(max_steps + 1):
        nxt = step(tm, c)
        if nxt is None:
            return True, n, c
        if n == max_steps:
            break
        c = nxt
    return False, max_steps, c


def configurations(tm: TmSpec, max_len: int):
    """All configuration words of length at most ``max_len``."""
    dom = _config_language(Alphabet(tm.symbols), tm)
    for word in fa.enumerate_llex(dom, max_len):
        yield tuple(tm.symbols[s] for s in word)


# -- synchronous templates --------------------------------------------------
#
# A template is a list of segments read left to right over pairs (x, y) of
# names, None standing for padding:
#   ("copy", S)    (c, c) for c in S, any number of times
#   ("pair", x, y) exactly that pair
#   ("shl", a)     x = a r1..rn, y = r1..rn  (y runs one ahead)
#   ("shr", b)     x = r1..rn, y = b r1..rn  (y runs one behind)
#   ("rel", R)     the rest is a pair accepted by the two-tape relation R
#   ("ylang", A)   x is padding, y is a word of the one-tape automaton A
# The union of templates is explored by ``stepper_relation`` through sets of
# template positions.

class _Templates:
    def __init__(self, templates):
        self.templates = [tuple(t) for t in templates]

    def _closure(self, states):
        out, todo = set(states), list(states)
        while todo:
            t, i, m = todo.pop()
            segs = self.templates[t]
            if i < len(segs) and segs[i][0] == "copy" and m is None:
                nxt = (t, i + 1, None)
                if nxt not in out:
                    out.add(nxt)
                    todo.append(nxt)
        return out

    def start(self):
        return frozenset(self._closure({(t, 0, None) for t in range(len(self.templates))}))

    def _inner(self, seg, m):
        kind = seg[0]
        if kind == "rel":
            return seg[1].automaton.initial if m is None else m
        return seg[1].initial if m is None else m

    def _advance(self, t, i, m, x, y):
        segs = self.templates[t]
        if i >= len(segs):
            return ()
        seg = segs[i]
        kind = seg[0]
        if kind == "copy":
            return ((t, i, None),) if x == y and x in seg[1] else ()
        if kind == "pair":
            return ((t, i + 1, None),) if (x, y) == (seg[1], seg[2]) else ()
        if kind == "shl":
            want = seg[1] if m is None else m
            if x != want:
                return ()
            return ((t, i + 1, None),) if y is None else ((t, i, y),)
        if kind == "shr":
            want = seg[1] if m is None else m
            if y != want:
                return ()
            return ((t, i + 1, None),) if x is None else ((t, i, x),)
        if kind == "rel":
            rel = seg[1]
            a, base = rel.automaton, rel.base
            try:
                sym = tuple(fa.PAD if c is None else base.index[c] for c in (x, y))
            except KeyError:
                return ()
            targets = a.delta[self._inner(seg, m)].get(sym, ())
            return tuple((t, i, q) for q in targets)
        if kind == "ylang":
            a = seg[1]
            if x is not None or y not in a.alphabet.index:
                return ()
            targets = a.delta[self._inner(seg, m)].get(a.alphabet.index[y], ())
            return tuple((t, i, q) for q in targets)
        raise ValueError(kind)

    def step(self, states, names):
        x, y = names
        nxt = set()
        for t, i, m in states:
            nxt.update(self._advance(t, i, m, x, y))
        return frozenset(self._closure(nxt)) if nxt else None

    def _final(self, t, i, m):
        segs = self.templates[t]
        if i == len(segs):
            return True
        if i == len(segs) - 1:
            seg = segs[i]
            if seg[0] == "rel":
                return self._inner(seg, m) in seg[1].automaton.finals
            if seg[0] == "ylang":
                return self._inner(seg, m) in seg[1].finals
        return False

    def accept(self, states):
        return any(self._final(*s) for s in states)

    def relation(self, domain):
        return stepper_relation(domain, 2, self.start(), self.step, self.accept).minimal()


def _config_templates(tm: TmSpec):
    gamma = frozenset(tm.tape)
    B = tm.blank
    copy = ("copy", gamma)
    out = []
    for (q, a), r in tm.rules.items():
        p, b = r.target, r.write
        if r.move == "R":
            out.append([copy, ("pair", q, b), ("pair", a, p), copy])
            if b == B:
                out.append([("pair", q, p), ("shl", a)])
            if a == B:
                out.append([copy, ("pair", q, b), ("pair", None, p)])
                if b == B:
                    out.append([("pair", q, p)])
            continue
        for c in tm.tape:
            out.append([copy, ("pair", c, p), ("pair", q, c), ("pair", a, b), copy])
            if b == B:
                out.append([copy, ("pair", c, p), ("pair", q, None if c == B else c), ("pair", a, None)])
            if a == B:
                if b != B:
                    out.append([copy, ("pair", c, p), ("pair", q, c), ("pair", None, b)])
                else:
                    out.append([copy, ("pair", c, p), ("pair", q, None if c == B else c)])
        out.append([("pair", q, p), ("pair", a, B), ("shr", b)])
        if b == B:
            out.append([("pair", q, p), ("pair", a, None)])
        if a == B:
            if b != B:
                out.append([("pair", q, p), ("pair", None, B), ("pair", None, b)])
            else:
                out.append([("pair", q, p)])
    return out


def _lang(alphabet, names):
    return fa.from_symbols(alphabet, [alphabet.index[n] for n in names])


def _word(alphabet, names):
    return fa.from_word(alphabet, [alphabet.index[n] for n in names])


def _config_language(alphabet: Alphabet, tm: TmSpec):
    gamma = _lang(alphabet, tm.tape)
    nonblank = _lang(alphabet, [a for a in tm.tape if a != tm.blank])
    eps = fa.epsilon(alphabet)
    left = fa.union(eps, fa.concat(nonblank, fa.star(gamma)))
    right = fa.union(eps, fa.concat(fa.star(gamma), nonblank))
    return fa.minimal(fa.concat(fa.concat(left, _lang(alphabet, tm.states)), right))


def config_graph(tm: TmSpec) -> Presentation:
    """The configuration graph with relations E, halting and unstarted."""
    alphabet = Alphabet(tm.symbols)
    domain = _config_language(alphabet, tm)
    E = _Templates(_config_templates(tm)).relation(domain)
    p = Presentation(alphabet, domain, {"E": E})
    p = define(p, "halting", "!(E y. E(x,y))", ("x",))
    p = define(p, "unstarted", "!(E y. E(y,x))", ("x",))
    return p


REVERSIBLE_SENTENCES = (
    "A x. A y. A z. (E(x,y) & E(x,z) -> y = z)",
    "A x. A y. A z. (E(x,z) & E(y,z) -> x = y)",
)


def check_reversible(p: Presentation) -> bool:
    """True when every vertex has in-degree and out-degree at most one."""
    return all(eval_sentence(s, p) for s in REVERSIBLE_SENTENCES)


# -- the reduction graph ----------------------------------------------------

@dataclass
class ReductionGraph:
    presentation: Presentation
    tm: TmSpec


def _lift(rel, alphabet):
    """Minimal DFA copy of a two-tape relation over a larger base alphabet."""
    names = rel.base.names
    a = fa.minimal(rel.automaton)
    alpha = TupleAlphabet(alphabet, 2)
    remap = lambda s: tuple(c if c == fa.PAD else alphabet.index[names[c]] for c in s)  # noqa: E731
    return RegularRelation(rel.tapes, fa.map_symbols(a, remap, alpha))


def _lift_language(a, alphabet):
    names = a.alphabet.names
    return fa.map_symbols(fa.minimal(a), lambda s: alphabet.index[names[s]], alphabet)


def _check_reducible(tm: TmSpec):
    used = set(RESERVED) & set(tm.symbols)
    if used:
        raise InvalidTm(f"names reserved by the reduction: {sorted(used)}")
    if not {"0", "1"} <= set(tm.tape):
        raise InvalidTm("the tape alphabet must contain the input symbols 0 and 1")
    for q in tm.states:
        if q == tm.accept:
            continue
        for a in tm.tape:
            if tm.rule(q, a) is None:
                raise RejectingHaltState(f"no rule for {q} {a}: the machine would halt without accepting")


def build_ar(tm: TmSpec, check: bool = True) -> ReductionGraph:
    """Automatic presentation of the reduction graph for a reversible machine.

    Vertices, by tag:
      T q0 w      tree node w of the binary tree; for w non-empty it is also
                  the initial configuration on input w
      C c         every other configuration c
      G q0 w $ j  gadget vertex j of the finite chains attached to w
      J j         a spare copy of the chain family
      I 1^a # 1^b vertex b of the a-th infinite chain
    """
    _check_reducible(tm)
    if check and not check_reversible(config_graph(tm)):
        raise NotReversible("the configuration graph has a vertex of degree above one")
    tree = construct("tree_a1")
    chains = construct("chains_j")
    names = list(tm.symbols)
    for extra in RESERVED:
        if extra not in names:
            names.append(extra)
    alphabet = Alphabet(names)
    q0 = tm.initial
    bits = frozenset(("0", "1"))

    def tagged(tag, *parts):
        a = _word(alphabet, [tag])
        for part in parts:
            a = fa.concat(a, part)
        return a

    S = _lift_language(tree.domain, alphabet)
    Jdom = _lift_language(chains.domain, alphabet)
    starts = fa.concat(_word(alphabet, [q0]), fa.difference(S, fa.epsilon(alphabet)))
    configs = fa.difference(_config_language(alphabet, tm), starts)
    ones = fa.star(_word(alphabet, ["1"]))
    domain = fa.minimal(fa.union(fa.union(fa.union(fa.union(
        tagged("T", _word(alphabet, [q0]), S),
        tagged("G", _word(alphabet, [q0]), S, _word(alphabet, ["$"]), Jdom)),
        tagged("C", configs)),
        tagged("J", Jdom)),
        tagged("I", ones, _word(alphabet, ["#"]), ones)))

    tree_E = _lift(tree.relation("E"), alphabet)
    chain_E = _lift(chains.relation("E"), alphabet)
    bases = _lift_language(fa.regex("10*#1*", chains.alphabet), alphabet)
    templates = []
    for t in _config_templates(tm):
        for tx in ("T", "C"):
            for ty in ("T", "C"):
                templates.append([("pair", tx, ty)] + t)
    templates += [
        [("pair", "T", "T"), ("pair", q0, q0), ("rel", tree_E)],
        [("pair", "G", "G"), ("pair", q0, q0), ("copy", bits), ("pair", "$", "$"), ("rel", chain_E)],
        [("pair", "T", "G"), ("pair", q0, q0), ("copy", bits), ("pair", None, "$"), ("ylang", bases)],
        [("pair", "J", "J"), ("rel", chain_E)],
        [("pair", "I", "I"), ("copy", frozenset("1")), ("pair", "#", "#"), ("copy", frozenset("1")),
         ("pair", None, "1")],
    ]
    E = _Templates(templates).relation(domain)
    return ReductionGraph(Presentation(alphabet, domain, {"E": E}), tm)


# -- probing ----------------------------------------------------------------

@dataclass
class ProbeEntry:
    base: str
    chain_lengths: dict  # length -> number of isolated chains of that length
    proxy_infinite: bool
    simulator_halts: bool | None = None  # within depth - 1 steps, if a machine is known

    @property
    def consistent(self) -> bool | None:
        if self.simulator_halts is None:
            return None
        return self.proxy_infinite == (not self.simulator_halts)

    def to_dict(self):
        return {"base": self.base, "chain_lengths": {str(k): v for k, v in sorted(self.chain_lengths.items())},
                "proxy_infinite": self.proxy_infinite, "simulator_halts": self.simulator_halts,
                "consistent": self.consistent}


@dataclass
class ProbeReport:
    depth: int
    entries: list

    @property
    def ok(self) -> bool:
        return all(e.consistent is not False and all(e.chain_lengths.get(n, 0) >= 1 for n in range(1, self.depth))
                   for e in self.entries)

    def lines(self):
        out = []
        for e in self.entries:
            lengths = " ".join(f"{k}x{v}" for k, v in sorted(e.chain_lengths.items()))
            sim = "" if e.simulator_halts is None else f" halts={e.simulator_halts}"
            out.append(f"{e.base}: chains [{lengths}] infinite={e.proxy_infinite}{sim}")
        out.append(f"probe depth={self.depth}: {'ok' if self.ok else 'FAILED'}")
        return out

    def to_dict(self):
        return {"depth": self.depth, "ok": self.ok, "entries": [e.to_dict() for e in self.entries]}


def _successors(E, word, bound):
    return [y[0] for y in image(E, {E.tapes[0]: word}, bound)]


def probe_invariants(g, depth: int = 6, max_base_len: int = 4, tm: TmSpec | None = None) -> ProbeReport:
    """Count isolated chains hanging off the tree nodes ``T q0 w``, w non-empty.

    Chains are followed for at most ``depth`` vertices; reaching ``depth``
    stands in for an infinite chain.  Gadget bases are only scanned up to
    chains of length ``depth - 1`` so that the proxy sees computations only.
    With a machine at hand each entry is compared against simulation.
    """
    if isinstance(g, ReductionGraph):
        p, tm = g.presentation, tm or g.tm
    else:
        p = g
    E = p.relation("E")
    alphabet = p.alphabet
    root = next(iter(fa.enumerate_llex(fa.intersect(p.domain, fa.concat(
        _word(alphabet, ["T"]), fa.universal(alphabet))), 2)))
    q0 = alphabet.names[root[1]]
    entries = []
    for n in range(1, max_base_len + 1):
        for k in range(2 ** (n - 1)):
            w = format(k, f"0{n - 1}b") + "1" if n > 1 else "1"
            base = alphabet.encode(["T", q0] + list(w))
            lengths = Counter()
            infinite = False
            for s in _successors(E, base, len(base) + depth + 1):
                length, cur = 0, s
                while True:
                    length += 1
                    if length >= depth:
                        infinite = True
                        break
                    nxt = _successors(E, cur, len(cur) + 3)
                    if len(nxt) > 1:
                        length = None
                        break
                    if not nxt:
                        break
                    cur = nxt[0]
                if length is not None and length < depth:
                    lengths[length] += 1
            halts = None
            if tm is not None:
                halts = run(tm, w, depth - 1)[0]
            entries.append(ProbeEntry(w, dict(lengths), infinite, halts))
    return ProbeReport(depth, entries)


# -- export and fixtures ----------------------------------------------------

def graph_dot(p: Presentation, max_len: int, relation: str = "E") -> str:
    """DOT rendering of the fragment on domain words of length at most ``max_len``."""
    words = [tuple(w) for w in fa.enumerate_llex(p.domain, max_len)]
    ids = {w: i for i, w in enumerate(words)}
    r = p.relation(relation)
    lines = ["digraph G {"]
    lines += [f'  n{i} [label="{p.alphabet.decode(w)}"];' for w, i in ids.items()]
    for w, i in ids.items():
        for y in _successors(r, w, max_len):
            if y in ids:
                lines.append(f"  n{i} -> n{ids[y]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


FIXTURES = {
    # moves right over a and b, stops on the first blank
    "right_mover": """states: q h
initial: q
accept: h
blank: B
alphabet: a b
q a -> q a R
q b -> q b R
end
""",
    # never halts
    "looper": """states: q0 qa
initial: q0
accept: qa
blank: B
alphabet: 0 1
q0 0 -> q0 0 R
q0 1 -> q0 1 R
q0 B -> q0 B R
end
""",
    # accepts after one step
    "always_accept": """states: q0 qa
initial: q0
accept: qa
blank: B
alphabet: 0 1
q0 0 -> qa 0 R
q0 1 -> qa 1 R
q0 B -> qa B R
end
""",
    # scans its input and accepts at the first blank
    "scan_accept": """states: q0 qa
initial: q0
accept: qa
blank: B
alphabet: 0 1
q0 0 -> q0 0 R
q0 1 -> q0 1 R
q0 B -> qa B R
end
""",
    # overwrites with 0: two configurations share a successor
    "eraser": """states: q0 qa
initial: q0
accept: qa
blank: B
alphabet: 0 1
q0 0 -> q0 0 R
q0 1 -> q0 0 R
q0 B -> qa B R
end
""",
    # steps left off the input and back; exercises the left edge
    "bouncer": """states: q0 q1 q2 qa
initial: q0
accept: qa
blank: B
alphabet: 0 1
q0 0 -> q1 1 L
q0 1 -> q1 0 L
q0 B -> q1 1 L
q1 0 -> q2 0 R
q1 1 -> q2 B R
q1 B -> q2 B R
q2 0 -> qa 1 L
q2 1 -> qa B L
q2 B -> qa B R
end
""",
}


def fixture(name: str) -> TmSpec:
    return parse_tm(FIXTURES[name])
