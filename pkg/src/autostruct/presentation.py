"""Automatic presentations: a regular domain plus regular atomic relations.

File format (line oriented, a line starting with ``#`` is a comment)::

    alphabet: 0 1 #
    domain regex: (0|1)#(|(0|1)*1)
    relation compl arity 2 automaton:
    states 3
    initial 0
    final 2
    0 0,1 1
    ...
    end

``domain automaton:`` followed by a block may replace the regex line.
Tuple symbols are comma-joined names with ``_`` for padding.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import automata as fa
from . import relations as rel
from .automata import PAD, Alphabet, Automaton
from .errors import ArityMismatch, ParseError, SignatureMismatch, UnknownRelation, UnknownSymbol
from .relations import RegularRelation, TupleAlphabet


def tape_names(arity: int) -> tuple[str, ...]:
    """Default tape labels of a signature relation; not valid formula variables."""
    return tuple(f"_{i}" for i in range(arity))


class Signature(dict):
    """Relation name -> arity, in declaration order."""

    def __init__(self, entries=()):
        super().__init__()
        for name, arity in dict(entries).items():
            if name in self:
                raise ValueError(f"duplicate relation {name!r}")
            if arity < 1:
                raise ArityMismatch(f"relation {name!r} must have arity >= 1")
            self[name] = arity


class Presentation:
    """Domain automaton and named relations over one alphabet."""

    def __init__(self, alphabet: Alphabet, domain: Automaton, relations: Mapping[str, RegularRelation],
                 domain_regex: str | None = None, factors=()):
        if domain.alphabet != alphabet:
            raise fa.AlphabetMismatch("domain automaton is over a different alphabet")
        rels = {}
        for name, r in relations.items():
            if r.base != alphabet:
                raise fa.AlphabetMismatch(f"relation {name!r} is over a different alphabet")
            rels[name] = rel.rename(r, dict(zip(r.tapes, tape_names(r.arity))))
        self.alphabet = alphabet
        self.domain = domain
        self.relations = rels
        self.domain_regex = domain_regex
        self.cache: dict = {}
        self.factors = tuple(factors)  # set by product_presentation

    @property
    def signature(self) -> Signature:
        return Signature({name: r.arity for name, r in self.relations.items()})

    def relation(self, name: str) -> RegularRelation:
        try:
            return self.relations[name]
        except KeyError:
            raise UnknownRelation(name) from None

    def extend(self, name: str, relation: RegularRelation) -> "Presentation":
        """A definitional expansion by one more relation."""
        rels = dict(self.relations)
        rels[name] = relation
        out = Presentation(self.alphabet, self.domain, rels, self.domain_regex)
        if name not in self.relations:
            out.cache = self.cache  # compiled entries for the old signature stay valid
            out.factors = self.factors
        return out

    def elements(self, max_len: int):
        for w in fa.enumerate_llex(self.domain, max_len):
            yield w

    def holds(self, name: str, *words) -> bool:
        return self.relation(name).contains(*words)

    def __repr__(self):
        sig = ", ".join(f"{n}/{a}" for n, a in self.signature.items())
        return f"<Presentation alphabet={list(self.alphabet.names)} relations=[{sig}]>"


# -- parsing ----------------------------------------------------------------


class _Lines:
    def __init__(self, text: str):
        self.items = []
        for no, raw in enumerate(text.splitlines(), start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            self.items.append((no, raw, stripped))
        self.pos = 0

    def next(self, what: str):
        if self.pos >= len(self.items):
            line = self.items[-1][0] + 1 if self.items else 1
            raise ParseError(f"unexpected end of input, expected {what}", line, 1)
        item = self.items[self.pos]
        self.pos += 1
        return item

    def done(self):
        return self.pos >= len(self.items)


def _column(raw: str, token: str) -> int:
    idx = raw.find(token)
    return idx + 1 if idx >= 0 else 1


def _parse_block(lines: _Lines, alphabet) -> Automaton:
    def field(keyword):
        no, raw, text = lines.next(keyword)
        parts = text.split()
        if parts[0] != keyword:
            raise ParseError(f"expected '{keyword}'", no, _column(raw, parts[0]))
        try:
            return no, [int(x) for x in parts[1:]]
        except ValueError as exc:
            raise ParseError(f"bad integer in '{keyword}' line: {exc}", no, 1) from None

    no, vals = field("states")
    if len(vals) != 1 or vals[0] < 1:
        raise ParseError("'states' takes one positive integer", no, 1)
    n = vals[0]
    no, vals = field("initial")
    if len(vals) != 1 or not 0 <= vals[0] < n:
        raise ParseError("'initial' takes one state id", no, 1)
    initial = vals[0]
    no, finals = field("final")
    for f in finals:
        if not 0 <= f < n:
            raise ParseError(f"final state {f} out of range", no, 1)
    transitions = []
    while True:
        no, raw, text = lines.next("'end'")
        if text == "end":
            break
        parts = text.split()
        if len(parts) != 3:
            raise ParseError("transition lines are 'state symbol state'", no, 1)
        try:
            p, q = int(parts[0]), int(parts[2])
        except ValueError:
            raise ParseError("state ids must be integers", no, 1) from None
        for s in (p, q):
            if not 0 <= s < n:
                raise ParseError(f"state {s} out of range", no, _column(raw, str(s)))
        try:
            sym = alphabet.parse_symbol(parts[1])
        except UnknownSymbol as exc:
            raise UnknownSymbol(f"{no}:{_column(raw, parts[1])}: {exc}") from None
        except ArityMismatch as exc:
            raise ArityMismatch(f"{no}:{_column(raw, parts[1])}: {exc}") from None
        transitions.append((p, sym, q))
    return Automaton.from_transitions(alphabet, n, initial, finals, transitions)


def parse_presentation(text: str) -> Presentation:
    lines = _Lines(text)
    no, raw, header = lines.next("'alphabet:' header")
    if not header.startswith("alphabet:"):
        raise ParseError("file must start with 'alphabet:'", no, 1)
    try:
        alphabet = Alphabet(header[len("alphabet:"):].split())
    except ValueError as exc:
        raise ParseError(str(exc), no, 1) from None

    no, raw, text_line = lines.next("domain declaration")
    domain_regex = None
    if text_line.startswith("domain regex:"):
        domain_regex = text_line[len("domain regex:"):].strip()
        domain = fa.regex(domain_regex, alphabet, line=no)
    elif text_line == "domain automaton:":
        domain = _parse_block(lines, alphabet)
    else:
        raise ParseError("expected 'domain regex:' or 'domain automaton:'", no, 1)

    relations = {}
    while not lines.done():
        no, raw, text_line = lines.next("relation")
        parts = text_line.split()
        if len(parts) != 5 or parts[0] != "relation" or parts[2] != "arity" or parts[4] != "automaton:":
            raise ParseError("expected 'relation <name> arity <k> automaton:'", no, 1)
        name = parts[1]
        if name in relations:
            raise ParseError(f"duplicate relation {name!r}", no, _column(raw, name))
        try:
            arity = int(parts[3])
        except ValueError:
            raise ParseError("arity must be an integer", no, _column(raw, parts[3])) from None
        if arity < 1:
            raise ParseError("arity must be positive", no, _column(raw, parts[3]))
        block = _parse_block(lines, TupleAlphabet(alphabet, arity))
        relations[name] = RegularRelation(tape_names(arity), block)
    return Presentation(alphabet, domain, relations, domain_regex)


def load_presentation(path) -> Presentation:
    import sys

    if str(path) == "-":
        return parse_presentation(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read())


def _emit_block(a: Automaton) -> list[str]:
    out = [f"states {a.n_states}", f"initial {a.initial}", "final " + " ".join(str(f) for f in sorted(a.finals))]
    out[-1] = out[-1].rstrip()
    for p, s, q in a.transitions():
        out.append(f"{p} {a.alphabet.name(s)} {q}")
    out.append("end")
    return out


def serialize_presentation(p: Presentation) -> str:
    lines = ["alphabet: " + " ".join(p.alphabet.names)]
    if p.domain_regex is not None:
        lines.append(f"domain regex: {p.domain_regex}")
    else:
        lines.append("domain automaton:")
        lines += _emit_block(fa.minimal(p.domain))
    for name in sorted(p.relations):
        r = p.relations[name]
        lines.append(f"relation {name} arity {r.arity} automaton:")
        lines += _emit_block(fa.minimal(r.automaton))
    return "\n".join(lines) + "\n"


# -- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str  # padding | containment | empty-domain
    relation: str | None
    witness: tuple | None
    detail: str = ""


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        if self.ok:
            return ["valid: true"]
        out = ["valid: false"]
        for v in self.violations:
            out.append(f"violation: {v.kind} relation={v.relation} witness={v.witness} {v.detail}".rstrip())
        return out

    def to_dict(self):
        return {
            "valid": self.ok,
            "violations": [
                {"kind": v.kind, "relation": v.relation, "witness": list(v.witness) if v.witness else None,
                 "detail": v.detail}
                for v in self.violations
            ],
        }


def _shortest_word(a: Automaton):
    for w in fa.enumerate_llex(a, 10**9):
        return w
    return None


def validate(p: Presentation) -> ValidationReport:
    report = ValidationReport()
    dom = fa.minimal(p.domain)
    if fa.is_empty(dom):
        report.violations.append(Violation("empty-domain", None, None, "domain accepts no word"))
    for name in sorted(p.relations):
        r = p.relations[name].minimal()
        bad = rel.padding_witness(r)
        if bad is not None:
            report.violations.append(Violation(
                "padding", name, tuple(r.alphabet.name(s) for s in bad), "padding followed by a letter"))
            continue
        for tape in r.tapes:
            outside = rel.antijoin(r, rel.from_domain(dom, tape))
            word = _shortest_word(fa.trim(outside.automaton))
            if word is not None:
                comps = rel.deconvolve(word, r.arity)
                witness = tuple(p.alphabet.decode(c) for c in comps)
                report.violations.append(Violation(
                    "containment", name, witness, f"component {int(tape[1:])} outside the domain"))
                break
    return report


# -- products -----------------------------------------------------------------

PAIR_PAD = "~"


def pair_name(a: str, b: str) -> str:
    return f"[{a}.{b}]"


def split_pair_name(name: str) -> tuple[str, str]:
    if not (name.startswith("[") and name.endswith("]")):
        raise ValueError(f"{name!r} is not a pair symbol")
    depth = 0
    for i, c in enumerate(name):
        if c == "[":
            depth += 1
        elif c == "]":
            depth -= 1
        elif c == "." and depth == 1:
            return name[1:i], name[i + 1:-1]
    raise ValueError(f"{name!r} is not a pair symbol")


def split_product_word(alphabet: Alphabet, word) -> tuple[list[str], list[str]]:
    """Split a product-domain word into its two component words (as name lists)."""
    if isinstance(word, str):
        word = alphabet.encode(word)
    left, right = [], []
    for s in word:
        a, b = split_pair_name(alphabet.names[s])
        if a != PAIR_PAD:
            left.append(a)
        if b != PAIR_PAD:
            right.append(b)
    return left, right


def _zip_product(automata, combine, alphabet) -> Automaton:
    """Run automata side by side; a finished side reads padding only (encoded as None)."""
    caches = [dict() for _ in automata]
    start = tuple(a.initial for a in automata)
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        states = order[i]
        i += 1
        row: dict = {}
        opts = [rel._options(a, q, c) for a, q, c in zip(automata, states, caches)]
        for combo in _cartesian(opts):
            sym = combine([s for s, _ in combo])
            if sym is None:
                continue
            key = tuple(t for _, t in combo)
            n = index.get(key)
            if n is None:
                n = index[key] = len(order)
                order.append(key)
            row.setdefault(sym, set()).add(n)
        delta.append({s: tuple(sorted(ts)) for s, ts in row.items()})
    finals = [
        n for n, states in enumerate(order)
        if all(q == rel._DONE or q in a.finals for a, q in zip(automata, states))
    ]
    return Automaton(alphabet, len(order), 0, finals, delta)


def _cartesian(option_lists):
    if not option_lists:
        yield ()
        return
    head, *rest = option_lists
    for tail in _cartesian(rest):
        for h in head:
            yield (h,) + tail


def product_presentation(p: Presentation, q: Presentation) -> Presentation:
    """Cartesian product; an element is the convolution of its two components over pair symbols."""
    if p.signature != q.signature:
        raise SignatureMismatch(f"{dict(p.signature)} != {dict(q.signature)}")
    left = list(p.alphabet.names) + [PAIR_PAD]
    right = list(q.alphabet.names) + [PAIR_PAD]
    names = [pair_name(a, b) for a in left for b in right if not (a == PAIR_PAD and b == PAIR_PAD)]
    alphabet = Alphabet(names)
    pair_index = {}
    for i, sa in enumerate(list(p.alphabet.symbols) + [PAD]):
        for j, sb in enumerate(list(q.alphabet.symbols) + [PAD]):
            if sa == PAD and sb == PAD:
                continue
            pair_index[(sa, sb)] = alphabet.index[pair_name(left[i], right[j])]

    def combine_domain(syms):
        sa, sb = syms
        if sa is None and sb is None:
            return None
        return pair_index[(PAD if sa is None else sa, PAD if sb is None else sb)]

    domain = fa.minimal(_zip_product([p.domain, q.domain], combine_domain, alphabet))
    relations = {}
    for name, arity in p.signature.items():
        rp, rq = p.relation(name), q.relation(name)
        pad = (PAD,) * arity
        talpha = TupleAlphabet(alphabet, arity)

        def combine(syms, pad=pad):
            sa, sb = syms
            if sa is None and sb is None:
                return None
            sa = pad if sa is None else sa
            sb = pad if sb is None else sb
            return tuple(
                PAD if (x == PAD and y == PAD) else pair_index[(x, y)] for x, y in zip(sa, sb)
            )

        auto = _zip_product([rp.automaton, rq.automaton], combine, talpha)
        relations[name] = RegularRelation(tape_names(arity), fa.minimal(auto))
    return Presentation(alphabet, domain, relations, factors=(p, q))
