"""First-order logic with the "there exist infinitely many" quantifier.

Formulas compile bottom-up into regular relations over their free
variables (tapes sorted by variable name).  Negation is always taken
relative to the domain: inside a conjunction it becomes an anti-join
against the positive conjuncts, elsewhere a difference with the domain
universe over the free variables.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from . import automata as fa
from . import relations as rel
from .errors import ArityMismatch, FreeVariablePresent, ParseError, RebindError, UnknownRelation
from .presentation import Presentation, Signature, tape_names
from .relations import RegularRelation


# -- syntax -------------------------------------------------------------------


class Formula:
    __slots__ = ()

    def free_vars(self) -> frozenset:
        raise NotImplementedError

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class TrueF(Formula):
    def free_vars(self):
        return frozenset()


@dataclass(frozen=True)
class FalseF(Formula):
    def free_vars(self):
        return frozenset()


@dataclass(frozen=True)
class Atom(Formula):
    rel: str
    args: tuple

    def free_vars(self):
        return frozenset(self.args)


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str

    def free_vars(self):
        return frozenset((self.left, self.right))


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def free_vars(self):
        return self.body.free_vars()


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def free_vars(self):
        return self.left.free_vars() | self.right.free_vars()


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def free_vars(self):
        return self.left.free_vars() | self.right.free_vars()


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def free_vars(self):
        return self.left.free_vars() | self.right.free_vars()


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula

    def free_vars(self):
        return self.body.free_vars() - {self.var}


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula

    def free_vars(self):
        return self.body.free_vars() - {self.var}


@dataclass(frozen=True)
class ExistsInf(Formula):
    var: str
    body: Formula

    def free_vars(self):
        return self.body.free_vars() - {self.var}


_QUANT = {"A": Forall, "E": Exists, "Einf": ExistsInf}
_QUANT_NAME = {Forall: "A", Exists: "E", ExistsInf: "Einf"}


def format_formula(f: Formula) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Atom):
        return f"{f.rel}({','.join(f.args)})"
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Not):
        return f"!{_wrap(f.body)}"
    if isinstance(f, And):
        return f"{_wrap(f.left)} & {_wrap(f.right)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left)} | {_wrap(f.right)}"
    if isinstance(f, Implies):
        return f"{_wrap(f.left)} -> {_wrap(f.right)}"
    return f"{_QUANT_NAME[type(f)]} {f.var}. {format_formula(f.body)}"


def _wrap(f):
    if isinstance(f, (TrueF, FalseF, Atom, Not)):
        return format_formula(f)
    return f"({format_formula(f)})"


_TOKEN = re.compile(r"\s*(?:(->)|([A-Za-z][A-Za-z0-9_]*)|(\S))")


class _Parser:
    def __init__(self, text: str, sig: Signature | None):
        self.text = text
        self.sig = sig
        self.tokens = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos and not m.group(0):
                break
            if m.group(0).strip() == "":
                break
            tok = m.group(1) or m.group(2) or m.group(3)
            self.tokens.append((tok, m.start(m.lastindex) + 1, bool(m.group(2))))
            pos = m.end()
        self.i = 0

    def peek(self, k=0):
        j = self.i + k
        return self.tokens[j] if j < len(self.tokens) else (None, len(self.text) + 1, False)

    def error(self, message, col=None):
        raise ParseError(message, 1, col if col is not None else self.peek()[1])

    def take(self, expected=None):
        tok = self.peek()
        if tok[0] is None:
            self.error(f"unexpected end of formula{'' if expected is None else f', expected {expected!r}'}")
        if expected is not None and tok[0] != expected:
            self.error(f"expected {expected!r}, found {tok[0]!r}")
        self.i += 1
        return tok

    def ident(self):
        tok, col, is_ident = self.take()
        if not is_ident:
            self.error(f"expected an identifier, found {tok!r}", col)
        return tok

    def is_quantifier(self):
        tok, _, is_ident = self.peek()
        return is_ident and tok in _QUANT and self.peek(1)[2] and self.peek(2)[0] == "."

    def parse(self) -> Formula:
        f = self.formula(frozenset())
        if self.peek()[0] is not None:
            self.error(f"unexpected {self.peek()[0]!r}")
        return f

    def formula(self, bound):
        if self.is_quantifier():
            q = _QUANT[self.take()[0]]
            col = self.peek()[1]
            var = self.ident()
            if var in bound:
                raise RebindError(f"1:{col}: variable {var!r} is bound twice on one path")
            self.take(".")
            return q(var, self.formula(bound | {var}))
        return self.implication(bound)

    def implication(self, bound):
        left = self.disjunction(bound)
        if self.peek()[0] == "->":
            self.take()
            return Implies(left, self.implication(bound))
        return left

    def disjunction(self, bound):
        f = self.conjunction(bound)
        while self.peek()[0] == "|":
            self.take()
            f = Or(f, self.conjunction(bound))
        return f

    def conjunction(self, bound):
        f = self.unary(bound)
        while self.peek()[0] == "&":
            self.take()
            f = And(f, self.unary(bound))
        return f

    def unary(self, bound):
        tok, col, is_ident = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary(bound))
        if tok == "(":
            self.take()
            f = self.formula(bound)
            self.take(")")
            return f
        if self.is_quantifier():
            return self.formula(bound)
        return self.atom(bound)

    def atom(self, bound=frozenset()):
        tok, col, is_ident = self.peek()
        if not is_ident:
            self.error(f"expected a formula, found {tok!r}" if tok else "unexpected end of formula")
        name = self.ident()
        if self.peek()[0] == "(":
            self.take()
            args = [self.ident()]
            while self.peek()[0] == ",":
                self.take()
                args.append(self.ident())
            self.take(")")
            if name == "eq" and len(args) == 2 and (self.sig is None or "eq" not in self.sig):
                return self.constants(Eq(*args), bound)
            if self.sig is not None:
                if name not in self.sig:
                    raise UnknownRelation(f"1:{col}: unknown relation {name!r}")
                if self.sig[name] != len(args):
                    raise ArityMismatch(
                        f"1:{col}: {name!r} has arity {self.sig[name]}, used with {len(args)} arguments")
            return self.constants(Atom(name, tuple(args)), bound)
        if self.peek()[0] == "=":
            self.take()
            return self.constants(Eq(name, self.ident()), bound)
        if name == "true":
            return TrueF()
        if name == "false":
            return FalseF()
        self.error(f"expected '(' or '=' after {name!r}")


    def constants(self, f, bound):
        """An unbound argument named after a unary relation stands for the element it picks out."""
        if self.sig is None:
            return f
        args = f.args if isinstance(f, Atom) else (f.left, f.right)
        consts = sorted({a for a in args if a not in bound and self.sig.get(a) == 1})
        if not consts:
            return f
        sub = {c: f"{c}'" for c in consts}
        new = [sub.get(a, a) for a in args]
        f = Atom(f.rel, tuple(new)) if isinstance(f, Atom) else Eq(*new)
        for c in consts:
            f = Exists(sub[c], And(Atom(c, (sub[c],)), f))
        return f


def parse_formula(text: str, sig: Signature | None = None) -> Formula:
    return _Parser(text, sig).parse()


# -- normalisation ------------------------------------------------------------


def normalize(f: Formula, negate: bool = False) -> Formula:
    """Push negations inward; only Exists/ExistsInf/Atom/Eq stay under Not, and Forall/Implies vanish."""
    if isinstance(f, TrueF):
        return FalseF() if negate else f
    if isinstance(f, FalseF):
        return TrueF() if negate else f
    if isinstance(f, (Atom, Eq)):
        return Not(f) if negate else f
    if isinstance(f, Not):
        return normalize(f.body, not negate)
    if isinstance(f, And):
        l, r = normalize(f.left, negate), normalize(f.right, negate)
        return Or(l, r) if negate else And(l, r)
    if isinstance(f, Or):
        l, r = normalize(f.left, negate), normalize(f.right, negate)
        return And(l, r) if negate else Or(l, r)
    if isinstance(f, Implies):
        if negate:
            return And(normalize(f.left), normalize(f.right, True))
        return Or(normalize(f.left, True), normalize(f.right))
    if isinstance(f, Exists):
        g = Exists(f.var, normalize(f.body))
        return Not(g) if negate else g
    if isinstance(f, ExistsInf):
        g = ExistsInf(f.var, normalize(f.body))
        return Not(g) if negate else g
    if isinstance(f, Forall):
        g = Exists(f.var, normalize(f.body, True))
        return g if negate else Not(g)
    raise TypeError(f"not a formula: {f!r}")


def _flatten(f, kind):
    if isinstance(f, kind):
        return _flatten(f.left, kind) + _flatten(f.right, kind)
    return [f]


# -- compilation ---------------------------------------------------------------


@dataclass(frozen=True)
class CompiledQuery:
    formula: Formula
    variables: tuple
    relation: RegularRelation

    @property
    def truth(self) -> bool:
        if self.variables:
            raise FreeVariablePresent(f"free variables {self.variables}")
        return self.relation.automaton.accepts(())

    def contains(self, *words) -> bool:
        return self.relation.contains(*words)


def exists_infinitely(r: RegularRelation, var: str) -> RegularRelation:
    """Tuples of the other tapes with infinitely many completions on ``var``.

    Infinitely many values exist iff, after reading as far as the longest other
    component (with ``var`` still unpadded), the automaton sits in a state whose
    language of ``var``-only continuations is infinite.
    """
    k = r.index(var)
    d = fa.minimal(r.automaton)
    n = d.n_states
    tail = [[] for _ in range(n)]
    body = []
    for p, row in enumerate(d.delta):
        kept = {}
        for sym, ts in row.items():
            if sym[k] == fa.PAD:
                continue
            rest = sym[:k] + sym[k + 1:]
            if all(c == fa.PAD for c in rest):
                tail[p].extend(ts)
            else:
                kept[rest] = kept.get(rest, ()) + ts
        body.append({s: tuple(sorted(set(ts))) for s, ts in kept.items()})
    rev = [[] for _ in range(n)]
    for p, ts in enumerate(tail):
        for q in ts:
            rev[q].append(p)
    live = _backward_closure(set(d.finals), rev)
    cyclic = _cyclic_nodes({p: [q for q in tail[p] if q in live] for p in live})
    rev_live = [[p for p in rev[q] if p in live] for q in range(n)]
    infinite = _backward_closure(cyclic, rev_live)
    tapes = r.tapes[:k] + r.tapes[k + 1:]
    alpha = rel.TupleAlphabet(r.base, len(tapes))
    return RegularRelation(tapes, fa.Automaton(alpha, n, d.initial, infinite, body))


def exists_infinitely_by_guard(r: RegularRelation, var: str) -> RegularRelation:
    """Same relation via a pumping threshold: some value longer than the rest by the state count."""
    threshold = fa.determinize(r.automaton, complete_it=True).n_states
    others = [t for t in r.tapes if t != var]
    return rel.project(rel.length_guard(r, var, others, threshold), var)


def _backward_closure(seeds, rev):
    seen = set(seeds)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for p in rev[q]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def _cyclic_nodes(graph: dict) -> set:
    """Nodes lying on some cycle (iterative Tarjan)."""
    index, low, on_stack, stack, out = {}, {}, set(), [], set()
    counter = 0
    for root in graph:
        if root in index:
            continue
        work = [(root, iter(graph[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(graph[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                if len(comp) > 1 or v in graph[v]:
                    out.update(comp)
    return out


class Compiler:
    """Compiles formulas against one presentation, memoising subformulas."""

    def __init__(self, presentation: Presentation, infinity: str = "tail"):
        self.p = presentation
        self.domain = fa.minimal(presentation.domain)
        self.base = presentation.alphabet
        self.infinity = infinity
        self.cache = presentation.cache.setdefault(("compiled", infinity), {})
        self._fresh = 0

    def fresh(self) -> str:
        self._fresh += 1
        return f"_v{self._fresh}"

    def compile(self, f: Formula) -> RegularRelation:
        return self._compile(normalize(f))

    def _compile(self, f: Formula) -> RegularRelation:
        hit = self.cache.get(f)
        if hit is None:
            hit = self._build(f)
            hit = rel.canonical_order(hit).minimal()
            self.cache[f] = hit
        return hit

    def _build(self, f: Formula) -> RegularRelation:
        if isinstance(f, TrueF):
            return rel.true_relation(self.base)
        if isinstance(f, FalseF):
            return rel.false_relation(self.base)
        if isinstance(f, Atom):
            return self._atom(f)
        if isinstance(f, Eq):
            if f.left == f.right:
                return rel.from_domain(self.domain, f.left)
            return rel.equality(self.domain, f.left, f.right)
        if isinstance(f, Not):
            inner = self._compile(f.body)
            return rel.antijoin(rel.universe(self.domain, inner.tapes), inner)
        if isinstance(f, And):
            return self._conjunction(_flatten(f, And))
        if isinstance(f, Or):
            return self._disjunction(_flatten(f, Or))
        if isinstance(f, Exists):
            bound, body = set(), f
            while isinstance(body, Exists):
                bound.add(body.var)
                body = body.body
            if body.free_vars() <= bound:
                # the block closes a sentence: only emptiness of the body matters
                truth = not fa.is_empty(self.domain) and self._satisfiable(body)
                return rel.true_relation(self.base) if truth else rel.false_relation(self.base)
            inner = self._compile(f.body)
            if f.var not in inner.tapes:
                return inner if not fa.is_empty(self.domain) else rel.false_relation(self.base, inner.tapes)
            return rel.project(inner, f.var)
        if isinstance(f, ExistsInf):
            inner = self._compile(f.body)
            if f.var not in inner.tapes:
                return inner if not fa.is_finite(self.domain) else rel.false_relation(self.base, inner.tapes)
            if self.infinity == "guard":
                return exists_infinitely_by_guard(inner, f.var)
            return exists_infinitely(inner, f.var)
        raise TypeError(f"unexpected node after normalisation: {f!r}")

    def _atom(self, f: Atom) -> RegularRelation:
        r = self.p.relation(f.rel)
        if r.arity != len(f.args):
            raise ArityMismatch(f"{f.rel!r} has arity {r.arity}, used with {len(f.args)} arguments")
        mapping, repeats, seen = {}, [], set()
        for tape, var in zip(tape_names(r.arity), f.args):
            if var in seen:
                tmp = self.fresh()
                mapping[tape] = tmp
                repeats.append((tmp, var))
            else:
                mapping[tape] = var
                seen.add(var)
        out = rel.rename(r, mapping)
        for tmp, var in repeats:
            out = rel.join(out, rel.equality(self.domain, tmp, var)).minimal()
            out = rel.project(out, tmp)
        return out

    def _satisfiable(self, f: Formula) -> bool:
        hit = self.cache.get(f)
        if hit is not None:
            return not fa.is_empty(hit.automaton)
        if isinstance(f, Or):
            return any(self._satisfiable(g) for g in _flatten(f, Or))
        if isinstance(f, And):
            return not fa.is_empty(self._conjunction(_flatten(f, And), final_minimal=False).automaton)
        return not fa.is_empty(self._compile(f).automaton)

    def _conjunction(self, parts, final_minimal: bool = True) -> RegularRelation:
        positives = [g for g in parts if not isinstance(g, Not)]
        negatives = [g.body for g in parts if isinstance(g, Not)]
        compiled = sorted((self._compile(g) for g in positives), key=lambda r: (r.arity, r.automaton.n_states))
        if any(fa.is_empty(r.automaton) for r in compiled):
            tapes = set().union(*(g.free_vars() for g in parts))
            return rel.false_relation(self.base, sorted(tapes))
        ordered, have = [], set()
        while compiled:
            # filters on covered tapes first, then cheap unary factors, then the most overlap
            best = min(compiled, key=lambda r: (not have.issuperset(r.tapes), r.arity > 1,
                                                -len(have.intersection(r.tapes)), r.automaton.n_states))
            compiled.remove(best)
            ordered.append(best)
            have.update(best.tapes)
        steps = [("join", r) for r in ordered] + [("anti", g) for g in negatives]
        cur = rel.true_relation(self.base)
        for n, (kind, item) in enumerate(steps):
            if kind == "join":
                cur = rel.join(cur, item)
            else:
                neg = self._compile(item)
                missing = [t for t in neg.tapes if t not in cur.tapes]
                if missing:
                    cur = rel.join(cur, rel.universe(self.domain, missing)).minimal()
                cur = rel.antijoin(cur, neg)
            if final_minimal or n < len(steps) - 1:
                cur = cur.minimal()
        return cur

    def _disjunction(self, parts) -> RegularRelation:
        compiled = [self._compile(g) for g in parts]
        tapes = sorted(set().union(*(r.tapes for r in compiled)))
        out = None
        for r in compiled:
            missing = [t for t in tapes if t not in r.tapes]
            if missing:
                r = rel.join(r, rel.universe(self.domain, missing))
            r = rel.reorder(r, tapes)
            out = r if out is None else rel.union(out, r)
            out = out.minimal()
        return out


def _as_formula(f, p: Presentation) -> Formula:
    return parse_formula(f, p.signature) if isinstance(f, str) else f


def compile_query(f, p: Presentation, infinity: str = "tail") -> CompiledQuery:
    f = _as_formula(f, p)
    r = Compiler(p, infinity).compile(f)
    return CompiledQuery(f, r.tapes, r)


def eval_sentence(f, p: Presentation) -> bool:
    f = _as_formula(f, p)
    free = f.free_vars()
    if free:
        raise FreeVariablePresent(f"sentence has free variables {sorted(free)}")
    return compile_query(f, p).truth


def solutions(f, p: Presentation, max_len: int) -> Iterator[tuple]:
    """Decoded tuples (variables in sorted order) of the query's relation, length-lex by convolution."""
    q = compile_query(f, p)
    if not q.variables:
        raise FreeVariablePresent("solutions() needs at least one free variable")
    for comps in q.relation.members(max_len):
        yield tuple(p.alphabet.decode(c) for c in comps)


def define(p: Presentation, name: str, f, variables) -> Presentation:
    """Expand p by a relation defined by ``f`` with tapes in the given variable order."""
    q = compile_query(f, p)
    variables = tuple(variables)
    if set(variables) != set(q.variables):
        raise ArityMismatch(f"variables {variables} do not match free variables {q.variables}")
    r = rel.reorder(q.relation, variables)
    return p.extend(name, r)
