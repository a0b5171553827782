"""Brute-force formula evaluation used as a test oracle.

Atoms are decided by the hand-written oracles in ``autostruct.builtins``
(decoded objects, ordinary Python arithmetic), never by automata.
Quantifiers range over the window of domain words of length at most
``window``; ``Einf x`` holds when a witness of length ``window - 1`` or
``window`` exists.  The formulas in the regression corpus are chosen so that
this window semantics coincides with the true semantics for free values of
length at most 5.
"""
from itertools import product

from autostruct import logic as L


def domain_words(orc, alphabet, max_len):
    out = []
    for n in range(max_len + 1):
        for letters in product(alphabet, repeat=n):
            w = "".join(letters)
            if orc.is_element(w):
                out.append(w)
    return out


class BruteForce:
    def __init__(self, orc, alphabet, window):
        self.orc = orc
        self.window = window
        self.universe = domain_words(orc, alphabet, window)
        self.far = [w for w in self.universe if len(w) >= window - 1]
        self._decoded = {w: orc.decode(w) for w in self.universe}
        self._atoms = {}

    def decode(self, w):
        if w not in self._decoded:
            self._decoded[w] = self.orc.decode(w)
        return self._decoded[w]

    def atom(self, rel, words):
        key = (rel, words)
        if key not in self._atoms:
            self._atoms[key] = self.orc.holds(rel, *(self.decode(w) for w in words))
        return self._atoms[key]

    def holds(self, f, env):
        if isinstance(f, L.TrueF):
            return True
        if isinstance(f, L.FalseF):
            return False
        if isinstance(f, L.Atom):
            return self.atom(f.rel, tuple(env[v] for v in f.args))
        if isinstance(f, L.Eq):
            return env[f.left] == env[f.right]
        if isinstance(f, L.Not):
            return not self.holds(f.body, env)
        if isinstance(f, L.And):
            return self.holds(f.left, env) and self.holds(f.right, env)
        if isinstance(f, L.Or):
            return self.holds(f.left, env) or self.holds(f.right, env)
        if isinstance(f, L.Implies):
            return not self.holds(f.left, env) or self.holds(f.right, env)
        if isinstance(f, L.Exists):
            return any(self.holds(f.body, {**env, f.var: w}) for w in self.universe)
        if isinstance(f, L.Forall):
            return all(self.holds(f.body, {**env, f.var: w}) for w in self.universe)
        if isinstance(f, L.ExistsInf):
            return any(self.holds(f.body, {**env, f.var: w}) for w in self.far)
        raise TypeError(f)
