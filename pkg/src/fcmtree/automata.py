"""Bottom-up tree automata and tree transducers."""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field

from .trees import RankedAlphabet, Tree, product, structurally_equivalent


class AutomatonError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    symbol: object
    lhs: tuple
    rhs: object

    def __str__(self):
        return f"({','.join(map(str, self.lhs))}) -{self.symbol}-> {self.rhs}"


@dataclass(frozen=True)
class TreeAutomaton:
    states: frozenset
    finals: frozenset
    rules: frozenset
    alphabet: RankedAlphabet | None = None
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        rules = frozenset(r if isinstance(r, Rule) else Rule(r[0], tuple(r[1]), r[2]) for r in self.rules)
        object.__setattr__(self, "rules", rules)
        if not self.finals <= self.states:
            raise AutomatonError(f"final states {set(self.finals - self.states)} not in the state set")
        arity = {}
        for r in rules:
            if not set(r.lhs) | {r.rhs} <= self.states:
                raise AutomatonError(f"rule {r} uses undeclared states")
            if arity.setdefault(r.symbol, len(r.lhs)) != len(r.lhs):
                raise AutomatonError(f"symbol {r.symbol!r} used with two arities")
            if self.alphabet is not None and self.alphabet.arity.get(r.symbol) != len(r.lhs):
                raise AutomatonError(f"rule {r} does not match the arity of {r.symbol!r}")
        index = defaultdict(list)
        for r in sorted(rules, key=str):
            index[(r.symbol, len(r.lhs))].append(r)
        object.__setattr__(self, "_index", dict(index))

    def rules_for(self, symbol, arity: int) -> list:
        return self._index.get((symbol, arity), [])

    def symbol_arities(self) -> dict:
        if self.alphabet is not None:
            return dict(self.alphabet.arity)
        return {r.symbol: len(r.lhs) for r in self.rules}

    def with_rules(self, extra) -> "TreeAutomaton":
        return TreeAutomaton(self.states, self.finals, self.rules | frozenset(extra), self.alphabet)

    def is_deterministic(self) -> bool:
        seen = set()
        for r in self.rules:
            key = (r.symbol, r.lhs)
            if key in seen:
                return False
            seen.add(key)
        return True

    def is_complete(self) -> bool:
        arities = self.symbol_arities()
        keys = {(r.symbol, r.lhs) for r in self.rules}
        states = sorted(self.states, key=repr)
        return all((f, lhs) in keys for f, p in arities.items()
                   for lhs in itertools.product(states, repeat=p))


def automaton(states, finals, rules, alphabet=None) -> TreeAutomaton:
    """Build from ``(symbol, lhs_states, rhs_state)`` triples."""
    return TreeAutomaton(frozenset(states), frozenset(finals),
                         frozenset(Rule(f, tuple(lhs), q) for f, lhs, q in rules), alphabet)


def states_reaching(a: TreeAutomaton, t: Tree) -> frozenset:
    """All states q such that some run of ``a`` on ``t`` labels the root with q."""
    kids = [states_reaching(a, c) for c in t.children]
    out = set()
    for r in a.rules_for(t.label, len(kids)):
        if all(q in s for q, s in zip(r.lhs, kids)):
            out.add(r.rhs)
    return frozenset(out)


def accepts(a: TreeAutomaton, t: Tree) -> bool:
    return not states_reaching(a, t).isdisjoint(a.finals)


def transducer_relates(d: TreeAutomaton, t1: Tree, t2: Tree) -> bool:
    if not structurally_equivalent(t1, t2):
        return False
    return accepts(d, product([t1, t2]))


def check_transducer(d: TreeAutomaton):
    for r in d.rules:
        if not (isinstance(r.symbol, tuple) and len(r.symbol) == 2):
            raise AutomatonError(f"transducer rule {r} must use a pair symbol")


def reachable_states(a: TreeAutomaton) -> frozenset:
    """Least fixpoint of states reached by some tree."""
    reached: set = set()
    changed = True
    while changed:
        changed = False
        for r in a.rules:
            if r.rhs not in reached and all(q in reached for q in r.lhs):
                reached.add(r.rhs)
                changed = True
    return frozenset(reached)


def language_empty(a: TreeAutomaton) -> bool:
    return reachable_states(a).isdisjoint(a.finals)


def determinize(a: TreeAutomaton, alphabet: RankedAlphabet | None = None) -> TreeAutomaton:
    """Subset construction, completed with the empty set as sink.

    States of the result are frozensets of states of ``a``.  The alphabet is
    ``alphabet`` if given, else ``a.alphabet``, else the symbols used by rules.
    """
    arities = dict(alphabet.arity) if alphabet is not None else a.symbol_arities()
    sink = frozenset()
    det_states = {sink}
    rules = {}
    changed = True
    while changed:
        changed = False
        current = sorted(det_states, key=lambda s: sorted(map(repr, s)))
        for f, p in sorted(arities.items(), key=lambda kv: repr(kv[0])):
            for lhs in itertools.product(current, repeat=p):
                if (f, lhs) in rules:
                    continue
                target = frozenset(r.rhs for r in a.rules_for(f, p)
                                   if all(q in s for q, s in zip(r.lhs, lhs)))
                rules[(f, lhs)] = target
                if target not in det_states:
                    det_states.add(target)
                    changed = True
    finals = {s for s in det_states if not s.isdisjoint(a.finals)}
    alpha = alphabet or a.alphabet
    return TreeAutomaton(frozenset(det_states), frozenset(finals),
                         frozenset(Rule(f, lhs, q) for (f, lhs), q in rules.items()), alpha)


def complement(a: TreeAutomaton, alphabet: RankedAlphabet | None = None) -> TreeAutomaton:
    """Determinize and flip the final states (test helper)."""
    d = determinize(a, alphabet)
    return TreeAutomaton(d.states, d.states - d.finals, d.rules, d.alphabet)


def intersection(a: TreeAutomaton, b: TreeAutomaton, finals=None) -> TreeAutomaton:
    """Product automaton over the shared symbols; ``finals`` filters state pairs."""
    rules = set()
    for ra in a.rules:
        for rb in b.rules_for(ra.symbol, len(ra.lhs)):
            rules.add(Rule(ra.symbol, tuple(zip(ra.lhs, rb.lhs)), (ra.rhs, rb.rhs)))
    states = {(p, q) for p in a.states for q in b.states}
    if finals is None:
        fin = {(p, q) for p in a.finals for q in b.finals}
    else:
        fin = {s for s in states if finals(*s)}
    return TreeAutomaton(frozenset(states), frozenset(fin), frozenset(rules))


def rename_states(a: TreeAutomaton, names=None) -> TreeAutomaton:
    """Replace states by readable names (default ``s0, s1, ...`` in sorted order)."""
    if names is None:
        ordered = sorted(a.states, key=lambda s: (len(s) if isinstance(s, frozenset) else 0, sorted(map(repr, s)) if isinstance(s, frozenset) else repr(s)))
        names = {s: f"s{i}" for i, s in enumerate(ordered)}
    return TreeAutomaton(frozenset(names[s] for s in a.states), frozenset(names[s] for s in a.finals),
                         frozenset(Rule(r.symbol, tuple(names[q] for q in r.lhs), names[r.rhs]) for r in a.rules),
                         a.alphabet)


def accepted_trees(a: TreeAutomaton, max_nodes: int, arities: dict | None = None) -> dict:
    """Map each tree with at most ``max_nodes`` nodes that reaches some state to its state set.

    Built bottom-up by size through the rule index, so only trees with a run
    are ever constructed.
    """
    arities = arities or a.symbol_arities()
    by_size: list = [None] + [defaultdict(set) for _ in range(max_nodes)]  # size -> state -> trees
    for n in range(1, max_nodes + 1):
        for f, p in arities.items():
            rules = a.rules_for(f, p)
            if not rules:
                continue
            if p == 0:
                if n == 1:
                    for r in rules:
                        by_size[1][r.rhs].add(Tree(f))
                continue
            for split in _splits(n - 1, p):
                for r in rules:
                    pools = [by_size[s].get(q, ()) for s, q in zip(split, r.lhs)]
                    if not all(pools):
                        continue
                    for kids in itertools.product(*pools):
                        by_size[n][r.rhs].add(Tree(f, kids))
    out: dict = defaultdict(set)
    for n in range(1, max_nodes + 1):
        for q, trees in by_size[n].items():
            for t in trees:
                out[t].add(q)
    return {t: frozenset(s) for t, s in out.items()}


def _splits(total, parts):
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _splits(total - first, parts - 1):
            yield (first,) + rest


# -- JSON ---------------------------------------------------------------------

def _sym_from_json(s):
    return tuple(s) if isinstance(s, list) else s


def _sym_to_json(s):
    return list(s) if isinstance(s, tuple) else s


def automaton_from_json(obj: dict, alphabet: RankedAlphabet | None = None, path="automaton") -> TreeAutomaton:
    try:
        states = obj["states"]
        finals = obj["finals"]
        raw = obj["rules"]
    except KeyError as exc:
        raise AutomatonError(f"{path}: missing key {exc.args[0]!r}") from None
    rules = []
    for i, r in enumerate(raw):
        try:
            rules.append(Rule(_sym_from_json(r["symbol"]), tuple(r.get("lhs", [])), r["rhs"]))
        except (KeyError, TypeError):
            raise AutomatonError(f"{path}.rules[{i}]: expected symbol/lhs/rhs") from None
    try:
        return TreeAutomaton(frozenset(states), frozenset(finals), frozenset(rules), alphabet)
    except AutomatonError as exc:
        raise AutomatonError(f"{path}: {exc}") from None


def automaton_to_json(a: TreeAutomaton) -> dict:
    return {
        "states": sorted(a.states, key=repr),
        "finals": sorted(a.finals, key=repr),
        "rules": [{"symbol": _sym_to_json(r.symbol), "lhs": list(r.lhs), "rhs": r.rhs}
                  for r in sorted(a.rules, key=str)],
    }
