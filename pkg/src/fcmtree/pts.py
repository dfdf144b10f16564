"""Parameterized tree systems: rule trees over state pairs, their term
translations, and the embedding order on state trees."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .fol import App, Term, Var, const
from .trees import EMPTY, Tree, TreeError, parse_tree, projection, state_function


class PtsError(ValueError):
    pass


class NonBinaryRule(PtsError):
    pass


class InconsistentPair(PtsError):
    pass


@dataclass(frozen=True)
class TermRule:
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if _var_positions(self.lhs) != _var_positions(self.rhs):
            raise InconsistentPair(f"variables of {self.lhs} and {self.rhs} are not at the same positions")

    def __str__(self):
        return f"{self.lhs} => {self.rhs}"


@dataclass(frozen=True)
class RewriteSystem:
    states: frozenset
    rules: tuple  # Trees labelled by (lhs_state, rhs_state)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "rules", tuple(self.rules))
        for r in self.rules:
            for node in r.iter_nodes():
                lab = node.label
                if not (isinstance(lab, tuple) and len(lab) == 2):
                    raise PtsError(f"rule node label {lab!r} is not a state pair")
                if not set(lab) <= self.states:
                    raise PtsError(f"rule {r} uses states outside {sorted(self.states)}")
                if len(node.children) > 2:
                    raise NonBinaryRule(f"rule {r} has a node with {len(node.children)} children")

    def term_rules(self) -> list:
        out = []
        for r in self.rules:
            for pair in sorted(term_pairs_of_rule(r), key=str):
                tr = generalize(pair)
                if tr not in out:
                    out.append(tr)
        return out


def rule_projections(r: Tree) -> tuple:
    return projection(r, 0), projection(r, 1)


def term_pairs_of_rule(r: Tree) -> frozenset:
    """Pairs of ground terms over f_q and e translating a (possibly incomplete) rule tree."""
    q1, q2 = r.label
    f1, f2 = state_function(q1), state_function(q2)
    e = const(EMPTY)
    kids = r.children
    if not kids:
        return frozenset({(App(f1, (e, e)), App(f2, (e, e)))})
    if len(kids) == 2:
        left, right = term_pairs_of_rule(kids[0]), term_pairs_of_rule(kids[1])
        return frozenset((App(f1, (a1, b1)), App(f2, (a2, b2)))
                         for a1, a2 in left for b1, b2 in right)
    if len(kids) == 1:
        sub = term_pairs_of_rule(kids[0])
        return frozenset({(App(f1, (a1, e)), App(f2, (a2, e))) for a1, a2 in sub}
                         | {(App(f1, (e, a1)), App(f2, (e, a2))) for a1, a2 in sub})
    raise NonBinaryRule(f"rule node with {len(kids)} children")


def _e_positions(t: Term, pos=()) -> list:
    if isinstance(t, App) and not t.args and t.fn == EMPTY:
        return [pos]
    if isinstance(t, App):
        return [p for i, a in enumerate(t.args) for p in _e_positions(a, pos + (i,))]
    return []


def _var_positions(t: Term, pos=()) -> frozenset:
    if isinstance(t, Var):
        return frozenset({(pos, t)})
    return frozenset().union(*(_var_positions(a, pos + (i,)) for i, a in enumerate(t.args)))


def _replace(t: Term, names: dict, pos=()) -> Term:
    if pos in names:
        return names[pos]
    if isinstance(t, App) and t.args:
        return App(t.fn, tuple(_replace(a, names, pos + (i,)) for i, a in enumerate(t.args)))
    return t


def generalize(pair: tuple) -> TermRule:
    """Replace each occurrence of ``e`` by a fresh variable, shared between the sides.

    Variables are named ``x1, x2, ...`` in left-to-right position order.
    """
    lhs, rhs = pair
    left, right = _e_positions(lhs), _e_positions(rhs)
    if left != right:
        raise InconsistentPair(f"e occurs at different positions in {lhs} and {rhs}")
    names = {p: Var(f"x{i}") for i, p in enumerate(left, 1)}
    return TermRule(_replace(lhs, names), _replace(rhs, names))


# -- embedding -----------------------------------------------------------------

def embeds(small: Tree, big: Tree) -> bool:
    """Whether ``small`` embeds into ``big``.

    The image of a node's i-th child lies in the subtree under the image's
    i-th child; the single child of a one-child node may go into either
    subtree, matching how one-child rule nodes are translated.
    """

    @lru_cache(maxsize=None)
    def hosts(s: Tree, b: Tree) -> bool:
        if s.label != b.label:
            return False
        if not s.children:
            return True
        if len(s.children) == 1:
            return any(below(s.children[0], c) for c in b.children)
        if len(s.children) > len(b.children):
            return False
        return all(below(sc, bc) for sc, bc in zip(s.children, b.children))

    @lru_cache(maxsize=None)
    def below(s: Tree, b: Tree) -> bool:
        return hosts(s, b) or any(below(s, c) for c in b.children)

    return below(small, big)


# -- JSON rule notation --------------------------------------------------------

def rule_from_json(obj, path="rule") -> Tree:
    if isinstance(obj, str):
        try:
            return parse_tree(obj)
        except TreeError as exc:
            raise PtsError(f"{path}: {exc}") from None
    if not isinstance(obj, dict) or "pair" not in obj:
        raise PtsError(f"{path}: expected an object with a 'pair' field")
    pair = obj["pair"]
    if not (isinstance(pair, list) and len(pair) == 2):
        raise PtsError(f"{path}.pair: expected two states")
    kids = obj.get("children", [])
    return Tree(tuple(pair), tuple(rule_from_json(c, f"{path}.children[{i}]") for i, c in enumerate(kids)))


def rule_to_json(r: Tree) -> dict:
    out = {"pair": list(r.label)}
    if r.children:
        out["children"] = [rule_to_json(c) for c in r.children]
    return out


def state_tree_from_json(obj, path="tree") -> Tree:
    if isinstance(obj, str):
        try:
            return parse_tree(obj)
        except TreeError as exc:
            raise PtsError(f"{path}: {exc}") from None
    raise PtsError(f"{path}: expected a tree in textual notation")

