"""Ranked alphabets, finite trees and their term translations.

Trees are immutable ``Tree(label, children)`` values.  The same class carries
trees over a ranked alphabet, configuration trees over a state set, and rule
trees whose labels are ``(lhs_state, rhs_state)`` pairs.

Textual notation: ``N(T(n,n),n)``; pair labels are written ``<t,n>``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .fol import App, Term, const


class TreeError(ValueError):
    pass


class ShapeMismatch(TreeError):
    pass


class ArityMismatch(TreeError):
    pass


class IncompleteTree(TreeError):
    pass


@dataclass(frozen=True)
class RankedAlphabet:
    arity: dict  # symbol -> int

    def __post_init__(self):
        for sym, p in self.arity.items():
            if not isinstance(p, int) or p < 0:
                raise TreeError(f"bad arity {p!r} for symbol {sym!r}")
        if not any(p == 0 for p in self.arity.values()):
            raise TreeError("alphabet has no symbol of arity 0; no finite tree exists")

    def __hash__(self):
        return hash(frozenset(self.arity.items()))

    @property
    def symbols(self) -> frozenset:
        return frozenset(self.arity)

    def of_arity(self, p: int) -> list:
        return sorted(s for s, a in self.arity.items() if a == p)

    def arities(self) -> list:
        return sorted(set(self.arity.values()))

    def pair_alphabet(self) -> "RankedAlphabet":
        """The alphabet of label pairs with equal arity (transducer alphabet)."""
        return RankedAlphabet({(f, g): p for f, p in self.arity.items()
                               for g, q in self.arity.items() if p == q})

    def admits(self, tree: "Tree") -> bool:
        return all(self.arity.get(n.label) == len(n.children) for n in tree.iter_nodes())


@dataclass(frozen=True)
class Tree:
    label: object
    children: tuple = ()
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.children, tuple):
            object.__setattr__(self, "children", tuple(self.children))
        object.__setattr__(self, "_hash", hash((self.label, self.children)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return format_tree(self)

    @property
    def arity(self) -> int:
        return len(self.children)

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)

    def iter_nodes(self) -> Iterator["Tree"]:
        yield self
        for c in self.children:
            yield from c.iter_nodes()

    def positions(self) -> Iterator[tuple]:
        """Node addresses: root is ``()``, child i of n is ``n + (i,)``."""
        yield ()
        for i, c in enumerate(self.children):
            for p in c.positions():
                yield (i,) + p

    def node_set(self) -> frozenset:
        return frozenset(self.positions())

    def at(self, pos: tuple) -> "Tree":
        t = self
        for i in pos:
            t = t.children[i]
        return t

    def relabel(self, fn) -> "Tree":
        return Tree(fn(self.label), tuple(c.relabel(fn) for c in self.children))

    def is_complete_binary(self) -> bool:
        return all(len(n.children) in (0, 2) for n in self.iter_nodes())


def leaf(label) -> Tree:
    return Tree(label, ())


def structurally_equivalent(t1: Tree, t2: Tree) -> bool:
    if len(t1.children) != len(t2.children):
        return False
    return all(structurally_equivalent(a, b) for a, b in zip(t1.children, t2.children))


def product(ts, alphabets: Iterable[RankedAlphabet] | None = None) -> Tree:
    """Node-wise tuple of labels of structurally equivalent trees.

    When ``alphabets`` is given, every tuple label must mix symbols of a single
    arity; without alphabets the arity of a symbol is its child count, so the
    check reduces to shape equality.
    """
    ts = list(ts)
    if not ts:
        raise TreeError("product of an empty list of trees")
    first = ts[0]
    for t in ts[1:]:
        if not structurally_equivalent(first, t):
            raise ShapeMismatch(f"{first} and {t} are not structurally equivalent")
    alphabets = list(alphabets) if alphabets is not None else None
    if alphabets is not None and len(alphabets) != len(ts):
        raise TreeError("need one alphabet per tree")

    def build(nodes):
        labels = tuple(n.label for n in nodes)
        if alphabets is not None:
            arities = {a.arity.get(l) for a, l in zip(alphabets, labels)}
            if len(arities) != 1 or None in arities:
                raise ArityMismatch(f"label tuple {labels} mixes arities")
        kids = tuple(build([n.children[i] for n in nodes]) for i in range(len(nodes[0].children)))
        return Tree(labels, kids)

    return build(ts)


def projection(t: Tree, i: int) -> Tree:
    return t.relabel(lambda lab: lab[i])


def term_of_tree(t: Tree) -> Term:
    """Constants for leaves, ``f<label>`` applied to the children otherwise."""
    if not t.children:
        return const(str(t.label))
    return App("f" + str(t.label), tuple(term_of_tree(c) for c in t.children))


EMPTY = "e"


def state_function(q) -> str:
    return "f" + str(q)


def term_of_state_tree(t: Tree) -> Term:
    """Translate a complete binary configuration tree: leaf q becomes f_q(e,e)."""
    n = len(t.children)
    if n == 0:
        return App(state_function(t.label), (const(EMPTY), const(EMPTY)))
    if n == 2:
        return App(state_function(t.label), tuple(term_of_state_tree(c) for c in t.children))
    raise IncompleteTree(f"node {t.label!r} has {n} children; configurations are complete binary trees")


def state_tree_of_term(term: Term) -> Tree:
    """Inverse of :func:`term_of_state_tree`."""
    if not isinstance(term, App) or not term.fn.startswith("f") or len(term.args) != 2:
        raise TreeError(f"{term} is not a configuration term")
    q = term.fn[1:]
    a, b = term.args
    if a == const(EMPTY) and b == const(EMPTY):
        return Tree(q)
    if const(EMPTY) in (a, b):
        raise IncompleteTree(f"{term} mixes e with a subtree")
    return Tree(q, (state_tree_of_term(a), state_tree_of_term(b)))


# -- textual notation -------------------------------------------------------

_TOKEN = re.compile(r"\s*(<[^<>]*>|[A-Za-z0-9_'.$-]+|[(),])")


def _tokens(text: str):
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TreeError(f"unexpected character at {pos} in {text!r}")
        yield m.group(1)
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1


def _label(tok: str):
    if tok.startswith("<"):
        parts = [p.strip() for p in tok[1:-1].split(",")]
        if len(parts) != 2 or not all(parts):
            raise TreeError(f"bad pair label {tok!r}")
        return tuple(parts)
    return tok


def parse_tree(text: str) -> Tree:
    toks = list(_tokens(text))
    pos = 0

    def node():
        nonlocal pos
        if pos >= len(toks) or toks[pos] in "(),":
            raise TreeError(f"expected a label in {text!r}")
        lab = _label(toks[pos])
        pos += 1
        kids = []
        if pos < len(toks) and toks[pos] == "(":
            pos += 1
            kids.append(node())
            while toks[pos] == ",":
                pos += 1
                kids.append(node())
            if toks[pos] != ")":
                raise TreeError(f"expected ')' in {text!r}")
            pos += 1
        return Tree(lab, tuple(kids))

    try:
        t = node()
    except IndexError:
        raise TreeError(f"truncated tree {text!r}") from None
    if pos != len(toks):
        raise TreeError(f"trailing input in {text!r}")
    return t


def format_tree(t: Tree) -> str:
    lab = t.label
    s = f"<{lab[0]},{lab[1]}>" if isinstance(lab, tuple) and len(lab) == 2 else str(lab)
    if t.children:
        s += "(" + ",".join(format_tree(c) for c in t.children) + ")"
    return s


def binary_shapes(max_nodes: int, arities=(0, 2)):
    """All shapes (trees labelled ``'*'``) with at most ``max_nodes`` nodes, by size."""
    by_size: dict[int, list] = {}
    for n in range(1, max_nodes + 1):
        shapes = []
        if n == 1 and 0 in arities:
            shapes.append(Tree("*"))
        for p in arities:
            if p == 0:
                continue
            for split in _compositions(n - 1, p):
                if any(s not in by_size or not by_size[s] for s in split):
                    continue
                for kids in itertools.product(*(by_size[s] for s in split)):
                    shapes.append(Tree("*", tuple(kids)))
        by_size[n] = shapes
    return by_size


def _compositions(total, parts):
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest

