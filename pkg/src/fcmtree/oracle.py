"""Bounded explicit-state forward reachability for both semantics.

This is the ground-truth engine: it never goes through the logical encoding,
so its answers can be compared against models found by the finder.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import lru_cache

from .automata import TreeAutomaton, accepted_trees, accepts
from .encode import PtsProblem, RtmcProblem
from .fol import Var
from .grounding import ResourceLimit
from .pts import embeds
from .sat import Cancelled
from .trees import EMPTY, Tree, format_tree, state_function, structurally_equivalent

DEFAULT_CAP = 2_000_000


def _key(t: Tree):
    return (t.size(), format_tree(t))


@dataclass
class ReachSet:
    """Visited trees with BFS predecessor links back to an initial tree."""
    bound: int
    initial: list = field(default_factory=list)
    parent: dict = field(default_factory=dict)  # tree -> predecessor (None for initial trees)
    order: list = field(default_factory=list)   # BFS discovery order

    def __contains__(self, t):
        return t in self.parent

    def __len__(self):
        return len(self.parent)

    def __iter__(self):
        return iter(self.order)

    @property
    def visited(self) -> frozenset:
        return frozenset(self.parent)

    def trace(self, t: Tree) -> list:
        out = [t]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        return out[::-1]


# -- RTMC ------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _by_input(d: TreeAutomaton) -> dict:
    index = defaultdict(list)
    for r in sorted(d.rules, key=str):
        index[(r.symbol[0], len(r.lhs))].append(r)
    return dict(index)


def successors_rtmc(d: TreeAutomaton, t: Tree) -> set:
    """All ``t'`` with ``(t, t')`` accepted by the transducer ``d``.

    Bottom-up over ``t``: each node gets a map from transducer state to the
    output subtrees that some run reaches it with.
    """
    index = _by_input(d)

    def outs(node: Tree) -> dict:
        kids = [outs(c) for c in node.children]
        res = defaultdict(set)
        for r in index.get((node.label, len(kids)), ()):
            pools = [k.get(q) for k, q in zip(kids, r.lhs)]
            if not all(pools):
                continue
            out_label = r.symbol[1]
            if not pools:
                res[r.rhs].add(Tree(out_label))
            elif len(pools) == 1:
                res[r.rhs].update(Tree(out_label, (a,)) for a in pools[0])
            else:
                res[r.rhs].update(Tree(out_label, (a, b)) for a in pools[0] for b in pools[1])
                if len(pools) > 2:
                    raise NotImplementedError("successors_rtmc supports arity at most 2")
        return res

    root = outs(t)
    return set().union(*(root.get(q, set()) for q in d.finals))


def initial_trees_rtmc(p: RtmcProblem, size_bound: int) -> list:
    trees = accepted_trees(p.init, size_bound, p.alphabet.arity)
    return sorted((t for t, qs in trees.items() if not qs.isdisjoint(p.init.finals)), key=_key)


def unsafe_rtmc(p: RtmcProblem, t: Tree) -> bool:
    return accepts(p.unsafe, t)


# -- PTS -------------------------------------------------------------------------

_E = Tree(EMPTY)


def term_tree(s: Tree) -> Tree:
    """Configuration tree to its term over ``e`` and ``f_q``, as a Tree."""
    if not s.children:
        return Tree(state_function(s.label), (_E, _E))
    if len(s.children) != 2:
        raise ValueError(f"configuration node {s.label!r} has {len(s.children)} children")
    return Tree(state_function(s.label), tuple(term_tree(c) for c in s.children))


def config_of_term_tree(t: Tree):
    """Inverse of :func:`term_tree`; None when ``t`` is not a configuration."""
    if t.label == EMPTY or len(t.children) != 2 or not str(t.label).startswith("f"):
        return None
    a, b = t.children
    q = str(t.label)[1:]
    if a == _E and b == _E:
        return Tree(q)
    if _E in (a, b):
        return None
    ka, kb = config_of_term_tree(a), config_of_term_tree(b)
    if ka is None or kb is None:
        return None
    return Tree(q, (ka, kb))


def _match(pat, t: Tree, env: dict) -> bool:
    if isinstance(pat, Var):
        bound = env.get(pat)
        if bound is None:
            env[pat] = t
            return True
        return bound == t
    if pat.fn != t.label or len(pat.args) != len(t.children):
        return False
    return all(_match(a, c, env) for a, c in zip(pat.args, t.children))


def _instantiate(term, env) -> Tree:
    if isinstance(term, Var):
        return env[term]
    return Tree(term.fn, tuple(_instantiate(a, env) for a in term.args))


def _rewrites(rules: dict, t: Tree):
    """All one-step rewrites of the term tree ``t`` at any position."""
    for r in rules.get(t.label, ()):
        env: dict = {}
        if _match(r.lhs, t, env):
            yield _instantiate(r.rhs, env)
    for i, c in enumerate(t.children):
        for c2 in _rewrites(rules, c):
            yield Tree(t.label, t.children[:i] + (c2,) + t.children[i + 1:])


def successors_pts(p: PtsProblem, s: Tree) -> set:
    rules = _term_rules(p.system)
    out = set()
    for t2 in _rewrites(rules, term_tree(s)):
        s2 = config_of_term_tree(t2)
        if s2 is None:
            raise AssertionError(f"rewriting left the configuration space: {t2}")
        out.add(s2)
    return out


@lru_cache(maxsize=64)
def _term_rules(system) -> dict:
    """Generalized rules indexed by the root symbol of their left-hand side."""
    index = defaultdict(list)
    for r in system.term_rules():
        index[r.lhs.fn].append(r)
    return dict(index)


def initial_trees_pts(p: PtsProblem, size_bound: int) -> list:
    trees = accepted_trees(p.init, 2 * size_bound + 1, p.fq_alphabet().arity)
    out = []
    for t, qs in trees.items():
        if qs.isdisjoint(p.init.finals):
            continue
        s = config_of_term_tree(t)
        if s is not None and s.size() <= size_bound:
            out.append(s)
    return sorted(out, key=_key)


def unsafe_pts(p: PtsProblem, s: Tree) -> bool:
    if p.unsafe is not None:
        return accepts(p.unsafe, term_tree(s))
    return any(embeds(g, s) for g in p.generators)


# -- generic BFS --------------------------------------------------------------

def _semantics(p):
    if isinstance(p, RtmcProblem):
        return (lambda t: successors_rtmc(p.transducer, t)), (lambda n: initial_trees_rtmc(p, n)), \
            (lambda t: unsafe_rtmc(p, t))
    if isinstance(p, PtsProblem):
        return (lambda s: successors_pts(p, s)), (lambda n: initial_trees_pts(p, n)), \
            (lambda s: unsafe_pts(p, s))
    raise TypeError(f"not a problem: {type(p).__name__}")


def _bfs(initial, step, bound, cap, stop=None, cancel=None) -> tuple:
    rs = ReachSet(bound)
    queue = deque()
    for t in initial:
        if t not in rs.parent:
            rs.initial.append(t)
            rs.parent[t] = None
            rs.order.append(t)
            queue.append(t)
    if len(rs.parent) > cap:
        raise ResourceLimit(f"{len(rs.parent)} initial trees exceed the cap of {cap}")
    root_of = {t: t for t in rs.initial}
    hit = None
    for t in rs.initial:
        if stop is not None and stop(t):
            return rs, t
    ticks = 0
    while queue:
        t = queue.popleft()
        ticks += 1
        if cancel is not None and ticks % 256 == 0 and cancel.is_set():
            raise Cancelled()
        for u in sorted(step(t), key=_key):
            if u in rs.parent:
                continue
            if not structurally_equivalent(u, root_of[t]):
                raise AssertionError(f"step changed the tree shape: {t} -> {u}")
            rs.parent[u] = t
            root_of[u] = root_of[t]
            rs.order.append(u)
            if len(rs.parent) > cap:
                raise ResourceLimit(f"visited set exceeds {cap} trees")
            if stop is not None and stop(u):
                return rs, u
            queue.append(u)
    return rs, hit


def reachable_rtmc(p: RtmcProblem, size_bound: int, cap: int = DEFAULT_CAP, cancel=None) -> ReachSet:
    if size_bound < 1:
        raise ValueError("size_bound must be at least 1")
    return _bfs(initial_trees_rtmc(p, size_bound), lambda t: successors_rtmc(p.transducer, t),
                size_bound, cap, cancel=cancel)[0]


def reachable_pts(p: PtsProblem, size_bound: int, cap: int = DEFAULT_CAP, cancel=None) -> ReachSet:
    if size_bound < 1:
        raise ValueError("size_bound must be at least 1")
    return _bfs(initial_trees_pts(p, size_bound), lambda s: successors_pts(p, s),
                size_bound, cap, cancel=cancel)[0]


def reachable(p, size_bound: int, cap: int = DEFAULT_CAP, cancel=None) -> ReachSet:
    if isinstance(p, RtmcProblem):
        return reachable_rtmc(p, size_bound, cap, cancel)
    return reachable_pts(p, size_bound, cap, cancel)


def reach_closure(p, t: Tree, cap: int = DEFAULT_CAP) -> set:
    """Every tree reachable from the single tree ``t`` (including ``t``)."""
    step = _semantics(p)[0]
    return set(_bfs([t], step, t.size(), cap)[0].parent)


def search(p, size_bound: int, cap: int = DEFAULT_CAP, cancel=None) -> tuple:
    """BFS that stops at the first unsafe tree: ``(ReachSet, trace or None)``.

    When no trace is returned the ReachSet is the full bounded closure.
    """
    if size_bound < 1:
        raise ValueError("size_bound must be at least 1")
    step, initial, unsafe = _semantics(p)
    rs, hit = _bfs(initial(size_bound), step, size_bound, cap, stop=unsafe, cancel=cancel)
    return rs, (None if hit is None else rs.trace(hit))


def find_unsafe_trace(p, size_bound: int, cap: int = DEFAULT_CAP, cancel=None):
    """Shortest trace from an initial tree to an unsafe one, or None.

    Ties are broken by the canonical order (size, then text) of initial trees
    and successors.
    """
    return search(p, size_bound, cap, cancel)[1]


def format_trace(trace) -> str:
    lines = []
    for i, t in enumerate(trace):
        tags = []
        if i == 0:
            tags.append("INIT")
        if i == len(trace) - 1:
            tags.append("UNSAFE")
        lines.append(f"{'+'.join(tags) or 'STEP':<11} {format_tree(t)}")
    return "\n".join(lines)
