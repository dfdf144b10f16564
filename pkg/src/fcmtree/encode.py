"""First-order encodings of tree verification problems.

``encode_rtmc`` translates a regular tree model checking problem (initial and
unsafe automata plus a transducer) into a Horn theory over predicates
``Init2/Init1``, ``Unsafe2/Unsafe1``, ``T`` and ``R``.  ``encode_pts`` does the
same for a parameterized tree system given by rewrite rules; its unsafe set is
either an automaton or the upward closure of generator trees.

In both theories the goal is ``exists x y. Init(x) & R(x,y) & Unsafe(y)``; a
finite model of the clauses that falsifies the goal certifies safety.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .automata import (Rule, TreeAutomaton, check_transducer, determinize, intersection,
                       language_empty, rename_states)
from .fol import (App, Atom, Clause, Theory, Var, check_model, const,
                  goal_holds, least_model)
from .pts import RewriteSystem
from .trees import EMPTY, RankedAlphabet, Tree, state_function


class EncodeError(ValueError):
    pass


class NotDeterministic(EncodeError):
    pass


KIND_ORDER = {"fact": 0, "rule": 1, "bridge": 2, "closure": 3}


@dataclass(frozen=True)
class RtmcProblem:
    alphabet: RankedAlphabet
    init: TreeAutomaton
    unsafe: TreeAutomaton
    transducer: TreeAutomaton
    share_state_constants: bool = True
    name: str = ""
    notes: tuple = ()

    def __post_init__(self):
        check_transducer(self.transducer)
        for label, a in (("init", self.init), ("unsafe", self.unsafe)):
            for r in a.rules:
                if self.alphabet.arity.get(r.symbol) != len(r.lhs):
                    raise EncodeError(f"{label} rule {r} does not match the alphabet")
        for r in self.transducer.rules:
            f, g = r.symbol
            if not (self.alphabet.arity.get(f) == self.alphabet.arity.get(g) == len(r.lhs)):
                raise EncodeError(f"transducer rule {r} does not match the pair alphabet")


@dataclass(frozen=True)
class PtsProblem:
    system: RewriteSystem
    init: TreeAutomaton  # over e and the binary symbols f_q
    unsafe: TreeAutomaton | None = None
    generators: tuple = ()
    name: str = ""
    notes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if self.unsafe is None and not self.generators:
            raise EncodeError("a PTS problem needs an unsafe automaton or unsafe generators")
        if self.unsafe is not None and self.generators:
            raise EncodeError("give either an unsafe automaton or unsafe generators, not both")
        for a in [self.init] + ([self.unsafe] if self.unsafe is not None else []):
            for r in a.rules:
                if r.symbol == EMPTY and not r.lhs:
                    continue
                if not (isinstance(r.symbol, str) and r.symbol.startswith("f")
                        and r.symbol[1:] in self.system.states and len(r.lhs) == 2):
                    raise EncodeError(f"automaton rule {r} is not over e and f_q (q in Q)")
        for g in self.generators:
            if any(len(n.children) > 2 for n in g.iter_nodes()):
                raise EncodeError(f"generator {g} is not binary")
            if not {n.label for n in g.iter_nodes()} <= self.system.states:
                raise EncodeError(f"generator {g} uses states outside Q")

    def fq_alphabet(self) -> RankedAlphabet:
        arity = {state_function(q): 2 for q in self.system.states}
        arity[EMPTY] = 0
        return RankedAlphabet(arity)


# -- RTMC ------------------------------------------------------------------------

def _rtmc_names(p: RtmcProblem):
    sigma0 = [str(s) for s in sorted(p.alphabet.of_arity(0), key=str)]
    machines = (("I", p.init), ("U", p.unsafe), ("D", p.transducer))
    if p.share_state_constants:
        names = {(tag, q): str(q) for tag, a in machines for q in a.states}
    else:
        names = {(tag, q): f"{tag}{q}" for tag, a in machines for q in a.states}
    clash = set(names.values()) & set(sigma0)
    if clash:
        raise EncodeError(f"state constants clash with leaf symbols: {sorted(clash)}")
    order = []
    for tag, a in machines:
        for q in sorted(a.states, key=str):
            if names[(tag, q)] not in order:
                order.append(names[(tag, q)])
    return sigma0, names, order


def _sym_term(sym, args):
    return const(str(sym)) if not args else App("f" + str(sym), tuple(args))


def _automaton_clauses(a: TreeAutomaton, pred2: str, pred1: str, tag: str, names: dict) -> list:
    out = []
    for r in sorted(a.rules, key=lambda r: (len(r.lhs), str(r))):
        q = const(names[(tag, r.rhs)])
        if not r.lhs:
            out.append(Clause((), Atom(pred2, (const(str(r.symbol)), q)), kind="fact"))
            continue
        xs = [Var(f"x{i}") for i in range(1, len(r.lhs) + 1)]
        body = tuple(Atom(pred2, (x, const(names[(tag, qi)]))) for x, qi in zip(xs, r.lhs))
        out.append(Clause(body, Atom(pred2, (_sym_term(r.symbol, xs), q)), kind="rule"))
    x = Var("x")
    for q in sorted(a.finals, key=str):
        out.append(Clause((Atom(pred2, (x, const(names[(tag, q)]))),), Atom(pred1, (x,)), kind="bridge"))
    return out


def encode_rtmc(p: RtmcProblem) -> Theory:
    sigma0, names, state_consts = _rtmc_names(p)
    clauses = []
    clauses += _automaton_clauses(p.init, "Init2", "Init1", "I", names)
    clauses += _automaton_clauses(p.unsafe, "Unsafe2", "Unsafe1", "U", names)

    for r in sorted(p.transducer.rules, key=lambda r: (len(r.lhs), str(r))):
        f, g = r.symbol
        q = const(names[("D", r.rhs)])
        if not r.lhs:
            clauses.append(Clause((), Atom("T", (const(str(f)), const(str(g)), q)), kind="fact"))
            continue
        n = len(r.lhs)
        xs = [Var(f"x{i}") for i in range(1, n + 1)]
        ys = [Var(f"y{i}") for i in range(1, n + 1)]
        body = tuple(Atom("T", (x, y, const(names[("D", qi)]))) for x, y, qi in zip(xs, ys, r.lhs))
        clauses.append(Clause(body, Atom("T", (_sym_term(f, xs), _sym_term(g, ys), q)), kind="rule"))
    x, y, z = Var("x"), Var("y"), Var("z")
    for q in sorted(p.transducer.finals, key=str):
        clauses.append(Clause((Atom("T", (x, y, const(names[("D", q)]))),), Atom("R", (x, y)), kind="bridge"))
    clauses.append(Clause((), Atom("R", (x, x)), kind="closure"))
    clauses.append(Clause((Atom("R", (x, y)), Atom("R", (y, z))), Atom("R", (x, z)), kind="closure"))

    functions = {"f" + str(s): ar for s, ar in sorted(p.alphabet.arity.items(), key=lambda kv: str(kv[0])) if ar > 0}
    predicates = {"Init2": 2, "Init1": 1, "Unsafe2": 2, "Unsafe1": 1, "T": 3, "R": 2}
    goal = (Atom("Init1", (x,)), Atom("R", (x, y)), Atom("Unsafe1", (y,)))
    return Theory(tuple(sigma0 + state_consts), functions, predicates, clauses, goal)


# -- PTS -------------------------------------------------------------------------

def _pts_automaton_clauses(a: TreeAutomaton, prefix: str, top: str) -> tuple:
    e_states = {r.rhs for r in a.rules if r.symbol == EMPTY}
    for r in a.rules:
        if r.symbol != EMPTY and r.rhs in e_states:
            raise EncodeError(f"state {r.rhs!r} is reached both by e and by {r.symbol}; "
                              "states for e must be used only at leaves")
    pred = {q: f"{prefix}_{q}" for q in sorted(a.states - e_states, key=str)}
    x, y, e = Var("x"), Var("y"), const(EMPTY)
    facts, rules, bridges = [], [], []
    for r in sorted(a.rules, key=str):
        if r.symbol == EMPTY:
            continue
        in_e = [q in e_states for q in r.lhs]
        if all(in_e):
            facts.append(Clause((), Atom(pred[r.rhs], (App(r.symbol, (e, e)),)), kind="fact"))
        elif not any(in_e):
            body = (Atom(pred[r.lhs[0]], (x,)), Atom(pred[r.lhs[1]], (y,)))
            rules.append(Clause(body, Atom(pred[r.rhs], (App(r.symbol, (x, y)),)), kind="rule"))
        # rules mixing e with a subtree never fire on configurations
    for q in sorted(a.finals - e_states, key=str):
        bridges.append(Clause((Atom(pred[q], (x,)),), Atom(top, (x,)), kind="bridge"))
    facts = list(dict.fromkeys(facts))
    return facts + rules + bridges, {pred[q]: 1 for q in pred}


def upward_closure_clauses(generators, states, top: str = "Unsafe") -> tuple:
    """Clauses defining ``top`` as the set of terms into which some generator embeds.

    Each proper sub-pattern s gets a predicate holding of every term that
    contains an embedding of s; generator roots use ``top`` directly.  A
    one-child node's child may sit in either argument slot.
    """
    funcs = [state_function(q) for q in sorted(states, key=str)]
    preds: dict = {}
    clauses: list = []
    x, y = Var("x"), Var("y")
    facts_for: dict = {}

    def emit_pattern(s: Tree, head: str):
        f = state_function(s.label)
        kids = s.children
        if not kids:
            clauses.append(Clause((), Atom(head, (App(f, (x, y)),)), kind="fact"))
            facts_for.setdefault(head, set()).add(f)
        elif len(kids) == 1:
            p = pred_of(kids[0])
            clauses.append(Clause((Atom(p, (x,)),), Atom(head, (App(f, (x, y)),)), kind="rule"))
            clauses.append(Clause((Atom(p, (x,)),), Atom(head, (App(f, (y, x)),)), kind="rule"))
        else:
            p0, p1 = pred_of(kids[0]), pred_of(kids[1])
            clauses.append(Clause((Atom(p0, (x,)), Atom(p1, (y,))), Atom(head, (App(f, (x, y)),)), kind="rule"))

    def pred_of(s: Tree) -> str:
        if s not in preds:
            preds[s] = f"B{len(preds) + 1}"
            emit_pattern(s, preds[s])
        return preds[s]

    for g in generators:
        emit_pattern(g, top)

    for head in [top] + list(preds.values()):
        for f in funcs:
            if f in facts_for.get(head, ()):
                continue  # head(f(x,y)) already holds unconditionally
            clauses.append(Clause((Atom(head, (x,)),), Atom(head, (App(f, (x, y)),)), kind="closure"))
            clauses.append(Clause((Atom(head, (x,)),), Atom(head, (App(f, (y, x)),)), kind="closure"))
    clauses = list(dict.fromkeys(clauses))
    return clauses, {p: 1 for p in preds.values()}


def encode_pts(p: PtsProblem) -> Theory:
    states = sorted(p.system.states, key=str)
    x, y, z, v = Var("x"), Var("y"), Var("z"), Var("v")
    clauses = []
    for tr in p.system.term_rules():
        clauses.append(Clause((), Atom("R", (tr.lhs, tr.rhs)), kind="fact"))
    clauses.append(Clause((), Atom("R", (x, x)), kind="fact"))
    for q in states:
        f = state_function(q)
        clauses.append(Clause((Atom("R", (x, y)), Atom("R", (z, v))),
                              Atom("R", (App(f, (x, z)), App(f, (y, v)))), kind="closure"))
    clauses.append(Clause((Atom("R", (x, y)), Atom("R", (y, z))), Atom("R", (x, z)), kind="closure"))

    predicates = {"R": 2, "Init": 1, "Unsafe": 1}
    init_clauses, init_preds = _pts_automaton_clauses(p.init, "I", "Init")
    clauses += init_clauses
    predicates.update(init_preds)
    if p.unsafe is not None:
        un_clauses, un_preds = _pts_automaton_clauses(p.unsafe, "U", "Unsafe")
    else:
        un_clauses, un_preds = upward_closure_clauses(p.generators, p.system.states)
    clauses += un_clauses
    predicates.update(un_preds)

    functions = {state_function(q): 2 for q in states}
    goal = (Atom("Init", (x,)), Atom("R", (x, y)), Atom("Unsafe", (y,)))
    return Theory((EMPTY,), functions, predicates, clauses, goal)


# -- model from an invariant ---------------------------------------------------------

@dataclass
class FailureReport:
    reasons: list
    details: list = field(default_factory=list)

    def __bool__(self):
        return False

    def __str__(self):
        return "; ".join(self.reasons)


def _closure_violation(inv: TreeAutomaton, d: TreeAutomaton) -> TreeAutomaton:
    """Automaton over pairs accepting (s, t) with s in L(inv), (s, t) in R_D, t not in L(inv).

    ``inv`` must be deterministic and complete.
    """
    rules = set()
    for rd in d.rules:
        f, g = rd.symbol
        p = len(rd.lhs)
        for ra in inv.rules_for(f, p):
            for rb in inv.rules_for(g, p):
                lhs = tuple(zip(ra.lhs, rd.lhs, rb.lhs))
                rules.add(Rule(rd.symbol, lhs, (ra.rhs, rd.rhs, rb.rhs)))
    states = set(itertools.product(inv.states, d.states, inv.states))
    finals = {(a, q, b) for a, q, b in states if a in inv.finals and q in d.finals and b not in inv.finals}
    return TreeAutomaton(frozenset(states), frozenset(finals), frozenset(rules))


def invariant_violations(p: RtmcProblem, inv: TreeAutomaton) -> list:
    """Names of the invariant conditions ``inv`` fails (empty list if it is a safe invariant)."""
    reasons = []
    if not language_empty(intersection(inv, p.unsafe)):
        reasons.append("intersects_unsafe")
    flipped = TreeAutomaton(inv.states, inv.states - inv.finals, inv.rules, inv.alphabet)
    if not language_empty(intersection(p.init, flipped)):
        reasons.append("initial_not_included")
    if not language_empty(_closure_violation(inv, p.transducer)):
        reasons.append("not_closed_under_transitions")
    return reasons


def model_from_invariant(p: RtmcProblem, inv: TreeAutomaton):
    """Build the finite countermodel induced by a regular inductive invariant.

    Terms are interpreted by the run of the deterministic automaton ``inv``;
    every other cell maps to an extra element ``e``; predicates are least
    fixpoints of their clause families.  Returns a :class:`FiniteModel`, or a
    :class:`FailureReport` when ``inv`` is not a safe invariant.
    """
    if not inv.is_deterministic():
        raise NotDeterministic("invariant automaton must be deterministic; determinize it first")
    if not inv.is_complete() or inv.alphabet != p.alphabet:
        inv = rename_states(determinize(inv, p.alphabet))
    reasons = invariant_violations(p, inv)
    if reasons:
        return FailureReport(reasons)

    th = encode_rtmc(p)
    inv_states = sorted(inv.states, key=str)
    elem = {("Q", q): i for i, q in enumerate(inv_states)}
    sigma0 = set(map(str, p.alphabet.of_arity(0)))
    next_el = len(inv_states)
    constants = {}
    for c in th.constants:
        if c in sigma0:
            continue
        constants[c] = next_el
        next_el += 1
    e_el = next_el
    size = e_el + 1
    for a in p.alphabet.of_arity(0):
        (r,) = inv.rules_for(a, 0)
        constants[str(a)] = elem[("Q", r.rhs)]
    functions = {}
    for sym, ar in p.alphabet.arity.items():
        if ar == 0:
            continue
        table = {}
        for args in itertools.product(range(size), repeat=ar):
            table[args] = e_el
        for r in inv.rules_for(sym, ar):
            table[tuple(elem[("Q", q)] for q in r.lhs)] = elem[("Q", r.rhs)]
        functions["f" + str(sym)] = table
    m = least_model(th, size, constants, functions)
    if goal_holds(m, th):
        return FailureReport(["goal_not_falsified"])
    report = check_model(m, th)
    if not report.satisfied:
        return FailureReport(["model_check_failed"], report.violations)
    return m
