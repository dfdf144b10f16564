"""MACE-style grounding of a theory at a fixed domain size.

Each clause is flattened: nested terms become fresh variables constrained by
function-graph literals ``F_f(args, w)``.  Literals with constant arguments
are redirected to projection atoms ``P@c(rest)`` defined once per pattern,
so a constant occurrence does not multiply the clause count by the domain
size.  Every function and constant gets exactly-one constraints per cell,
and the declared constants are ordered by the least-number heuristic.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .fol import Clause, FiniteModel, Theory, Var
from .sat import Cancelled


class ResourceLimit(Exception):
    pass


FN = "F:"    # function graph relation prefix
CST = "C:"   # constant value relation prefix


@dataclass
class GroundProblem:
    size: int
    theory: Theory
    var_of: dict = field(default_factory=dict)  # (relation, tuple) -> int
    clauses: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    projections: dict = field(default_factory=dict)  # name -> (relation, pattern)

    @property
    def num_vars(self) -> int:
        return len(self.var_of)

    def var(self, rel, args) -> int:
        key = (rel, args)
        v = self.var_of.get(key)
        if v is None:
            v = len(self.var_of) + 1
            self.var_of[key] = v
        return v

    def decode(self, model: list) -> FiniteModel:
        k = self.size
        th = self.theory
        consts = {}
        for c in th.constants:
            consts[c] = next(d for d in range(k) if model[self.var_of[(CST + c, (d,))]])
        funcs = {}
        for f, p in th.functions.items():
            table = {}
            for args in itertools.product(range(k), repeat=p):
                table[args] = next(d for d in range(k) if model[self.var_of[(FN + f, args + (d,))]])
            funcs[f] = table
        preds = {p: set() for p in th.predicates}
        for (rel, args), v in self.var_of.items():
            if rel in preds and model[v]:
                preds[rel].add(args)
        return FiniteModel(k, consts, funcs, preds)

    def assignment_from_model(self, m: FiniteModel) -> list:
        """Truth values of all ground atoms as read off ``m`` (index 0 unused)."""
        out = [False] * (self.num_vars + 1)
        for (rel, args), v in self.var_of.items():
            out[v] = self._holds(m, rel, args)
        return out

    def _holds(self, m, rel, args):
        if rel in self.projections:
            base, pattern = self.projections[rel]
            full = _expand(pattern, args, {c: m.constants[c] for _, c in pattern})
            return self._holds(m, base, full)
        if rel.startswith(CST):
            return m.constants[rel[len(CST):]] == args[0]
        if rel.startswith(FN):
            return m.functions[rel[len(FN):]][args[:-1]] == args[-1]
        return args in m.predicates.get(rel, ())

    def satisfied_by(self, assignment: list) -> bool:
        return all(any((lit > 0) == assignment[abs(lit)] for lit in c) for c in self.clauses)


def _expand(pattern, rest, values):
    """Rebuild a full argument tuple from a projection's remaining arguments."""
    fixed = dict(pattern)
    out, it = [], iter(rest)
    n = len(rest) + len(pattern)
    for i in range(n):
        out.append(values[fixed[i]] if i in fixed else next(it))
    return tuple(out)


def flatten(clause: Clause):
    """Return ``(literals, variables)`` with literals ``(positive, relation, args)``.

    ``args`` entries are Var objects or ``('const', name)`` markers.
    """
    lits = []
    memo = {}
    fresh = itertools.count()
    vars_: list = list(clause.vars())

    def arg(t):
        if isinstance(t, Var):
            return t
        if not t.args:
            return ("const", t.fn)
        if t in memo:
            return memo[t]
        sub = tuple(arg(a) for a in t.args)
        w = Var(f"_w{next(fresh)}")
        vars_.append(w)
        memo[t] = w
        lits.append((False, FN + t.fn, sub + (w,)))
        return w

    for at in clause.body:
        lits.append((False, at.pred, tuple(arg(a) for a in at.args)))
    if clause.head is not None:
        lits.append((True, clause.head.pred, tuple(arg(a) for a in clause.head.args)))
    return lits, vars_


def ground(th: Theory, k: int, cap: int = 3_000_000, symmetry: bool = True, cancel=None) -> GroundProblem:
    if k < 1:
        raise ValueError("domain size must be at least 1")
    gp = GroundProblem(k, th)
    dom = range(k)
    clauses = gp.clauses
    projections = gp.projections

    def check_cap():
        if cancel is not None and cancel.is_set():
            raise Cancelled()
        if len(clauses) > cap:
            raise ResourceLimit(f"grounding at size {k} exceeds {cap} clauses")

    # exactly-one for every constant and function cell
    for c in th.constants:
        cells = [gp.var(CST + c, (d,)) for d in dom]
        clauses.append(cells)
        clauses.extend([-a, -b] for a, b in itertools.combinations(cells, 2))
    for f, p in th.functions.items():
        for args in itertools.product(dom, repeat=p):
            cells = [gp.var(FN + f, args + (d,)) for d in dom]
            clauses.append(cells)
            clauses.extend([-a, -b] for a, b in itertools.combinations(cells, 2))
        check_cap()
    gp.counts["cells"] = len(clauses)

    if symmetry:
        _least_number(gp, th.constants)
    gp.counts["symmetry"] = len(clauses) - gp.counts["cells"]

    def relation_of(rel, args):
        pattern = tuple((i, a[1]) for i, a in enumerate(args) if isinstance(a, tuple))
        if not pattern:
            return rel, args
        name = f"{rel}@" + ",".join(f"{i}={c}" for i, c in pattern)
        rest = tuple(a for a in args if not isinstance(a, tuple))
        if name not in projections:
            projections[name] = (rel, pattern)
            _define_projection(gp, name, rel, pattern, len(args))
        return name, rest

    start = len(clauses)
    for clause in th.all_clauses():
        lits, vs = flatten(clause)
        lits = [(pos,) + relation_of(rel, args) for pos, rel, args in lits]
        # only variables that still occur after projection are enumerated
        used = []
        for _, _, args in lits:
            for a in args:
                if a not in used:
                    used.append(a)
        slots = [[used.index(a) for a in args] for _, _, args in lits]
        for vals in itertools.product(dom, repeat=len(used)):
            out = []
            taut = False
            for (pos, rel, _), sl in zip(lits, slots):
                v = gp.var(rel, tuple(vals[i] for i in sl))
                lit = v if pos else -v
                if -lit in out:
                    taut = True
                    break
                if lit not in out:
                    out.append(lit)
            if not taut:
                clauses.append(out)
        check_cap()
    gp.counts["theory"] = len(clauses) - start
    gp.counts["total"] = len(clauses)
    return gp


def _define_projection(gp, name, rel, pattern, arity):
    k = gp.size
    consts = sorted({c for _, c in pattern})
    rest_n = arity - len(pattern)
    for cvals in itertools.product(range(k), repeat=len(consts)):
        values = dict(zip(consts, cvals))
        guards = [-gp.var(CST + c, (values[c],)) for c in consts]
        for rest in itertools.product(range(k), repeat=rest_n):
            full = _expand(pattern, rest, values)
            a, b = gp.var(name, rest), gp.var(rel, full)
            gp.clauses.append(guards + [-a, b])
            gp.clauses.append(guards + [a, -b])


def _least_number(gp, constants):
    """Constant i takes a value at most one above the maximum of constants before it."""
    k = gp.size
    for i, c in enumerate(constants):
        for d in range(1, k):
            if i == 0:
                gp.clauses.append([-gp.var(CST + c, (d,))])
                continue
            support = [gp.var(CST + prev, (u,)) for prev in constants[:i] for u in range(d - 1, k)]
            gp.clauses.append([-gp.var(CST + c, (d,))] + support)
