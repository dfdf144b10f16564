"""Flat first-order clause language, finite models and model checking.

Clauses are Horn-shaped ``body -> head`` implications, universally closed;
a clause without head is the denial of the safety goal.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping


class FolError(ValueError):
    pass


class UnassignedVariable(FolError):
    pass


class UndeclaredSymbol(FolError):
    pass


class SignatureMismatch(FolError):
    pass


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple = ()
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        object.__setattr__(self, "_hash", hash((self.fn, self.args)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        if not self.args:
            return self.fn
        return f"{self.fn}({','.join(str(a) for a in self.args)})"


Term = Var | App


def const(name: str) -> App:
    return App(name, ())


def term_vars(t: Term) -> list:
    """Variables of ``t`` in left-to-right order of first occurrence."""
    out: list = []

    def walk(u):
        if isinstance(u, Var):
            if u not in out:
                out.append(u)
        else:
            for a in u.args:
                walk(a)

    walk(t)
    return out


def substitute(t: Term, sigma: Mapping) -> Term:
    if isinstance(t, Var):
        return sigma.get(t, t)
    if not t.args:
        return t
    return App(t.fn, tuple(substitute(a, sigma) for a in t.args))


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    def __str__(self):
        return f"{self.pred}({','.join(str(a) for a in self.args)})"

    def vars(self) -> list:
        out: list = []
        for a in self.args:
            for v in term_vars(a):
                if v not in out:
                    out.append(v)
        return out


@dataclass(frozen=True)
class Clause:
    body: tuple
    head: Atom | None
    # emission group: fact, rule, bridge, closure, goal; not part of identity
    kind: str = field(default="rule", compare=False)

    def __post_init__(self):
        if not isinstance(self.body, tuple):
            object.__setattr__(self, "body", tuple(self.body))

    def atoms(self):
        yield from self.body
        if self.head is not None:
            yield self.head

    def vars(self) -> list:
        out: list = []
        for at in self.atoms():
            for v in at.vars():
                if v not in out:
                    out.append(v)
        return out

    @property
    def is_fact(self):
        return not self.body and self.head is not None

    def __str__(self):
        body = " & ".join(str(a) for a in self.body)
        if self.head is None:
            return f"-({body})"
        return f"{body} -> {self.head}" if body else str(self.head)


@dataclass(frozen=True)
class Theory:
    constants: tuple  # declaration order, used for symmetry breaking
    functions: dict   # name -> arity >= 1
    predicates: dict  # name -> arity
    clauses: tuple
    goal: tuple | None = None  # existential conjunction of atoms

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        if self.goal is not None:
            object.__setattr__(self, "goal", tuple(self.goal))
        self.validate()

    def __hash__(self):
        return hash((self.constants, frozenset(self.clauses), self.goal))

    def __eq__(self, other):
        if not isinstance(other, Theory):
            return NotImplemented
        return (set(self.constants) == set(other.constants)
                and self.functions == other.functions
                and self.predicates == other.predicates
                and set(self.clauses) == set(other.clauses)
                and (set(self.goal or ()) == set(other.goal or ())))

    def validate(self):
        consts = set(self.constants)
        clash = consts & set(self.functions)
        if clash:
            raise FolError(f"symbols declared both constant and function: {sorted(clash)}")

        def check_term(t):
            if isinstance(t, Var):
                return
            if not t.args:
                if t.fn not in consts:
                    raise UndeclaredSymbol(f"constant {t.fn!r} not declared")
                return
            if self.functions.get(t.fn) != len(t.args):
                raise UndeclaredSymbol(f"function {t.fn}/{len(t.args)} not declared")
            for a in t.args:
                check_term(a)

        atoms = [a for c in self.clauses for a in c.atoms()] + list(self.goal or ())
        for at in atoms:
            if self.predicates.get(at.pred) != len(at.args):
                raise UndeclaredSymbol(f"predicate {at.pred}/{len(at.args)} not declared")
            for t in at.args:
                check_term(t)

    @property
    def denial(self) -> Clause | None:
        if self.goal is None:
            return None
        return Clause(self.goal, None, kind="goal")

    def all_clauses(self) -> tuple:
        """Clauses plus the goal denial, i.e. the set a countermodel must satisfy."""
        d = self.denial
        return self.clauses + ((d,) if d is not None else ())

    def is_horn_with_single_denial(self) -> bool:
        return (all(c.head is not None for c in self.clauses)
                and sum(1 for c in self.all_clauses() if c.head is None) <= 1)


@dataclass
class FiniteModel:
    size: int
    constants: dict   # name -> element
    functions: dict   # name -> {args tuple: element}
    predicates: dict  # name -> set of tuples

    def __post_init__(self):
        if self.size < 1:
            raise FolError("domain size must be at least 1")
        dom = range(self.size)
        for c, v in self.constants.items():
            if v not in dom:
                raise FolError(f"constant {c} = {v} outside domain")
        for f, table in self.functions.items():
            arity = len(next(iter(table))) if table else 0
            if len(table) != self.size ** arity or any(v not in dom for v in table.values()):
                raise FolError(f"function table of {f} is not total over the domain")
        self.predicates = {p: set(map(tuple, rows)) for p, rows in self.predicates.items()}

    def copy(self) -> "FiniteModel":
        return FiniteModel(self.size, dict(self.constants),
                           {f: dict(t) for f, t in self.functions.items()},
                           {p: set(r) for p, r in self.predicates.items()})

    def to_text(self) -> str:
        return format_model(self)


def evaluate_term(m: FiniteModel, t: Term, assignment: Mapping | None = None) -> int:
    if isinstance(t, Var):
        assignment = assignment or {}
        if t in assignment:
            return assignment[t]
        if t.name in assignment:
            return assignment[t.name]
        raise UnassignedVariable(f"variable {t.name} has no value")
    if not t.args:
        try:
            return m.constants[t.fn]
        except KeyError:
            raise UndeclaredSymbol(f"constant {t.fn!r} not interpreted") from None
    table = m.functions.get(t.fn)
    if table is None:
        raise UndeclaredSymbol(f"function {t.fn!r} not interpreted")
    return table[tuple(evaluate_term(m, a, assignment) for a in t.args)]


def _eval(m, t, b):
    # fast path of evaluate_term keyed by Var objects
    if isinstance(t, Var):
        return b[t]
    if not t.args:
        return m.constants[t.fn]
    return m.functions[t.fn][tuple(_eval(m, a, b) for a in t.args)]


def _ground_under(t, b) -> bool:
    if isinstance(t, Var):
        return t in b
    return all(_ground_under(a, b) for a in t.args)


def match_body(m: FiniteModel, atoms, binding: dict | None = None, tables=None) -> Iterator[dict]:
    """Enumerate variable bindings under which all ``atoms`` hold in ``m``.

    Joins against predicate tables; variables occurring only under function
    symbols are enumerated over the domain.
    """
    tables = m.predicates if tables is None else tables
    binding = dict(binding or {})
    yield from _solve(m, list(atoms), binding, tables)


def _solve(m, atoms, b, tables):
    if not atoms:
        yield dict(b)
        return
    pick = None
    for i, at in enumerate(atoms):
        if all(isinstance(a, Var) or _ground_under(a, b) for a in at.args):
            pick = i
            break
    if pick is None:
        v = next(v for at in atoms for a in at.args if isinstance(a, App)
                 for v in term_vars(a) if v not in b)
        for d in range(m.size):
            b[v] = d
            yield from _solve(m, atoms, b, tables)
        del b[v]
        return
    at = atoms[pick]
    rest = atoms[:pick] + atoms[pick + 1:]
    rows = tables.get(at.pred, ())
    fixed = []
    free = []
    for i, a in enumerate(at.args):
        if isinstance(a, Var) and a not in b:
            free.append((i, a))
        else:
            fixed.append((i, _eval(m, a, b)))
    if not free:
        if tuple(v for _, v in fixed) in rows:
            yield from _solve(m, rest, b, tables)
        return
    for row in list(rows):
        if any(row[i] != v for i, v in fixed):
            continue
        newly = []
        ok = True
        for i, v in free:
            if v in b:
                if b[v] != row[i]:
                    ok = False
                    break
            else:
                b[v] = row[i]
                newly.append(v)
        if ok:
            yield from _solve(m, rest, b, tables)
        for v in newly:
            del b[v]


def _head_instances(m, clause, b):
    free = [v for v in clause.head.vars() if v not in b]
    if not free:
        yield b
        return
    for vals in itertools.product(range(m.size), repeat=len(free)):
        yield {**b, **dict(zip(free, vals))}


@dataclass
class ModelReport:
    satisfied: bool
    violations: list  # (clause, assignment {var name: element})

    def __bool__(self):
        return self.satisfied


def _check_signature(m: FiniteModel, th: Theory):
    missing = [c for c in th.constants if c not in m.constants]
    missing += [f for f in th.functions if f not in m.functions]
    if missing:
        raise SignatureMismatch(f"model does not interpret {missing}")
    for f, p in th.functions.items():
        table = m.functions[f]
        if table and len(next(iter(table))) != p:
            raise SignatureMismatch(f"function {f} has arity {p} in the theory")
    for p, rows in m.predicates.items():
        if p in th.predicates and any(len(r) != th.predicates[p] for r in rows):
            raise SignatureMismatch(f"predicate {p} has arity {th.predicates[p]} in the theory")


def clause_violations(m: FiniteModel, clause: Clause, limit=None) -> list:
    out = []
    for b in match_body(m, clause.body):
        if clause.head is None:
            full = {v: b.get(v, 0) for v in clause.vars()}
            out.append({v.name: d for v, d in full.items()})
        else:
            rows = m.predicates.get(clause.head.pred, ())
            for hb in _head_instances(m, clause, b):
                if tuple(_eval(m, a, hb) for a in clause.head.args) not in rows:
                    out.append({v.name: hb[v] for v in clause.vars() if v in hb})
                    if limit and len(out) >= limit:
                        return out
        if limit and len(out) >= limit:
            return out
    return out


def check_model(m: FiniteModel, th: Theory, limit: int | None = 100) -> ModelReport:
    """Evaluate every clause (and the goal denial) of ``th`` in ``m``."""
    _check_signature(m, th)
    violations = []
    for c in th.all_clauses():
        for a in clause_violations(m, c, limit=limit):
            violations.append((c, a))
            if limit and len(violations) >= limit:
                return ModelReport(False, violations)
    return ModelReport(not violations, violations)


def goal_holds(m: FiniteModel, th: Theory) -> bool:
    if th.goal is None:
        return False
    return next(match_body(m, th.goal), None) is not None


def least_model(th: Theory, size: int, constants: dict, functions: dict) -> FiniteModel:
    """Interpret predicates as the least fixpoint of the Horn clauses of ``th``."""
    preds = {p: set() for p in th.predicates}
    m = FiniteModel(size, dict(constants), functions, preds)
    rules = [c for c in th.clauses if c.head is not None]
    changed = True
    while changed:
        changed = False
        for c in rules:
            new = set()
            target = m.predicates[c.head.pred]
            for b in match_body(m, c.body):
                for hb in _head_instances(m, c, b):
                    row = tuple(_eval(m, a, hb) for a in c.head.args)
                    if row not in target:
                        new.add(row)
            if new:
                target |= new
                changed = True
    return m


# -- stable text format -------------------------------------------------------

def format_model(m: FiniteModel) -> str:
    lines = [f"domain_size = {m.size}"]
    for c in sorted(m.constants):
        lines.append(f"{c} = {m.constants[c]}")
    for f in sorted(m.functions):
        for args in sorted(m.functions[f]):
            lines.append(f"{f}({','.join(map(str, args))}) = {m.functions[f][args]}")
    for p in sorted(m.predicates):
        rows = m.predicates[p]
        arity = len(next(iter(rows))) if rows else None
        if arity is None:
            lines.append(f"{p} = {{}}")
            continue
        for args in itertools.product(range(m.size), repeat=arity):
            lines.append(f"{p}({','.join(map(str, args))}) = {'T' if args in rows else 'F'}")
    return "\n".join(lines) + "\n"


_LINE = re.compile(r"^\s*([A-Za-z_][\w$']*)\s*(?:\(([^)]*)\))?\s*=\s*(\S+)\s*$")


def parse_model(text: str) -> FiniteModel:
    size = None
    consts, funcs, preds = {}, {}, {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%")[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise FolError(f"line {n}: cannot parse {raw!r}")
        name, args, val = m.groups()
        if name == "domain_size":
            size = int(val)
            continue
        if args is None:
            if val == "{}":
                preds.setdefault(name, set())
            else:
                consts[name] = int(val)
            continue
        tup = tuple(int(x) for x in args.split(",")) if args.strip() else ()
        if val in ("T", "F"):
            rows = preds.setdefault(name, set())
            if val == "T":
                rows.add(tup)
        else:
            funcs.setdefault(name, {})[tup] = int(val)
    if size is None:
        raise FolError("missing domain_size line")
    return FiniteModel(size, consts, funcs, preds)
