"""LADR (Prover9/Mace4) text for theories, and a reader for that subset."""
from __future__ import annotations

import re

from .encode import KIND_ORDER
from .fol import App, Atom, Clause, Theory, Var


class LadrError(ValueError):
    pass


def _is_var_name(name: str) -> bool:
    return name[:1] in "uvwxyz"


def _check_names(th: Theory):
    for c in th.all_clauses():
        for v in c.vars():
            if not _is_var_name(v.name):
                raise LadrError(f"variable {v.name!r} would be read as a constant")
    for name in list(th.constants) + list(th.functions) + list(th.predicates):
        if _is_var_name(name):
            raise LadrError(f"symbol {name!r} would be read as a variable")


def format_clause(c: Clause) -> str:
    body = " & ".join(str(a) for a in c.body)
    if c.head is None:
        return f"-({body})."
    return f"{body} -> {c.head}." if body else f"{c.head}."


def emit_ladr(th: Theory, comments=()) -> str:
    """Mace4 input: assumptions grouped facts, rules, bridges, closure; then the goal."""
    _check_names(th)
    lines = [f"% {line}" for line in comments]
    lines.append("formulas(assumptions).")
    ordered = sorted(enumerate(th.clauses), key=lambda ic: (KIND_ORDER.get(ic[1].kind, 9), ic[0]))
    current = None
    for _, c in ordered:
        if c.kind != current:
            current = c.kind
            lines.append(f"% {current}")
        lines.append(format_clause(c))
    lines.append("end_of_list.")
    if th.goal is not None:
        vs = []
        for a in th.goal:
            for v in a.vars():
                if v not in vs:
                    vs.append(v)
        quant = " ".join(f"exists {v}" for v in vs)
        body = " & ".join(str(a) for a in th.goal)
        lines += ["", "formulas(goals).", f"{quant} ({body}).", "end_of_list."]
    return "\n".join(lines) + "\n"


# -- reader ----------------------------------------------------------------------

_TOK = re.compile(r"\s*(->|[A-Za-z_$][\w$']*|[(),&.-])")


def _tokenize(s: str) -> list:
    out, pos = [], 0
    s = s.strip()
    while pos < len(s):
        m = _TOK.match(s, pos)
        if not m:
            raise LadrError(f"cannot tokenize {s[pos:pos + 20]!r}")
        out.append(m.group(1))
        pos = m.end()
        while pos < len(s) and s[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, toks):
        self.toks, self.i = toks, 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expect=None):
        t = self.peek()
        if t is None or (expect is not None and t != expect):
            raise LadrError(f"expected {expect!r}, got {t!r}")
        self.i += 1
        return t

    def term(self):
        name = self.take()
        if self.peek() == "(":
            self.take("(")
            args = [self.term()]
            while self.peek() == ",":
                self.take(",")
                args.append(self.term())
            self.take(")")
            return App(name, tuple(args))
        return Var(name) if _is_var_name(name) else App(name, ())

    def atom(self):
        t = self.term()
        if isinstance(t, Var):
            raise LadrError(f"expected an atom, got variable {t}")
        return Atom(t.fn, t.args)

    def conj(self):
        if self.peek() == "(":
            # parenthesised conjunction or a parenthesised atom list
            save = self.i
            self.take("(")
            try:
                atoms = self.conj()
                self.take(")")
                if self.peek() == "&":
                    self.take("&")
                    atoms += self.conj()
                return atoms
            except LadrError:
                self.i = save
                raise
        atoms = [self.atom()]
        while self.peek() == "&":
            self.take("&")
            if self.peek() == "(":
                atoms += self.conj()
            else:
                atoms.append(self.atom())
        return atoms

    def clause(self):
        if self.peek() == "-":
            self.take("-")
            self.take("(")
            body = self.conj()
            self.take(")")
            self.take(".")
            return Clause(tuple(body), None, kind="goal")
        atoms = self.conj()
        if self.peek() == "->":
            self.take("->")
            head = self.atom()
            self.take(".")
            return Clause(tuple(atoms), head)
        self.take(".")
        if len(atoms) != 1:
            raise LadrError("a fact must be a single atom")
        return Clause((), atoms[0], kind="fact")

    def goal(self):
        names = []
        while self.peek() == "exists":
            self.take("exists")
            names.append(self.take())
        atoms = self.conj()
        self.take(".")
        return tuple(atoms)


def _statements(text: str, section: str) -> list:
    m = re.search(rf"formulas\({section}\)\.(.*?)end_of_list\.", text, re.S)
    if not m:
        return []
    body = "\n".join(line.split("%")[0] for line in m.group(1).splitlines())
    out, cur = [], []
    for tok in _tokenize(body):
        cur.append(tok)
        if tok == ".":
            out.append(cur)
            cur = []
    if cur:
        raise LadrError("unterminated statement")
    return out


def parse_clauses(text: str) -> list:
    """Parse bare clauses, one statement per ``.``, ignoring ``%`` comments."""
    body = "\n".join(line.split("%")[0] for line in text.splitlines())
    stmts, cur = [], []
    for tok in _tokenize(body):
        cur.append(tok)
        if tok == ".":
            stmts.append(cur)
            cur = []
    return [_Parser(s).clause() for s in stmts]


def _signature(clauses, goal):
    consts, funcs, preds = [], {}, {}

    def walk(t):
        if isinstance(t, Var):
            return
        if not t.args:
            if t.fn not in consts:
                consts.append(t.fn)
            return
        funcs[t.fn] = len(t.args)
        for a in t.args:
            walk(a)

    atoms = [a for c in clauses for a in c.atoms()] + list(goal or ())
    for a in atoms:
        preds[a.pred] = len(a.args)
        for t in a.args:
            walk(t)
    return tuple(consts), funcs, preds


def parse_ladr(text: str, constants=None) -> Theory:
    clauses = [_Parser(s).clause() for s in _statements(text, "assumptions")]
    goals = [_Parser(s).goal() for s in _statements(text, "goals")]
    if len(goals) > 1:
        raise LadrError("at most one goal is supported")
    goal = goals[0] if goals else None
    consts, funcs, preds = _signature(clauses, goal)
    if constants is not None:
        consts = tuple(constants)
    return Theory(consts, funcs, preds, clauses, goal)
