"""Helpers shared by the unit tests and the acceptance suite."""
import itertools
import random

from fcmtree.automata import Rule, TreeAutomaton, automaton
from fcmtree.encode import PtsProblem, RtmcProblem
from fcmtree.fol import App, Atom, Clause, FiniteModel, Theory, Var, const
from fcmtree.ladr import parse_clauses
from fcmtree.pts import RewriteSystem
from fcmtree.trees import Tree

x, y = Var("x"), Var("y")


# -- clause sets modulo renaming ------------------------------------------------

def canonical(clause: Clause, rename: dict) -> str:
    """Clause text with predicates renamed and variables numbered by first occurrence,
    minimised over body orderings."""
    best = None
    for body in itertools.permutations(clause.body):
        names: dict = {}

        def term(t):
            if isinstance(t, Var):
                return names.setdefault(t, f"v{len(names)}")
            if not t.args:
                return t.fn
            return f"{t.fn}({','.join(term(a) for a in t.args)})"

        def atom(a):
            return f"{rename.get(a.pred, a.pred)}({','.join(term(t) for t in a.args)})"

        text = " & ".join(atom(a) for a in body) + " -> " + (atom(clause.head) if clause.head else "$F")
        best = text if best is None or text < best else best
    return best


def canon(text: str) -> str:
    return canonical(parse_clauses(text + ".")[0], {})


def one_token_automaton(alphabet):
    """Hand-built: states count tokens, saturating at 'many'; accepts exactly one token."""
    count = {"zero": 0, "one": 1, "many": 2}
    name = {0: "zero", 1: "one", 2: "many"}
    rules = [("n", (), "zero"), ("t", (), "one")]
    for sym, own in (("N", 0), ("T", 1)):
        for a, b in itertools.product(count, repeat=2):
            rules.append((sym, (a, b), name[min(2, own + count[a] + count[b])]))
    return automaton(set(count), {"one"}, rules, alphabet)


# -- brute-force model enumeration ------------------------------------------------------

def all_models(th: Theory, k: int):
    dom = range(k)
    fcells = [(f, args) for f, p in th.functions.items() for args in itertools.product(dom, repeat=p)]
    pcells = [(p, args) for p, a in th.predicates.items() for args in itertools.product(dom, repeat=a)]
    for cvals in itertools.product(dom, repeat=len(th.constants)):
        for fvals in itertools.product(dom, repeat=len(fcells)):
            funcs = {f: {} for f in th.functions}
            for (f, args), v in zip(fcells, fvals):
                funcs[f][args] = v
            for bits in itertools.product([False, True], repeat=len(pcells)):
                preds = {p: set() for p in th.predicates}
                for (p, args), b in zip(pcells, bits):
                    if b:
                        preds[p].add(args)
                yield FiniteModel(k, dict(zip(th.constants, cvals)), funcs, preds)


def random_theory(rng: random.Random) -> Theory:
    """Two function symbols (constant c, unary f), predicates P/1 and R/2."""
    c = const("c")
    f = lambda t: App("f", (t,))
    terms = [x, y, c, f(x), f(c)]

    def atom():
        if rng.random() < 0.5:
            return Atom("P", (rng.choice(terms),))
        return Atom("R", (rng.choice(terms), rng.choice(terms)))

    clauses = [Clause(tuple(atom() for _ in range(rng.randint(0, 2))), atom()) for _ in range(rng.randint(1, 4))]
    goal = tuple(atom() for _ in range(rng.randint(1, 2)))
    return Theory(("c",), {"f": 1}, {"P": 1, "R": 2}, clauses, goal)


# -- single-rule mutants ------------------------------------------------------------

def rtmc_mutants(p: RtmcProblem):
    """Every transducer obtained by changing one field of one rule."""
    d = p.transducer
    rules = sorted(d.rules, key=str)
    states = sorted(d.states)
    arity = p.alphabet.arity
    for r in rules:
        rest = d.rules - {r}
        f, g = r.symbol
        variants = [Rule((f, g2), r.lhs, r.rhs) for g2 in sorted(arity) if arity[g2] == arity[g] and g2 != g]
        variants += [Rule(r.symbol, r.lhs, q) for q in states if q != r.rhs]
        for i, q_old in enumerate(r.lhs):
            variants += [Rule(r.symbol, r.lhs[:i] + (q,) + r.lhs[i + 1:], r.rhs) for q in states if q != q_old]
        for v in variants:
            if v in rest:
                continue
            td = TreeAutomaton(d.states, d.finals, rest | {v}, d.alphabet)
            yield f"{r} => {v}", RtmcProblem(p.alphabet, p.init, p.unsafe, td, p.share_state_constants)


def pts_mutants(p: PtsProblem):
    """Every system obtained by changing one state of one rule node."""
    states = sorted(p.system.states)
    for i, r in enumerate(p.system.rules):
        for pos in r.positions():
            lab = r.at(pos).label
            for side in (0, 1):
                for q in states:
                    if q == lab[side]:
                        continue
                    new = tuple(q if j == side else lab[j] for j in (0, 1))
                    r2 = _relabel_at(r, pos, new)
                    rules = p.system.rules[:i] + (r2,) + p.system.rules[i + 1:]
                    yield f"{r} => {r2}", PtsProblem(RewriteSystem(p.system.states, rules), p.init, p.unsafe,
                                                     p.generators)


def _relabel_at(t: Tree, pos, label) -> Tree:
    if not pos:
        return Tree(label, t.children)
    i = pos[0]
    kids = t.children[:i] + (_relabel_at(t.children[i], pos[1:], label),) + t.children[i + 1:]
    return Tree(t.label, kids)
