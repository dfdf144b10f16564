import itertools
import random

import pytest

from fcmtree.encode import encode_pts, encode_rtmc
from fcmtree.fol import App, Atom, Clause, FiniteModel, Theory, Var, check_model, const, least_model
from fcmtree.grounding import CST, FN, ResourceLimit, flatten, ground
from fcmtree.problems import corpus_problem
from fcmtree.sat import solve

x, y = Var("x"), Var("y")

# regression constant: computed by this implementation and frozen
PTS_TOKEN_CLAUSES_K4 = 73870


def test_reflexivity_at_two():
    th = Theory((), {}, {"R": 2}, [Clause((), Atom("R", (x, x)))])
    gp = ground(th, 2)
    assert gp.counts["theory"] == 2
    assert sorted(gp.clauses) == [[gp.var("R", (0, 0))], [gp.var("R", (1, 1))]]


def test_singleton_domain_forces_cells():
    c = const("c")
    th = Theory(("c",), {"f": 1}, {"P": 1}, [Clause((), Atom("P", (App("f", (c,)),)))])
    gp = ground(th, 1)
    assert [gp.var(CST + "c", (0,))] in gp.clauses
    assert [gp.var(FN + "f", (0, 0))] in gp.clauses
    res, model = solve(gp.num_vars, gp.clauses)
    m = gp.decode(model)
    assert m.constants == {"c": 0} and m.functions == {"f": {(0,): 0}}


def test_pts_clause_count_regression(pts):
    assert len(ground(encode_pts(pts), 4).clauses) == PTS_TOKEN_CLAUSES_K4


def test_flatten_introduces_graph_literals():
    lits, vs = flatten(Clause((Atom("P", (App("f", (x,)),)),), Atom("Q", (App("f", (x,)), const("c")))))
    rels = [rel for _, rel, _ in lits]
    # the shared subterm f(x) is flattened once
    assert rels.count(FN + "f") == 1
    assert ("const", "c") in lits[-1][2]


def test_cap_raises():
    with pytest.raises(ResourceLimit):
        ground(encode_rtmc(corpus_problem("twoway_token_rtmc")), 4, cap=1000)


def test_least_number_symmetry_breaking():
    th = Theory(("a", "b", "c"), {}, {"P": 1}, [Clause((), Atom("P", (const("a"),)))])
    gp = ground(th, 3)
    # count all solutions over the constant cells
    cells = [gp.var(CST + c, (d,)) for c in "abc" for d in range(3)]
    seen = set()
    for vals in itertools.product(range(3), repeat=3):
        assign = [False] * (gp.num_vars + 1)
        for c, d in zip("abc", vals):
            assign[gp.var(CST + c, (d,))] = True
        for v in range(1, gp.num_vars + 1):
            if v not in cells:
                assign[v] = True  # P everywhere
        if gp.satisfied_by(assign):
            seen.add(vals)
    # a = 0; b <= 1; c <= max(a, b) + 1: restricted growth strings of length 3
    assert seen == {(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1), (0, 1, 2)}


def _random_model(th, k, rng, least=True):
    consts = {c: 0 for c in th.constants}
    consts.update({c: rng.randrange(k) for c in th.constants})
    funcs = {f: {args: rng.randrange(k) for args in itertools.product(range(k), repeat=p)}
             for f, p in th.functions.items()}
    if least:
        return least_model(th, k, consts, funcs)
    preds = {p: {args for args in itertools.product(range(k), repeat=a) if rng.random() < 0.5}
             for p, a in th.predicates.items()}
    return FiniteModel(k, consts, funcs, preds)


@pytest.mark.parametrize("name", ["twoway_token_rtmc", "twoway_token_pts", "token_rtmc", "percolate_pts"])
def test_grounding_agrees_with_model_checking(name):
    p = corpus_problem(name)
    th = encode_rtmc(p) if name.endswith("rtmc") else encode_pts(p)
    rng = random.Random(3)
    agreements = {True: 0, False: 0}
    for k in (1, 2, 3):
        gp = ground(th, k, symmetry=False)
        for i in range(12):
            m = _random_model(th, k, rng, least=i % 3 != 0)
            expected = check_model(m, th, limit=1).satisfied
            assert gp.satisfied_by(gp.assignment_from_model(m)) == expected
            agreements[expected] += 1
    assert agreements[False] > 0
