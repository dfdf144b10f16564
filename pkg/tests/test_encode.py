import itertools
from pathlib import Path

import pytest

from fcmtree.automata import automaton, determinize
from fcmtree.encode import (EncodeError, FailureReport, NotDeterministic, PtsProblem, RtmcProblem, encode_pts,
                            encode_rtmc, invariant_violations, model_from_invariant, upward_closure_clauses)
from fcmtree.fol import App, Atom, Clause, Var, check_model, const, evaluate_term, goal_holds, least_model
from fcmtree.ladr import LadrError, emit_ladr, format_clause, parse_clauses, parse_ladr
from fcmtree.problems import corpus_problem
from fcmtree.trees import parse_tree, term_of_tree

from support import canon, canonical, one_token_automaton

DATA = Path(__file__).parent / "data"
P = parse_tree


# -- RTMC ------------------------------------------------------------------------

def test_rtmc_examples(rtmc):
    th = encode_rtmc(rtmc)
    text = {format_clause(c) for c in th.clauses}
    assert "T(n,n,q0)." in text
    assert "T(n,t,q3)." in text
    assert "R(x,y) & R(y,z) -> R(x,z)." in text
    x1, x2 = Var("x1"), Var("x2")
    q0, q1 = const("q0"), const("q1")
    assert Clause((Atom("Init2", (x1, q0)), Atom("Init2", (x2, q0))),
                  Atom("Init2", (App("fT", (x1, x2)), q1))) in th.clauses


def test_rtmc_clause_count(rtmc):
    th = encode_rtmc(rtmc)
    a_i, a_u, d = rtmc.init, rtmc.unsafe, rtmc.transducer
    expected = sum(len(a.rules) + len(a.finals) for a in (a_i, a_u, d)) + 2
    assert len(th.clauses) == expected == 43


def test_empty_transducer_keeps_closure_clauses(rtmc):
    p = RtmcProblem(rtmc.alphabet, rtmc.init, rtmc.unsafe, automaton({"q"}, {"q"}, []))
    th = encode_rtmc(p)
    text = {format_clause(c) for c in th.clauses}
    assert {"R(x,x).", "R(x,y) & R(y,z) -> R(x,z)."} <= text
    # no T facts or rules, so the bridge to R can never fire
    assert not any(c.head.pred == "T" for c in th.clauses)


def test_tagged_state_constants(rtmc):
    p = RtmcProblem(rtmc.alphabet, rtmc.init, rtmc.unsafe, rtmc.transducer, share_state_constants=False)
    th = encode_rtmc(p)
    assert {"Iq0", "Uq0", "Dq0"} <= set(th.constants)
    assert "q0" not in th.constants


def test_rtmc_listing_conformance(rtmc):
    """The emitted theory against the printed listing.

    The listing names the predicates Init/Bad/Init1/Bad1 and omits R(x,x). Its
    Bad family disagrees with the transition table in four rules; the table is
    authoritative in the corpus.
    """
    ours = {canonical(c, {}) for c in encode_rtmc(rtmc).all_clauses()}
    rename = {"Init": "Init2", "Bad": "Unsafe2", "Bad1": "Unsafe1"}
    listing = {canonical(c, rename) for c in parse_clauses((DATA / "twoway_token_rtmc_listing.txt").read_text())}
    assert listing - ours == {canon("Unsafe2(x,q1) & Unsafe2(y,q0) -> Unsafe2(fN(x,y),q0)")}
    assert ours - listing == {
        canon("-(Init1(x) & R(x,y) & Unsafe1(y))"),
        canon("R(x,x)"),
        canon("Unsafe2(x,q1) & Unsafe2(y,q0) -> Unsafe2(fN(x,y),q1)"),
        canon("Unsafe2(x,q0) & Unsafe2(y,q2) -> Unsafe2(fT(x,y),q2)"),
        canon("Unsafe2(x,q2) & Unsafe2(y,q0) -> Unsafe2(fT(x,y),q2)"),
        canon("Unsafe2(x,q1) & Unsafe2(y,q1) -> Unsafe2(fT(x,y),q2)"),
    }


# -- PTS -------------------------------------------------------------------------

def test_pts_examples(pts):
    th = encode_pts(pts)
    text = {format_clause(c) for c in th.clauses}
    assert "R(ft(fn(x1,x2),x3),fn(ft(x1,x2),x3))." in text
    assert "R(ft(x1,fn(x2,x3)),fn(x1,ft(x2,x3)))." in text
    assert "R(x,y) & R(z,v) -> R(fn(x,z),fn(y,v))." in text
    assert "R(x,y) & R(z,v) -> R(ft(x,z),ft(y,v))." in text
    assert "R(x,x)." in text
    assert "B1(ft(x,y))." in text


def test_pts_listing_conformance(pts):
    """Equal to the printed listing modulo renaming, once the I_init -> Init bridge is folded."""
    th = encode_pts(pts)
    rename = {"I_i1": "I1", "I_init": "Init"}
    ours = {canonical(c, rename) for c in th.clauses}
    bridge = canon("Init(x) -> Init(x)")
    assert bridge in ours
    ours.discard(bridge)
    listing = {canonical(c, {}) for c in parse_clauses((DATA / "twoway_token_pts_listing.txt").read_text())}
    assert ours == listing


def test_pts_emit_notes_the_listing_difference(pts):
    text = emit_ladr(encode_pts(pts), pts.notes)
    assert "% listing difference" in text


def test_upward_closure_single_generator():
    clauses, preds = upward_closure_clauses([P("t")], ["n", "t"])
    text = {format_clause(c) for c in clauses}
    assert "Unsafe(ft(x,y))." in text
    assert "Unsafe(x) -> Unsafe(fn(y,x))." in text


def test_pts_problem_validation(pts):
    with pytest.raises(EncodeError):
        PtsProblem(pts.system, pts.init)
    with pytest.raises(EncodeError):
        PtsProblem(pts.system, automaton({"q"}, {"q"}, [("fx", ("q", "q"), "q"), ("e", (), "q")]),
                   generators=pts.generators)


# -- LADR ------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["twoway_token_rtmc", "twoway_token_pts", "token_rtmc", "percolate_pts"])
def test_ladr_roundtrip(name):
    p = corpus_problem(name)
    th = encode_rtmc(p) if name.endswith("rtmc") else encode_pts(p)
    back = parse_ladr(emit_ladr(th, ["comment"]), constants=th.constants)
    assert back == th


def test_ladr_rejects_bad_names():
    from fcmtree.fol import Theory
    th = Theory(("x0",), {}, {"P": 1}, [Clause((), Atom("P", (const("x0"),)))])
    with pytest.raises(LadrError):
        emit_ladr(th)


# -- adequacy and the invariant construction -------------------------------------------

def test_adequacy_of_init_and_unsafe_on_least_models(rtmc):
    """In every least model over random function tables, Init1 holds exactly on A_I trees up to
    collisions: it holds on every accepted tree."""
    import random
    from conftest import all_trees
    from fcmtree.automata import accepts
    th = encode_rtmc(rtmc)
    rng = random.Random(0)
    for k in (2, 3, 4):
        consts = {c: rng.randrange(k) for c in th.constants}
        funcs = {f: {a: rng.randrange(k) for a in itertools.product(range(k), repeat=2)} for f in th.functions}
        m = least_model(th, k, consts, funcs)
        for t in all_trees(5):
            val = evaluate_term(m, term_of_tree(t))
            if accepts(rtmc.init, t):
                assert (val,) in m.predicates["Init1"]
            if accepts(rtmc.unsafe, t):
                assert (val,) in m.predicates["Unsafe1"]


def test_one_token_invariant_is_inductive(rtmc):
    inv = one_token_automaton(rtmc.alphabet)
    assert inv.is_deterministic() and inv.is_complete()
    assert invariant_violations(rtmc, inv) == []


def test_model_from_one_token_invariant(rtmc):
    m = model_from_invariant(rtmc, one_token_automaton(rtmc.alphabet))
    th = encode_rtmc(rtmc)
    assert not isinstance(m, FailureReport)
    assert check_model(m, th).satisfied
    assert not goal_holds(m, th)
    # 3 invariant states, 4 shared state constants, and the extra element
    assert m.size == 8


def test_model_from_unsafe_set_fails(rtmc):
    inv = determinize(rtmc.unsafe, rtmc.alphabet)
    report = model_from_invariant(rtmc, inv)
    assert isinstance(report, FailureReport) and "intersects_unsafe" in report.reasons


def test_model_from_universal_automaton_fails(rtmc):
    universal = automaton({"u"}, {"u"}, [(f, ("u",) * p, "u") for f, p in rtmc.alphabet.arity.items()],
                          rtmc.alphabet)
    report = model_from_invariant(rtmc, universal)
    assert not report and "intersects_unsafe" in report.reasons


def test_model_from_invariant_needs_determinism(rtmc):
    with pytest.raises(NotDeterministic):
        model_from_invariant(rtmc, rtmc.unsafe.with_rules(automaton({"q0", "q1"}, set(), [("n", (), "q1")]).rules))


def test_init_set_is_not_an_invariant(rtmc):
    # the token-at-root trees are initial, but so is every one-token tree, so A_I is itself inductive
    inv = determinize(rtmc.init, rtmc.alphabet)
    assert invariant_violations(rtmc, inv) == []
