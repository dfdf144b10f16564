import pytest

from fcmtree.fol import (App, Atom, Clause, FiniteModel, FolError, SignatureMismatch, Theory, UnassignedVariable,
                         UndeclaredSymbol, Var, check_model, const, evaluate_term, format_model, goal_holds,
                         least_model, parse_model)

x, y = Var("x"), Var("y")


def refl_theory():
    return Theory((), {}, {"R": 2, "Unsafe": 1}, [Clause((), Atom("R", (x, x)))],
                  goal=(Atom("R", (x, y)), Atom("Unsafe", (y,))))


def test_evaluate_term_examples():
    m = FiniteModel(3, {"n": 0, "e": 0}, {"fT": {(a, b): 1 if (a, b) == (0, 0) else 2 for a in range(3) for b in range(3)}}, {})
    assert evaluate_term(m, App("fT", (const("n"), const("n")))) == 1
    assert evaluate_term(m, x, {x: 2}) == 2
    assert evaluate_term(m, x, {"x": 2}) == 2
    with pytest.raises(UnassignedVariable):
        evaluate_term(m, x, {})
    with pytest.raises(UndeclaredSymbol):
        evaluate_term(m, const("zz"))


def test_evaluate_nested():
    ft = {(a, b): 0 for a in range(3) for b in range(3)}
    ft[(0, 0)] = 1
    fn = {(a, b): 0 for a in range(3) for b in range(3)}
    fn[(1, 0)] = 2
    m = FiniteModel(3, {"e": 0}, {"ft": ft, "fn": fn}, {})
    e = const("e")
    assert evaluate_term(m, App("fn", (App("ft", (e, e)), e))) == 2


def test_check_model_examples():
    th = refl_theory()
    ok = FiniteModel(1, {}, {}, {"R": {(0, 0)}, "Unsafe": set()})
    assert check_model(ok, th).satisfied
    bad = FiniteModel(2, {}, {}, {"R": {(0, 0)}, "Unsafe": set()})
    report = check_model(bad, th)
    assert not report.satisfied
    assert any("1" in str(v) for v in report.violations)


def test_goal_is_part_of_the_check():
    th = refl_theory()
    m = FiniteModel(1, {}, {}, {"R": {(0, 0)}, "Unsafe": {(0,)}})
    assert goal_holds(m, th)
    assert not check_model(m, th).satisfied


def test_signature_mismatch():
    th = Theory(("c",), {}, {"P": 1}, [Clause((), Atom("P", (const("c"),)))])
    with pytest.raises(SignatureMismatch):
        check_model(FiniteModel(1, {}, {}, {"P": {(0,)}}), th)


def test_theory_validation():
    with pytest.raises(UndeclaredSymbol):
        Theory((), {}, {"P": 1}, [Clause((), Atom("P", (const("c"),)))])
    with pytest.raises(UndeclaredSymbol):
        Theory(("c",), {}, {"P": 2}, [Clause((), Atom("P", (const("c"),)))])
    with pytest.raises(FolError):
        Theory(("f",), {"f": 1}, {}, [])


def test_model_totality():
    with pytest.raises(FolError):
        FiniteModel(2, {}, {"f": {(0,): 0}}, {})
    with pytest.raises(FolError):
        FiniteModel(2, {"c": 2}, {}, {})


def test_least_model_is_the_fixpoint():
    c = const("c")
    th = Theory(("c",), {"s": 1}, {"P": 1},
                [Clause((), Atom("P", (c,))), Clause((Atom("P", (x,)),), Atom("P", (App("s", (x,)),)))])
    m = least_model(th, 3, {"c": 0}, {"s": {(0,): 1, (1,): 0, (2,): 2}})
    assert m.predicates["P"] == {(0,), (1,)}
    assert check_model(m, th).satisfied


def test_model_text_roundtrip():
    m = FiniteModel(2, {"c": 1}, {"f": {(0, 0): 1, (0, 1): 0, (1, 0): 0, (1, 1): 1}},
                    {"P": {(0,)}, "Q": set()})
    text = format_model(m)
    assert text.splitlines()[0] == "domain_size = 2"
    back = parse_model(text)
    assert back.size == 2 and back.constants == m.constants and back.functions == m.functions
    assert back.predicates["P"] == {(0,)} and not back.predicates.get("Q")


def test_corpus_theories_are_horn_with_one_denial(rtmc, pts):
    from fcmtree.encode import encode_pts, encode_rtmc
    for th in (encode_rtmc(rtmc), encode_pts(pts)):
        assert th.is_horn_with_single_denial()
        assert sum(1 for c in th.all_clauses() if c.head is None) == 1
