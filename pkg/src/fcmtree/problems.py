"""JSON problem files.

RTMC files::

    {"kind": "rtmc", "alphabet": {"t": 0, "T": 2, ...},
     "init": <automaton>, "unsafe": <automaton>, "transducer": <automaton>,
     "options": {"share_state_constants": true}}

PTS files::

    {"kind": "pts", "states": ["n", "t"], "rules": [<rule>, ...],
     "init": <automaton over e and f_q>,
     "unsafe": {"generators": ["t(t)", ...]} | <automaton>}

Automata follow ``{"states", "finals", "rules": [{"symbol", "lhs", "rhs"}]}``;
transducer symbols are two-element lists.
"""
from __future__ import annotations

import json
from pathlib import Path

from .automata import AutomatonError, automaton_from_json, automaton_to_json
from .encode import EncodeError, PtsProblem, RtmcProblem
from .pts import PtsError, RewriteSystem, rule_from_json, rule_to_json, state_tree_from_json
from .trees import RankedAlphabet, TreeError, format_tree, state_function


class ProblemError(ValueError):
    """Schema or consistency violation, with a path into the file."""


CORPUS_DIR = Path(__file__).parent / "corpus"


def _need(obj, key, path):
    if not isinstance(obj, dict) or key not in obj:
        raise ProblemError(f"{path}: missing required field {key!r}")
    return obj[key]


def problem_from_json(obj: dict, source: str = "<problem>"):
    kind = _need(obj, "kind", source)
    try:
        if kind == "rtmc":
            return _rtmc(obj, source)
        if kind == "pts":
            return _pts(obj, source)
    except (AutomatonError, EncodeError, PtsError, TreeError) as exc:
        raise ProblemError(f"{source}: {exc}") from None
    raise ProblemError(f"{source}.kind: expected 'rtmc' or 'pts', got {kind!r}")


def _rtmc(obj, src):
    raw = _need(obj, "alphabet", src)
    if not isinstance(raw, dict):
        raise ProblemError(f"{src}.alphabet: expected an object symbol -> arity")
    alphabet = RankedAlphabet(dict(raw))
    pairs = alphabet.pair_alphabet()
    opts = obj.get("options", {})
    return RtmcProblem(
        alphabet=alphabet,
        init=automaton_from_json(_need(obj, "init", src), alphabet, f"{src}.init"),
        unsafe=automaton_from_json(_need(obj, "unsafe", src), alphabet, f"{src}.unsafe"),
        transducer=automaton_from_json(_need(obj, "transducer", src), pairs, f"{src}.transducer"),
        share_state_constants=bool(opts.get("share_state_constants", True)),
        name=obj.get("name", ""),
        notes=tuple(obj.get("notes", ())),
    )


def _normalize_fq(a_json, states, path):
    """Accept either ``fq`` or the bare state name ``q`` as automaton symbol."""
    out = dict(a_json)
    rules = []
    for i, r in enumerate(_need(a_json, "rules", path)):
        r = dict(r)
        sym = _need(r, "symbol", f"{path}.rules[{i}]")
        if sym != "e" and sym in states and len(r.get("lhs", [])) == 2:
            r["symbol"] = state_function(sym)
        rules.append(r)
    out["rules"] = rules
    return out


def _pts(obj, src):
    states = _need(obj, "states", src)
    rules = [rule_from_json(r, f"{src}.rules[{i}]") for i, r in enumerate(_need(obj, "rules", src))]
    system = RewriteSystem(frozenset(states), tuple(rules))
    init = automaton_from_json(_normalize_fq(_need(obj, "init", src), states, f"{src}.init"),
                               path=f"{src}.init")
    unsafe_obj = _need(obj, "unsafe", src)
    unsafe, gens = None, ()
    if isinstance(unsafe_obj, dict) and "generators" in unsafe_obj:
        gens = tuple(state_tree_from_json(g, f"{src}.unsafe.generators[{i}]")
                     for i, g in enumerate(unsafe_obj["generators"]))
    else:
        unsafe = automaton_from_json(_normalize_fq(unsafe_obj, states, f"{src}.unsafe"), path=f"{src}.unsafe")
    return PtsProblem(system, init, unsafe, gens, name=obj.get("name", ""), notes=tuple(obj.get("notes", ())))


def problem_to_json(p) -> dict:
    if isinstance(p, RtmcProblem):
        return {
            "kind": "rtmc", "name": p.name, "notes": list(p.notes),
            "alphabet": {str(k): v for k, v in p.alphabet.arity.items()},
            "options": {"share_state_constants": p.share_state_constants},
            "init": automaton_to_json(p.init), "unsafe": automaton_to_json(p.unsafe),
            "transducer": automaton_to_json(p.transducer),
        }
    out = {
        "kind": "pts", "name": p.name, "notes": list(p.notes),
        "states": sorted(p.system.states), "rules": [rule_to_json(r) for r in p.system.rules],
        "init": automaton_to_json(p.init),
    }
    if p.unsafe is not None:
        out["unsafe"] = automaton_to_json(p.unsafe)
    else:
        out["unsafe"] = {"generators": [format_tree(g) for g in p.generators]}
    return out


def load_problem(path) -> object:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{path}: invalid JSON ({exc})") from None
    return problem_from_json(obj, str(path.name))


def corpus_problem(name: str):
    return load_problem(CORPUS_DIR / f"{name}.json")
