"""Finite model search by iterative deepening over the domain size."""
from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field

from .fol import FiniteModel, Theory, check_model
from .grounding import ResourceLimit, ground
from .sat import Cancelled, Solver

log = logging.getLogger(__name__)


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class FinderConfig:
    k_min: int = 1
    k_max: int = 8
    time_budget: float = 120.0
    ground_cap: int = 3_000_000
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.k_min <= self.k_max:
            raise ValueError(f"need 1 <= k_min <= k_max, got {self.k_min}, {self.k_max}")


@dataclass
class Model:
    model: FiniteModel
    k: int
    stats: dict


@dataclass
class ExhaustedSizes:
    k_max: int
    stats: dict


@dataclass
class Timeout:
    elapsed: float
    stats: dict


@dataclass
class ResourceLimitReached:
    k: int
    message: str
    stats: dict


FinderOutcome = Model | ExhaustedSizes | Timeout | ResourceLimitReached


def find_model(th: Theory, cfg: FinderConfig = FinderConfig(), cancel=None) -> FinderOutcome:
    """Smallest model of the clauses of ``th`` that falsifies its goal, if any up to ``k_max``.

    ``cancel`` is an optional ``threading.Event``; when set the search stops
    and :class:`~fcmtree.sat.Cancelled` propagates.
    """
    if not th.is_horn_with_single_denial():
        raise InputError("finder expects Horn clauses plus a single goal denial")
    start = time.monotonic()
    deadline = start + cfg.time_budget
    stats = {"sizes": []}
    for k in range(cfg.k_min, cfg.k_max + 1):
        if cancel is not None and cancel.is_set():
            raise Cancelled()
        if time.monotonic() > deadline:
            stats["elapsed"] = time.monotonic() - start
            return Timeout(stats["elapsed"], stats)
        try:
            gp = ground(th, k, cap=cfg.ground_cap, cancel=cancel)
        except ResourceLimit as exc:
            stats["elapsed"] = time.monotonic() - start
            return ResourceLimitReached(k, str(exc), stats)
        solver = Solver(gp.num_vars, gp.clauses, seed=cfg.seed)
        res = solver.solve(deadline=deadline, cancel=cancel)
        entry = {"k": k, "ground_clauses": len(gp.clauses), "vars": gp.num_vars,
                 "conflicts": solver.conflicts, "result": {True: "sat", False: "unsat", None: "timeout"}[res]}
        stats["sizes"].append(entry)
        log.info("size %d: %s (%d clauses, %d conflicts)", k, entry["result"], len(gp.clauses), solver.conflicts)
        if res is None:
            stats["elapsed"] = time.monotonic() - start
            return Timeout(stats["elapsed"], stats)
        if res:
            m = gp.decode(solver.model())
            report = check_model(m, th)
            if not report.satisfied:
                raise AssertionError(f"finder produced a non-model at size {k}: {report.violations[:3]}")
            stats["elapsed"] = time.monotonic() - start
            stats["ground_clauses"] = len(gp.clauses)
            return Model(m, k, stats)
    stats["elapsed"] = time.monotonic() - start
    return ExhaustedSizes(cfg.k_max, stats)


# -- verification --------------------------------------------------------------

class InternalSoundnessFault(RuntimeError):
    """Both a model and a counterexample were found: an implementation bug."""


@dataclass
class Safe:
    model: FiniteModel
    k: int
    stats: dict = field(default_factory=dict)
    name = "Safe"


@dataclass
class Unsafe:
    trace: list
    stats: dict = field(default_factory=dict)
    name = "Unsafe"


@dataclass
class Unknown:
    reason: str
    stats: dict = field(default_factory=dict)
    name = "Unknown"


Verdict = Safe | Unsafe | Unknown


def encode(problem) -> Theory:
    from .encode import PtsProblem, RtmcProblem, encode_pts, encode_rtmc
    if isinstance(problem, RtmcProblem):
        return encode_rtmc(problem)
    if isinstance(problem, PtsProblem):
        return encode_pts(problem)
    raise InputError(f"not a problem: {type(problem).__name__}")


def verify(problem, cfg: FinderConfig = FinderConfig(), oracle_bound: int = 7) -> Verdict:
    """Run the model finder and the oracle's bounded search side by side.

    The first conclusive worker cancels the other.  A model means Safe, an
    oracle trace means Unsafe; neither means Unknown.
    """
    from . import oracle

    th = encode(problem)
    cancel = threading.Event()
    results: dict = {}
    errors: dict = {}

    def finder_worker():
        try:
            out = find_model(th, cfg, cancel)
            results["finder"] = out
            if isinstance(out, Model):
                cancel.set()
        except Cancelled:
            pass
        except BaseException as exc:  # surfaced in the caller's thread
            errors["finder"] = exc

    def oracle_worker():
        t0 = time.monotonic()
        try:
            trace = oracle.find_unsafe_trace(problem, oracle_bound, cancel=cancel)
            results["oracle"] = (trace, time.monotonic() - t0)
            if trace is not None:
                cancel.set()
        except Cancelled:
            pass
        except ResourceLimit as exc:
            results["oracle"] = (None, time.monotonic() - t0)
            results["oracle_limit"] = str(exc)
        except BaseException as exc:
            errors["oracle"] = exc

    start = time.monotonic()
    workers = [threading.Thread(target=finder_worker, daemon=True),
               threading.Thread(target=oracle_worker, daemon=True)]
    for w in workers:
        w.start()
    for w in workers:
        w.join()
    for exc in errors.values():
        raise exc

    found = results.get("finder")
    trace = results.get("oracle", (None, 0.0))[0]
    stats = {"elapsed": time.monotonic() - start, "oracle_bound": oracle_bound,
             "oracle_completed": "oracle" in results and trace is None and "oracle_limit" not in results}
    if isinstance(found, (Model, ExhaustedSizes, Timeout, ResourceLimitReached)):
        stats["finder"] = found.stats
    if isinstance(found, Model) and trace is not None:
        raise InternalSoundnessFault(f"model at size {found.k} but an unsafe trace of length {len(trace)}")
    if isinstance(found, Model):
        stats["k"] = found.k
        stats["ground_clauses"] = found.stats.get("ground_clauses")
        return Safe(found.model, found.k, stats)
    if trace is not None:
        return Unsafe(trace, stats)
    reason = type(found).__name__ if found is not None else "cancelled"
    return Unknown(reason, stats)
