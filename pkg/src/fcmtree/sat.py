"""A small conflict-driven clause-learning SAT solver.

Literals are DIMACS-style non-zero ints.  Two watched literals, first-UIP
learning, VSIDS with a lazy heap, phase saving and Luby restarts.
"""
from __future__ import annotations

import heapq
import random
import time


class Cancelled(Exception):
    pass


def _luby(i: int) -> int:
    k = 1
    while (1 << k) - 1 < i + 1:
        k += 1
    while True:
        if i + 1 == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i + 1:
            k += 1


class Solver:
    def __init__(self, nvars: int, clauses, seed: int = 0):
        self.n = nvars
        size = 2 * nvars + 2
        # internal literal: 2*v for positive, 2*v+1 for negative
        self.val = [0] * size          # 1 true, -1 false, 0 unassigned (per literal)
        self.level = [0] * (nvars + 1)
        self.reason = [None] * (nvars + 1)
        self.watches = [[] for _ in range(size)]
        self.clauses: list = []
        self.trail: list = []
        self.trail_lim: list = []
        self.qhead = 0
        self.activity = [0.0] * (nvars + 1)
        self.var_inc = 1.0
        self.phase = [False] * (nvars + 1)
        self.ok = True
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        rng = random.Random(seed)
        for v in range(1, nvars + 1):
            self.activity[v] = rng.random() * 1e-3
        self.heap = [(-self.activity[v], v) for v in range(1, nvars + 1)]
        heapq.heapify(self.heap)
        self._units = []
        for c in clauses:
            self.add_clause(c)

    @staticmethod
    def _lit(x: int) -> int:
        return 2 * x if x > 0 else -2 * x + 1

    def add_clause(self, lits):
        if not self.ok:
            return
        seen = set()
        out = []
        for x in lits:
            lit = self._lit(x)
            if lit ^ 1 in seen:
                return  # tautology
            if lit not in seen:
                seen.add(lit)
                out.append(lit)
        if not out:
            self.ok = False
            return
        if len(out) == 1:
            self._units.append(out[0])
            return
        idx = len(self.clauses)
        self.clauses.append(out)
        self.watches[out[0] ^ 1].append(idx)
        self.watches[out[1] ^ 1].append(idx)

    def _assign(self, lit, reason):
        v = lit >> 1
        self.val[lit] = 1
        self.val[lit ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self):
        """Return the index of a conflicting clause, or None."""
        val = self.val
        watches = self.watches
        clauses = self.clauses
        trail = self.trail
        while self.qhead < len(trail):
            lit = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            # clauses watching the literal that just became false
            ws = watches[lit]
            i = j = 0
            n = len(ws)
            false_lit = lit ^ 1
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1], c[k] = lk, false_lit
                        watches[lk ^ 1].append(ci)
                        found = True
                        break
                if found:
                    continue
                ws[j] = ci
                j += 1
                if val[first] == -1:
                    while i < n:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    return ci
                self._assign(first, ci)
            del ws[j:]
        return None

    def _bump(self, v):
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.n + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.n + 1) if self.val[2 * u] == 0]
            heapq.heapify(self.heap)
        elif self.val[2 * v] == 0:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, confl):
        seen = [False] * (self.n + 1) if not hasattr(self, "_seen") else self._seen
        self._seen = seen
        learnt = [0]
        counter = 0
        lit = None
        idx = len(self.trail) - 1
        cur_level = len(self.trail_lim)
        touched = []
        c = self.clauses[confl]
        while True:
            for q in (c if lit is None else c[1:]):
                v = q >> 1
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    touched.append(v)
                    self._bump(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[idx] >> 1]:
                idx -= 1
            lit = self.trail[idx]
            idx -= 1
            v = lit >> 1
            counter -= 1
            if counter == 0:
                break
            c = self.clauses[self.reason[v]]
            if c[0] != lit:
                # reason clauses keep the implied literal first
                k = c.index(lit)
                c[0], c[k] = c[k], c[0]
        learnt[0] = lit ^ 1
        # drop literals implied by others in the clause (local minimisation)
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = self.reason[q >> 1]
            if r is None:
                keep.append(q)
                continue
            if not all(seen[u >> 1] or self.level[u >> 1] == 0 for u in self.clauses[r][1:]):
                keep.append(q)
        learnt = keep
        for v in touched:
            seen[v] = False
        if len(learnt) == 1:
            bt = 0
        else:
            mi = max(range(1, len(learnt)), key=lambda i: self.level[learnt[i] >> 1])
            learnt[1], learnt[mi] = learnt[mi], learnt[1]
            bt = self.level[learnt[1] >> 1]
        return learnt, bt

    def _backtrack(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        lim = self.trail_lim[lvl]
        for lit in self.trail[lim:]:
            v = lit >> 1
            self.phase[v] = (lit & 1) == 0
            self.val[lit] = 0
            self.val[lit ^ 1] = 0
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[lim:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, lim)

    def _pick(self):
        heap = self.heap
        while heap:
            negact, v = heapq.heappop(heap)
            if self.val[2 * v] == 0 and -negact == self.activity[v]:
                return v
            if self.val[2 * v] == 0 and -negact != self.activity[v]:
                continue
        for v in range(1, self.n + 1):
            if self.val[2 * v] == 0:
                return v
        return 0

    def solve(self, deadline: float | None = None, cancel=None) -> bool | None:
        """True if satisfiable, False if not, None if the deadline passed."""
        if not self.ok:
            return False
        for lit in self._units:
            if self.val[lit] == -1:
                self.ok = False
                return False
            if self.val[lit] == 0:
                self._assign(lit, None)
        if self._propagate() is not None:
            self.ok = False
            return False
        restart_i = 0
        budget = 100 * _luby(restart_i)
        since_restart = 0
        ticks = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, bt = self._analyze(confl)
                self._backtrack(bt)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    idx = len(self.clauses)
                    self.clauses.append(learnt)
                    self.watches[learnt[0] ^ 1].append(idx)
                    self.watches[learnt[1] ^ 1].append(idx)
                    self._assign(learnt[0], idx)
                self.var_inc *= 1.05
                continue
            if since_restart >= budget:
                restart_i += 1
                budget = 100 * _luby(restart_i)
                since_restart = 0
                self._backtrack(0)
            ticks += 1
            if ticks & 63 == 0:
                if deadline is not None and time.monotonic() > deadline:
                    self._backtrack(0)
                    return None
                if cancel is not None and cancel.is_set():
                    self._backtrack(0)
                    raise Cancelled()
            v = self._pick()
            if v == 0:
                return True
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._assign(2 * v if self.phase[v] else 2 * v + 1, None)

    def model(self) -> list:
        """Truth value per variable (index 0 unused)."""
        return [False] + [self.val[2 * v] == 1 for v in range(1, self.n + 1)]


def solve(nvars: int, clauses, seed: int = 0, deadline=None):
    s = Solver(nvars, clauses, seed)
    res = s.solve(deadline)
    return res, (s.model() if res else None)
