"""Quantifier elimination by derivation of D-sequents (DDS).

The solver branches on variables, assigning non-quantified variables
first, and proves every quantified variable redundant in each subspace.
Left and right branch results are merged by joining D-sequents; when both
branches are unsatisfiable the falsified clauses are resolved and the
resolvent is added to the formula.  The answer is the final formula with
every clause mentioning a quantified variable dropped.

State is kept incrementally: per-clause counters of true, false,
redundant and free quantified literals are updated on every assignment
and every change of the redundant set, and undone on backtrack.
"""

from __future__ import annotations

import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

from .cnf import Assignment, Clause, Cnf, EcnfFormula, QeError, resolvable
from .dseq import (BLOCKED, CLAUSE, JOIN, MONOTONE, ActiveDSequentSet,
                   DSequent, atomic_from_blocked_var,
                   atomic_from_falsified_clause, join_dsequents, with_condition)

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


class ResourceLimit(QeError):
    pass


class EngineFault(QeError):
    """An internal invariant of the engine was violated."""


@dataclass
class EngineConfig:
    node_cap: int | None = None
    time_cap: float | None = None
    reuse_dseqs: bool = False
    conflict_retention: bool = False
    trace: bool = False
    trace_sink: Callable | None = None
    debug_checks: bool = False
    # var -> component id; enables the per-derivation locality check
    components: dict | None = None


@dataclass
class Stats:
    nodes: int = 0
    resolvents_added: int = 0
    resolvents_discarded: int = 0
    dseqs_clause: int = 0
    dseqs_blocked: int = 0
    dseqs_join: int = 0
    dseqs_monotone: int = 0
    dseqs_reused: int = 0
    joins: int = 0
    max_depth: int = 0
    locality_violations: int = 0

    @property
    def dsequents(self) -> int:
        return (self.dseqs_clause + self.dseqs_blocked + self.dseqs_join
                + self.dseqs_monotone)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dsequents"] = self.dsequents
        return d


@dataclass
class QeResult:
    g: Cnf
    complete: bool
    answer: str | None
    stats: Stats
    formula: Cnf | None = None
    resolvents: list = field(default_factory=list)
    trace: list | None = None
    final_dseqs: list = field(default_factory=list)
    wall_ms: float = 0.0

    @property
    def answer_for_empty_y(self):
        """Satisfiability of F, meaningful when Y is empty."""
        if self.answer is None:
            return None
        return self.answer == SAT


class DdsSolver:
    def __init__(self, phi: EcnfFormula, cfg: EngineConfig | None = None):
        self.phi = phi
        self.cfg = cfg or EngineConfig()
        n = phi.num_vars
        self.n = n
        self.is_x = [False] * (n + 1)
        for v in phi.quantified:
            self.is_x[v] = True
        self.x_vars = sorted(phi.quantified)
        self.y_vars = sorted(set(range(1, n + 1)) - phi.quantified)
        self.val = [0] * (n + 1)          # 0 free, 1 true, -1 false
        self.level = [-1] * (n + 1)       # recursion depth of the assignment
        self.trail = []
        self.ds = ActiveDSequentSet()
        self.pi = {}                      # var -> stored D-sequents (reuse mode)
        self.lits = []
        self.deleted = []
        self.occ = {}
        self.n_sat, self.n_false, self.n_red, self.n_free_x = [], [], [], []
        self.f_sat, self.f_unit, self.f_bind = [], [], []
        self.falsified = set()
        self.units = set()
        self.bind_count = [0] * (n + 1)
        self.free_x = len(self.x_vars)
        self.witness = {}
        self.res_cache = {}
        self.resolvents = []
        self.stats = Stats()
        self.trace = [] if self.cfg.trace else None
        self.depth_nodes = []             # per depth: [branch index, left answer]
        self.tentative = {}               # resolvent id -> retire depth
        self.deadline = None
        self.hard_bound = 3 * 2 ** len(phi.cnf.variables())
        for c in phi.clauses:
            self._add_clause(c.lits)

    # ---- clause database ------------------------------------------------

    def _add_clause(self, lits) -> int:
        cid = len(self.lits)
        lits = tuple(lits)
        self.lits.append(lits)
        self.deleted.append(False)
        ns = nf = nr = nx = 0
        for l in lits:
            v = abs(l)
            self.occ.setdefault(l, []).append(cid)
            if self.val[v] == 0:
                if self.is_x[v]:
                    nx += 1
                    if v in self.ds:
                        nr += 1
            elif (self.val[v] > 0) == (l > 0):
                ns += 1
            else:
                nf += 1
        self.n_sat.append(ns)
        self.n_false.append(nf)
        self.n_red.append(nr)
        self.n_free_x.append(nx)
        self.f_sat.append(False)
        self.f_unit.append(False)
        self.f_bind.append(False)
        self._refresh(cid)
        return cid

    def _delete_clause(self, cid):
        lits = self.lits[cid]
        for l in lits:
            self.occ[l].remove(cid)
        self.deleted[cid] = True
        self.witness = {x: w for x, w in self.witness.items() if cid not in w}
        self.falsified.discard(cid)
        self.units.discard(cid)
        if self.f_bind[cid]:
            self.f_bind[cid] = False
            for l in lits:
                if not self.is_x[abs(l)]:
                    self.bind_count[abs(l)] -= 1

    def _refresh(self, cid):
        size = len(self.lits[cid])
        sat = self.n_sat[cid] > 0
        fals = not sat and self.n_false[cid] == size
        unit = not sat and self.n_red[cid] == 0 and self.n_false[cid] == size - 1
        bind = not sat and self.n_red[cid] == 0 and self.n_free_x[cid] > 0
        self.f_sat[cid] = sat
        if fals:
            self.falsified.add(cid)
        else:
            self.falsified.discard(cid)
        if unit != self.f_unit[cid]:
            self.f_unit[cid] = unit
            if unit:
                self.units.add(cid)
            else:
                self.units.discard(cid)
        if bind != self.f_bind[cid]:
            self.f_bind[cid] = bind
            d = 1 if bind else -1
            for l in self.lits[cid]:
                if not self.is_x[abs(l)]:
                    self.bind_count[abs(l)] += d

    def _live(self, cid) -> bool:
        return not self.f_sat[cid] and self.n_red[cid] == 0

    # view protocol for dseq.atomic_from_blocked_var
    def clause_lits(self, cid):
        return self.lits[cid]

    def occurrences(self, lit):
        return self.occ.get(lit, ())

    def value(self, var):
        s = self.val[var]
        return None if s == 0 else s > 0

    def clause_mark(self, cid) -> str:
        if self.f_sat[cid]:
            return "satisfied"
        if self.n_red[cid]:
            return "redundant"
        return "active"

    # ---- assignment and redundancy marks ---------------------------------

    def _assign(self, lit, depth):
        v = abs(lit)
        self.val[v] = 1 if lit > 0 else -1
        self.level[v] = depth
        self.trail.append(lit)
        isx = self.is_x[v]
        if isx:
            self.free_x -= 1
        for cid in self.occ.get(lit, ()):
            self.n_sat[cid] += 1
            if isx:
                self.n_free_x[cid] -= 1
            self._refresh(cid)
        for cid in self.occ.get(-lit, ()):
            self.n_false[cid] += 1
            if isx:
                self.n_free_x[cid] -= 1
            self._refresh(cid)

    def _unassign(self, lit):
        v = abs(lit)
        top = self.trail.pop()
        if top != lit:
            raise EngineFault(f"trail mismatch: popped {top}, expected {lit}")
        self.val[v] = 0
        self.level[v] = -1
        isx = self.is_x[v]
        if isx:
            self.free_x += 1
        for cid in self.occ.get(lit, ()):
            self.n_sat[cid] -= 1
            if isx:
                self.n_free_x[cid] += 1
            self._refresh(cid)
        for cid in self.occ.get(-lit, ()):
            self.n_false[cid] -= 1
            if isx:
                self.n_free_x[cid] += 1
            self._refresh(cid)

    def _mark(self, x, delta):
        for lit in (x, -x):
            for cid in self.occ.get(lit, ()):
                self.n_red[cid] += delta
                self._refresh(cid)

    def _make_redundant(self, ds: DSequent, depth, counted=True):
        if self.cfg.debug_checks and not ds.condition <= set(self.trail):
            raise EngineFault(f"D-sequent {ds} is not active")
        self.ds.add(ds)
        self._mark(ds.var, 1)
        if counted:
            self._record(ds, depth)

    def _make_nonredundant(self, x):
        self.ds.remove(x)
        self._mark(x, -1)

    def _record(self, ds: DSequent, depth):
        st = self.stats
        if ds.origin == CLAUSE:
            st.dseqs_clause += 1
        elif ds.origin == BLOCKED:
            st.dseqs_blocked += 1
        elif ds.origin == JOIN:
            st.dseqs_join += 1
        else:
            st.dseqs_monotone += 1
        comps = self.cfg.components
        if comps is not None and not ds.clause_like:
            ids = {comps[abs(l)] for l in ds.condition}
            ids |= {comps[v] for v in ds.scope}
            if len(ids) > 1:
                st.locality_violations += 1
        if self.cfg.reuse_dseqs and ds.origin != CLAUSE:
            store = self.pi.setdefault(ds.var, [])
            if ds not in store:
                store.append(ds)
        self._emit("dseq", depth, var=ds.var, **ds.to_json())

    def _emit(self, event, depth, **payload):
        if self.trace is None and self.cfg.trace_sink is None:
            return
        rec = {"event": event, "depth": depth, **payload}
        if self.trace is not None:
            self.trace.append(rec)
        if self.cfg.trace_sink is not None:
            self.cfg.trace_sink(rec)

    # ---- atomic D-sequents ------------------------------------------------

    def _is_blocked(self, x) -> bool:
        w = self.witness.get(x)
        if w is not None and self._live(w[0]) and self._live(w[1]):
            return False
        pos = [c for c in self.occ.get(x, ()) if self._live(c)]
        if not pos:
            return True
        neg = [c for c in self.occ.get(-x, ()) if self._live(c)]
        for a in pos:
            for b in neg:
                key = (a, b)
                r = self.res_cache.get(key)
                if r is None:
                    r = resolvable(self.lits[a], self.lits[b], x)
                    self.res_cache[key] = r
                if r:
                    self.witness[x] = key
                    return False
        return True

    def _process_unsat_clause(self, cid, depth):
        lits = self.lits[cid]
        for x in self.x_vars:
            if self.val[x] == 0 and x not in self.ds:
                self._make_redundant(atomic_from_falsified_clause(lits, x, cid), depth)

    def _try_reuse(self, x, depth) -> bool:
        q = set(self.trail)
        for ds in self.pi.get(x, ()):
            if ds.condition <= q and all(w == x or w in self.ds for w in ds.scope):
                self.stats.dseqs_reused += 1
                self._make_redundant(ds, depth, counted=False)
                self._emit("reuse", depth, var=x, **ds.to_json())
                return True
        return False

    def _atomic(self, depth):
        if self.falsified:
            cid = min(self.falsified)
            self._process_unsat_clause(cid, depth)
            return UNSAT, cid
        changed = True
        while changed and self.free_x > len(self.ds):
            changed = False
            for x in self.x_vars:
                if self.val[x] != 0 or x in self.ds:
                    continue
                if self.cfg.reuse_dseqs and self._try_reuse(x, depth):
                    changed = True
                elif self._is_blocked(x):
                    self._make_redundant(atomic_from_blocked_var(self, x), depth)
                    changed = True
        if self.free_x == len(self.ds):
            return SAT, None
        return UNKNOWN, None

    # ---- branching --------------------------------------------------------

    def _detached(self, y) -> bool:
        return self.bind_count[y] == 0

    def _free_lit(self, cid):
        for l in self.lits[cid]:
            if self.val[abs(l)] == 0:
                return l
        raise EngineFault(f"unit clause {cid} has no free literal")

    def _pick(self):
        """Return (variable, first literal to assign, is_unit)."""
        x_unit = None
        for cid in sorted(self.units):
            l = self._free_lit(cid)
            v = abs(l)
            if not self.is_x[v]:
                if not self._detached(v):
                    return v, -l, True
            elif x_unit is None:
                x_unit = (v, -l, True)
        for y in self.y_vars:
            if self.val[y] == 0 and not self._detached(y):
                return y, -y, False
        if x_unit is not None:
            return x_unit
        for x in self.x_vars:
            if self.val[x] == 0 and x not in self.ds:
                return x, -x, False
        raise EngineFault("nothing to branch on")

    # ---- main recursion ---------------------------------------------------

    def _tick(self, depth):
        st = self.stats
        st.nodes += 1
        if depth > st.max_depth:
            st.max_depth = depth
        if st.nodes > self.hard_bound:
            raise EngineFault("node count exceeds 3 * 2^|V|")
        if self.cfg.node_cap is not None and st.nodes > self.cfg.node_cap:
            raise ResourceLimit(f"node cap {self.cfg.node_cap} exceeded")
        if self.deadline is not None and st.nodes % 64 == 0 \
                and time.perf_counter() > self.deadline:
            raise ResourceLimit(f"time cap {self.cfg.time_cap}s exceeded")

    def dds(self, depth=0):
        """One node of the search: returns ``(answer, falsified clause id)``."""
        self._tick(depth)
        ans, cid = self._atomic(depth)
        if ans != UNKNOWN:
            return ans, cid
        debug = self.cfg.debug_checks
        if debug:
            snap = self._snapshot()

        v, first, _ = self._pick()
        if debug and ((self.is_x[v] and v in self.ds)
                      or (not self.is_x[v] and self._detached(v))):
            raise EngineFault(f"picked ineligible variable {v}")
        self.depth_nodes.append([0, None])
        self._assign(first, depth)
        self._emit("branch", depth, var=v, value=int(first > 0), side="left")
        ans0, c0 = self.dds(depth + 1)
        self.depth_nodes[-1][1] = ans0

        sym, asym = self.ds.split(first)
        if not asym and (ans0 == SAT or v not in self._vars_of(c0)):
            self._unassign(first)
            self.depth_nodes.pop()
            self._emit("backtrack", depth, var=v, skipped_right=True)
            if self.is_x[v]:
                if ans0 == UNSAT:
                    self._process_unsat_clause(c0, depth)
                else:
                    self._derive_monotone(v, depth)
            if debug:
                self._check_exit(snap)
            return ans0, c0

        left = {}
        for s in asym:
            left[s.var] = s
            self._make_nonredundant(s.var)
        self._unassign(first)
        self.depth_nodes[-1][0] = 1
        self._assign(-first, depth)
        self._emit("branch", depth, var=v, value=int(first < 0), side="right")
        ans1, c1 = self.dds(depth + 1)
        self.depth_nodes.pop()

        if ans0 == UNSAT and ans1 == UNSAT:
            c = self._conflict_clause(c0, c1, v, depth)
            for x in sorted(left):
                s1 = self.ds.get(x)
                if s1 is not None and s1.mentions(v):
                    self._make_nonredundant(x)
            self._unassign(-first)
            self._emit("backtrack", depth, var=v, answer=UNSAT)
            self._process_unsat_clause(c, depth)
            self._retire(depth)
            if debug:
                self._check_exit(snap)
            return UNSAT, c

        for x in sorted(left):
            s0, s1 = left[x], self.ds[x]
            if s1.mentions(v):
                s = self._join(s0, s1, v, depth)
            elif ans0 == UNSAT:
                continue
            else:
                s = self._join(s0, with_condition(s1, [-first]), v, depth)
            self.ds.replace(s)
        self._unassign(-first)
        self._emit("backtrack", depth, var=v, answer=SAT)
        if self.is_x[v]:
            self._derive_monotone(v, depth)
        self._retire(depth)
        if debug:
            self._check_exit(snap)
        return SAT, None

    def _vars_of(self, cid):
        return {abs(l) for l in self.lits[cid]}

    def _join(self, s0, s1, v, depth):
        s = join_dsequents(s0, s1, v)
        self.stats.joins += 1
        self._emit("join", depth, var=s.var, at=v)
        self._record(s, depth)
        return s

    def _derive_monotone(self, v, depth):
        if not self._is_blocked(v):
            raise EngineFault(f"branching variable {v} is not monotone after merge")
        self._make_redundant(atomic_from_blocked_var(self, v, origin=MONOTONE), depth)

    def _conflict_clause(self, c0, c1, v, depth):
        l0, l1 = self.lits[c0], self.lits[c1]
        if all(abs(l) != v for l in l0):
            return c0
        if all(abs(l) != v for l in l1):
            return c1
        lits = Clause.of([l for l in l0 + l1 if abs(l) != v]).lits
        cid = self._add_clause(lits)
        self.resolvents.append(cid)
        self.stats.resolvents_added += 1
        self._emit("resolvent", depth, id=cid, lits=list(lits), parents=[c0, c1])
        if self.cfg.conflict_retention and lits:
            d = max(self.level[abs(l)] for l in lits)
            branch, left_ans = self.depth_nodes[d]
            if branch == 1 and left_ans == UNSAT:
                self.tentative[cid] = d
        return cid

    def _retire(self, depth):
        """Drop intermediate resolvents whose deepest literal was assigned
        at ``depth``; the clause returned from this node replaces them."""
        if not self.tentative:
            return
        for cid in [c for c, d in self.tentative.items() if d == depth]:
            del self.tentative[cid]
            self._delete_clause(cid)
            self.resolvents.remove(cid)
            self.stats.resolvents_discarded += 1
            self._emit("discard", depth, id=cid)

    # ---- debug invariants ---------------------------------------------------

    def _snapshot(self):
        return (list(self.trail), dict(self.ds.by_var))

    def _check_exit(self, snap):
        trail, entry_ds = snap
        if self.trail != trail:
            raise EngineFault("assignment not restored on backtrack")
        for x, s in entry_ds.items():
            if self.ds.get(x) is not s:
                raise EngineFault(f"D-sequent of {x} changed below its node")
        q = set(self.trail)
        for s in self.ds:
            if not s.condition <= q:
                raise EngineFault(f"inactive D-sequent {s} left in the active set")
        self._check_counters()

    def _check_counters(self):
        bind = [0] * (self.n + 1)
        for cid, lits in enumerate(self.lits):
            if self.deleted[cid]:
                continue
            ns = nf = nr = nx = 0
            for l in lits:
                v = abs(l)
                if self.val[v] == 0:
                    if self.is_x[v]:
                        nx += 1
                        nr += v in self.ds
                elif (self.val[v] > 0) == (l > 0):
                    ns += 1
                else:
                    nf += 1
            got = (self.n_sat[cid], self.n_false[cid], self.n_red[cid], self.n_free_x[cid])
            if got != (ns, nf, nr, nx):
                raise EngineFault(f"clause {cid} counters {got} != {(ns, nf, nr, nx)}")
            if ns == 0 and nr == 0 and nx > 0:
                for l in lits:
                    if not self.is_x[abs(l)]:
                        bind[abs(l)] += 1
        if bind != self.bind_count:
            raise EngineFault("detachment counters out of sync")

    # ---- driver -----------------------------------------------------------

    def solve(self) -> QeResult:
        t0 = time.perf_counter()
        if self.cfg.time_cap is not None:
            self.deadline = t0 + self.cfg.time_cap
        complete = True
        answer = None
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 4 * self.n + 1000))
        try:
            answer, _ = self.dds(0)
        except ResourceLimit:
            complete = False
        finally:
            sys.setrecursionlimit(limit)
        if complete and self.x_vars:
            for x in self.x_vars:
                s = self.ds.get(x)
                if s is None or s.condition:
                    raise EngineFault(f"no unconditional D-sequent for {x}")
        formula = self.current_formula()
        g = extract_g(formula, self.phi.quantified)
        return QeResult(
            g=g, complete=complete, answer=answer, stats=self.stats,
            formula=formula, resolvents=list(self.resolvents),
            trace=self.trace, final_dseqs=list(self.ds),
            wall_ms=(time.perf_counter() - t0) * 1000.0)

    def current_formula(self) -> Cnf:
        cl = tuple(Clause(lits, cid) for cid, lits in enumerate(self.lits)
                   if not self.deleted[cid])
        return Cnf(cl, self.n)


def extract_g(formula: Cnf, quantified) -> Cnf:
    """Drop every clause with a quantified variable; dedupe the rest."""
    out, seen = [], set()
    for c in formula.clauses:
        if c.vars & quantified:
            continue
        if not c.lits:
            return Cnf((Clause((), c.id),), formula.num_vars)
        if c.lits not in seen:
            seen.add(c.lits)
            out.append(c)
    return Cnf(tuple(out), formula.num_vars)


def run_qe(phi: EcnfFormula, cfg: EngineConfig | None = None) -> QeResult:
    """Eliminate the quantified variables of ``phi`` with DDS."""
    cfg = cfg or EngineConfig()
    if not phi.quantified:
        t0 = time.perf_counter()
        return QeResult(g=extract_g(phi.cnf, frozenset()), complete=True,
                        answer=None, stats=Stats(), formula=phi.cnf,
                        trace=[] if cfg.trace else None,
                        wall_ms=(time.perf_counter() - t0) * 1000.0)
    return DdsSolver(phi, cfg).solve()


def node_bound(phi: EcnfFormula, components) -> int:
    """|V(F)| * sum over components of 2 * 3^|Vi| * (|Xi| + 1)."""
    nv = len(phi.cnf.variables())
    total = 0
    for comp in components:
        xi = len(set(comp) & phi.quantified)
        total += 2 * 3 ** len(comp) * (xi + 1)
    return nv * total
