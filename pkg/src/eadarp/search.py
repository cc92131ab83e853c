"""Deterministic annealing local search over route sets.

The search keeps one incumbent solution and, each iteration, applies a fixed
cycle of neighbourhood operators (three intra-route swaps, tail exchange,
relocate, exchange, plus request re-insertion when requests are unserved).
A candidate is accepted when its cost is below the incumbent's cost plus a
threshold that decreases linearly and is reset to a random fraction of its
maximum when it drops below zero -- annealing without a cooling schedule to
tune.  Solutions serving more requests always win; ties are broken by the
weighted travel + excess-ride-time cost.

Recharging stations never move with an operator: every move first strips the
stations of the touched routes and a repair step re-inserts visits
breadth-first at empty-vehicle positions until the battery profile fits.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .model import DROPOFF, PICKUP, STATION
from .routeval import Evaluator


@dataclass
class DAParams:
    theta_factor: float = 0.9   # theta_max = factor * mean arc travel time
    theta_red: int = 300        # linear decrements from theta_max to zero
    n_imp: int = 50             # stagnation limit before restarting from best
    n_iter: int = 10000


@dataclass
class SearchResult:
    routes: tuple
    unserved: tuple
    cost: float
    trace: tuple
    evaluations: int
    best_iteration: int


@dataclass
class _State:
    routes: list        # one tuple of node ids per vehicle
    costs: list
    unserved: list      # sorted pickup ids
    total: float = 0.0

    def snapshot(self):
        return _State(list(self.routes), list(self.costs),
                      list(self.unserved), self.total)

    def key(self):
        return (len(self.unserved), self.total)


class _Search:
    def __init__(self, inst, mask=None, frag_table=None, params=None,
                 n_as=None, seed=0):
        self.inst = inst
        self.mask = mask
        self.params = params or DAParams()
        self.n_as = n_as
        self.rng = random.Random(seed)
        self.ev = Evaluator(inst, frag_table, n_as)
        self.n_rch = max(1, math.ceil(len(inst.stations) / 2))
        self.ops = [self.op_ex_pickup, self.op_ex_dropoff,
                    self.op_ex_neighbors, self.op_tail_swap,
                    self.op_relocate, self.op_exchange]

    # -- basic helpers -----------------------------------------------------

    def core(self, seq):
        return tuple(v for v in seq if self.inst.kind[v] != STATION)

    def zero_load_positions(self, seq):
        out, load = [], 0
        for k in range(1, len(seq)):
            prev = seq[k - 1]
            if self.inst.kind[prev] in (PICKUP, DROPOFF):
                load += self.inst.q[prev]
            if load == 0:
                out.append(k)
        return out

    def free_dests(self, state, exclude=()):
        used = {state.routes[k][-1] for k in range(len(state.routes))
                if k not in exclude}
        return [d for d in self.inst.destinations if d not in used]

    def budget(self, state, exclude, extra=()):
        if self.n_as is None:
            return None
        b = {s: self.n_as for s in self.inst.stations}
        for k, r in enumerate(state.routes):
            if k in exclude:
                continue
            for v in r:
                if self.inst.kind[v] == STATION:
                    b[v] -= 1
        for r in extra:
            for v in r:
                if self.inst.kind[v] == STATION:
                    b[v] -= 1
        return b

    # -- station repair ----------------------------------------------------

    def repair(self, seq, budget):
        """Make a station-free route battery feasible by inserting visits.

        Breadth-first: each level adds one visit of a randomly chosen
        station at every empty-vehicle position of every still-failing
        route; the cheapest feasible result wins.  Depth is capped at about
        half the number of stations.
        """
        seq = tuple(seq)
        chk = self.ev(seq)
        if chk.feasible:
            return seq, chk
        if chk.reason != "battery":
            return None, None
        if budget is not None:
            stations = sorted(s for s in budget if budget[s] > 0)
        else:
            stations = list(self.inst.stations)
        if not stations:
            return None, None
        frontier = [seq]
        for _ in range(self.n_rch):
            s = self.rng.choice(stations)
            best, best_chk = None, None
            nxt = []
            for r in frontier:
                if budget is not None and \
                        sum(1 for v in r if v == s) >= budget[s]:
                    continue
                for pos in self.zero_load_positions(r):
                    cand = r[:pos] + (s,) + r[pos:]
                    chk = self.ev(cand)
                    if chk.feasible:
                        if best_chk is None or chk.cost < best_chk.cost:
                            best, best_chk = cand, chk
                    elif chk.reason == "battery":
                        nxt.append(cand)
            if best is not None:
                return best, best_chk
            if not nxt:
                return None, None
            frontier = nxt
        return None, None

    # -- request insertion -------------------------------------------------

    def best_insertion(self, state, k, p, extra=()):
        """Cheapest feasible insertion of request p into route k.

        Tries every pickup/dropoff position pair and, besides the route's
        current destination depot, every currently unclaimed one.  Returns
        (route, check) or (None, None).
        """
        inst = self.inst
        d = p + inst.n
        c = self.core(state.routes[k])
        body = list(c[1:-1])
        dests = [c[-1]] + self.free_dests(state)
        budget = self.budget(state, exclude={k}, extra=extra)
        best, best_chk = None, None
        for i in range(len(body) + 1):
            for j in range(i, len(body) + 1):
                nb = body[:i] + [p] + body[i:j] + [d] + body[j:]
                for dest in dests:
                    cand = (c[0],) + tuple(nb) + (dest,)
                    rep, chk = self.repair(cand, budget)
                    if rep is not None and \
                            (best_chk is None or chk.cost < best_chk.cost):
                        best, best_chk = rep, chk
        return best, best_chk

    # -- operators ---------------------------------------------------------
    # Each returns None or a dict {vehicle: (route, check)} of repaired,
    # feasible replacement routes; `served` marks a request newly served.

    def _finish_single(self, state, k, cand):
        budget = self.budget(state, exclude={k})
        rep, chk = self.repair(cand, budget)
        if rep is None:
            return None
        return {k: (rep, chk)}

    def _intra_candidates(self, state, want):
        cands = []
        for k, r in enumerate(state.routes):
            c = self.core(r)
            for idx in range(1, len(c) - 1):
                if want(c, idx):
                    cands.append((k, idx))
        return cands

    def op_ex_pickup(self, state):
        inst = self.inst

        def want(c, idx):
            return (inst.kind[c[idx]] == PICKUP
                    and idx + 1 < len(c) - 1
                    and inst.is_user(c[idx + 1])
                    and c[idx + 1] != c[idx] + inst.n)

        cands = self._intra_candidates(state, want)
        if not cands:
            return None
        k, idx = self.rng.choice(cands)
        c = list(self.core(state.routes[k]))
        c[idx], c[idx + 1] = c[idx + 1], c[idx]
        return self._finish_single(state, k, c)

    def op_ex_dropoff(self, state):
        inst = self.inst

        def want(c, idx):
            return (inst.kind[c[idx]] == DROPOFF
                    and idx - 1 >= 1
                    and inst.is_user(c[idx - 1])
                    and c[idx - 1] != c[idx] - inst.n)

        cands = self._intra_candidates(state, want)
        if not cands:
            return None
        k, idx = self.rng.choice(cands)
        c = list(self.core(state.routes[k]))
        c[idx - 1], c[idx] = c[idx], c[idx - 1]
        return self._finish_single(state, k, c)

    def op_ex_neighbors(self, state):
        inst = self.inst
        n = inst.n

        def want(c, idx):
            return (idx + 3 < len(c) - 1
                    and inst.kind[c[idx]] == PICKUP
                    and c[idx + 1] == c[idx] + n
                    and inst.kind[c[idx + 2]] == PICKUP
                    and c[idx + 3] == c[idx + 2] + n)

        cands = self._intra_candidates(state, want)
        if not cands:
            return None
        k, idx = self.rng.choice(cands)
        c = list(self.core(state.routes[k]))
        c[idx + 1], c[idx + 2] = c[idx + 2], c[idx + 1]
        return self._finish_single(state, k, c)

    def op_tail_swap(self, state):
        if len(state.routes) < 2:
            return None
        k1, k2 = self.rng.sample(range(len(state.routes)), 2)
        c1 = self.core(state.routes[k1])
        c2 = self.core(state.routes[k2])
        p1 = self.rng.choice(self.zero_load_positions(c1))
        p2 = self.rng.choice(self.zero_load_positions(c2))
        n1 = c1[:p1] + c2[p2:]
        n2 = c2[:p2] + c1[p1:]
        budget = self.budget(state, exclude={k1, k2})
        r1, chk1 = self.repair(n1, budget)
        if r1 is None:
            return None
        budget = self.budget(state, exclude={k1, k2}, extra=(r1,))
        r2, chk2 = self.repair(n2, budget)
        if r2 is None:
            return None
        return {k1: (r1, chk1), k2: (r2, chk2)}

    def _served_requests(self, state):
        out = []
        for k, r in enumerate(state.routes):
            for v in r:
                if self.inst.kind[v] == PICKUP:
                    out.append((k, v))
        return out

    def _remove_request(self, seq, p):
        d = p + self.inst.n
        return tuple(v for v in self.core(seq) if v not in (p, d))

    def op_relocate(self, state):
        served = self._served_requests(state)
        if not served or len(state.routes) < 2:
            return None
        k1, p = self.rng.choice(served)
        others = [k for k in range(len(state.routes)) if k != k1]
        k2 = self.rng.choice(others)
        donor = self._remove_request(state.routes[k1], p)
        budget = self.budget(state, exclude={k1, k2})
        r1, chk1 = self.repair(donor, budget)
        if r1 is None:
            return None
        inter = state.snapshot()
        inter.routes[k1] = r1
        r2, chk2 = self.best_insertion(inter, k2, p)
        if r2 is None:
            return None
        return {k1: (r1, chk1), k2: (r2, chk2)}

    def op_exchange(self, state):
        served = self._served_requests(state)
        by_route = {}
        for k, p in served:
            by_route.setdefault(k, []).append(p)
        if len(by_route) < 2:
            return None
        k1, k2 = self.rng.sample(sorted(by_route), 2)
        p1 = self.rng.choice(by_route[k1])
        p2 = self.rng.choice(by_route[k2])
        s1 = self._remove_request(state.routes[k1], p1)
        s2 = self._remove_request(state.routes[k2], p2)
        inter = state.snapshot()
        inter.routes[k1] = s1
        inter.routes[k2] = s2
        r1, chk1 = self.best_insertion(inter, k1, p2)
        if r1 is None:
            return None
        inter.routes[k1] = r1
        r2, chk2 = self.best_insertion(inter, k2, p1, extra=())
        if r2 is None:
            return None
        return {k1: (r1, chk1), k2: (r2, chk2)}

    def op_add_request(self, state):
        if not state.unserved:
            return None
        p = self.rng.choice(state.unserved)
        k = self.rng.randrange(len(state.routes))
        r, chk = self.best_insertion(state, k, p)
        if r is None:
            return None
        return {k: (r, chk)}, p

    # -- construction ------------------------------------------------------

    def initial_solution(self):
        inst = self.inst
        rng = self.rng
        reqs = sorted(inst.pickups, key=lambda p: (inst.e[p], p))
        K = inst.K
        routes, used = [], set()
        for k in range(K):
            o = inst.origins[k]
            free = [d for d in inst.destinations if d not in used]
            dest = min(free, key=lambda d: (inst.t[o][d], d))
            used.add(dest)
            routes.append((o, dest))
        state = _State(routes, [0.0] * K, [], 0.0)
        for k in range(K):
            chk = self.ev(state.routes[k])
            state.costs[k] = chk.cost
            state.total += chk.cost

        seeded = rng.sample(range(K), min(K, len(reqs)))
        order = list(reqs)
        leftover = []
        for k, p in zip(seeded, order[:len(seeded)]):
            r, chk = self.best_insertion(state, k, p)
            if r is None:
                leftover.append(p)
                continue
            self._apply(state, {k: (r, chk)})
        for p in order[len(seeded):] + leftover:
            tried = sorted(range(K), key=lambda k: (
                inst.t[self._tail(state.routes[k])][p], k))
            placed = False
            for k in tried:
                r, chk = self.best_insertion(state, k, p)
                if r is not None:
                    self._apply(state, {k: (r, chk)})
                    placed = True
                    break
            if not placed:
                state.unserved.append(p)
        state.unserved.sort()
        return state

    def _tail(self, seq):
        for v in reversed(seq[:-1]):
            if self.inst.kind[v] != STATION:
                return v
        return seq[0]

    def _apply(self, state, changes):
        for k, (r, chk) in changes.items():
            state.total += chk.cost - state.costs[k]
            state.routes[k] = r
            state.costs[k] = chk.cost

    # -- main loop ---------------------------------------------------------

    def run(self, collect_trace=False):
        params = self.params
        theta_max = params.theta_factor * self._mean_arc_time()
        theta = theta_max
        state = self.initial_solution()
        best = state.snapshot()
        best_iter = 0
        trace = []
        i_imp = 0
        for it in range(params.n_iter):
            i_imp += 1
            improved = False
            for op in self.ops:
                res = op(state)
                if res is None:
                    continue
                delta = sum(chk.cost - state.costs[k]
                            for k, (_, chk) in res.items())
                if delta < theta:
                    self._apply(state, res)
                    if collect_trace:
                        trace.append((it, op.__name__,
                                      round(state.total, 6)))
                    if state.key() < best.key():
                        best = state.snapshot()
                        best_iter = it
                        improved = True
            if state.unserved:
                res = self.op_add_request(state)
                if res is not None:
                    changes, p = res
                    self._apply(state, changes)
                    state.unserved.remove(p)
                    if collect_trace:
                        trace.append((it, "op_add_request",
                                      round(state.total, 6)))
                    if state.key() < best.key():
                        best = state.snapshot()
                        best_iter = it
                        improved = True
            if improved:
                i_imp = 0
            else:
                theta -= theta_max / params.theta_red
                if theta < 0:
                    theta = self.rng.random() * theta_max
                    if i_imp > params.n_imp:
                        state = best.snapshot()
                        i_imp = 0
        return SearchResult(tuple(best.routes), tuple(best.unserved),
                            best.total, tuple(trace),
                            self.ev.misses + self.ev.hits, best_iter)

    def _mean_arc_time(self):
        inst = self.inst
        tot, cnt = 0.0, 0
        for i in range(1, inst.num_nodes + 1):
            for j in range(1, inst.num_nodes + 1):
                if i == j:
                    continue
                if self.mask is not None and not self.mask.ok(i, j):
                    continue
                tot += inst.t[i][j]
                cnt += 1
        return tot / cnt if cnt else 1.0


def da_search(inst, mask=None, frag_table=None, params=None, n_as=None,
              seed=0, collect_trace=False):
    """Run the annealing search and return its best solution."""
    s = _Search(inst, mask, frag_table, params, n_as, seed)
    return s.run(collect_trace)
