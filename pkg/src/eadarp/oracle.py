"""Slow reference implementations used to validate the fast path.

Everything in here trades speed for being independently derivable from first
principles: whole-route scheduling LPs, grid searches over recharge durations
and service start times, and exhaustive enumeration of tiny instances.  Only
tests should import this module.
"""

from __future__ import annotations

from itertools import permutations

from .model import DESTINATION, DROPOFF, ORIGIN, PICKUP, STATION
from .routeval import check_route
from .simplex import OPTIMAL, solve_lp

EPS = 1e-9


def brute_force_min_excess(inst, seq):
    """Minimum total excess of a station-free route by one whole-route LP.

    The LP is assembled over the complete route (depots included in the
    chaining constraints), not per fragment, so it provides an independent
    check of the fragment decomposition.  Returns None if infeasible.
    """
    assert all(inst.kind[v] != STATION for v in seq)
    pos = {v: k for k, v in enumerate(seq)}
    reqs = sorted(v for v in seq if inst.kind[v] == PICKUP)
    rvar = {p: len(seq) + k for k, p in enumerate(reqs)}
    nvars = len(seq) + len(reqs)
    A, b = [], []

    def row(entries, rhs):
        r = [0.0] * nvars
        for idx, coef in entries:
            r[idx] = coef
        A.append(r)
        b.append(rhs)

    for i, j in zip(seq, seq[1:]):
        row([(pos[i], 1.0), (pos[j], -1.0)], -(inst.s[i] + inst.t[i][j]))
    for p in reqs:
        d = p + inst.n
        row([(pos[d], 1.0), (pos[p], -1.0)], inst.m[p] + inst.s[p])
        row([(pos[d], 1.0), (pos[p], -1.0), (rvar[p], -1.0)],
            inst.s[p] + inst.t[p][d])
    for v in seq:
        row([(pos[v], 1.0)], inst.l[v])
        row([(pos[v], -1.0)], -inst.e[v])

    c = [0.0] * nvars
    for p in reqs:
        c[rvar[p]] = 1.0
    res = solve_lp(c, A, b)
    if res.status != OPTIMAL:
        return None
    return res.objective


def brute_force_feasible(inst, seq, step=0.01):
    """Window + battery feasibility of a route by grid search.

    Enumerates recharge durations at every station visit over a grid of the
    given step, augmented with the exact fill-to-full duration and the exact
    minimal durations needed to survive to the next station / to the end.
    Each choice is simulated with earliest-arrival scheduling.  Ride times
    are deliberately ignored: this mirrors exactly what the labeling pass
    claims to decide.
    """
    H = inst.H
    gamma = inst.gamma
    last = len(seq) - 1

    def min_need(idx, battery):
        """Exact extra charge needed at seq[idx] to (a) reach the next
        station without going flat and (b) finish without recharging."""
        acc = 0.0
        need_next = None
        for k in range(idx, last):
            acc += inst.h[seq[k]][seq[k + 1]]
            if need_next is None and inst.kind[seq[k + 1]] == STATION:
                need_next = max(0.0, acc - battery)
        need_all = max(0.0, acc + gamma * H - battery)
        if need_next is None:
            need_next = need_all
        return need_next, need_all

    def simulate(idx, start, battery):
        # advance until the next station (or the end) with earliest arrivals
        while True:
            i = seq[idx]
            if idx == last:
                return battery >= gamma * H - EPS
            j = seq[idx + 1]
            arrive = max(inst.e[j], start + inst.s[i] + inst.t[i][j])
            if arrive > inst.l[j] + EPS:
                return False
            battery = battery - inst.h[i][j]
            if battery < -EPS:
                return False
            idx += 1
            start = arrive
            if inst.kind[j] == STATION:
                break
        deficit = H - battery
        need_next, need_all = min_need(idx, battery)
        cands = [min(deficit, need_all), min(deficit, need_next),
                 0.0, deficit]
        k, g = 1, step
        while g < deficit - EPS:
            cands.append(g)
            k += 1
            g = k * step
        seen = set()
        for r in cands:
            key = round(r, 12)
            if key in seen:
                continue
            seen.add(key)
            if simulate(idx, start + r, min(H, battery + r)):
                return True
        return False

    return simulate(0, inst.e[seq[0]], H)


def grid_min_excess(inst, seq, step=0.1):
    """Minimum total excess of a user-node sequence by start-time grid search.

    Service starts are enumerated on a grid of the given step anchored at
    each node's earliest reachable time.  Returns None if infeasible even in
    the relaxation (no on-grid schedule fits the windows / ride caps).
    """
    n = inst.n
    best = [None]

    def rec(idx, times, earliest, acc):
        if best[0] is not None and acc >= best[0] - EPS:
            return
        if idx == len(seq):
            best[0] = acc
            return
        v = seq[idx]
        lo = max(inst.e[v], earliest)
        if lo > inst.l[v] + EPS:
            return
        if inst.kind[v] == DROPOFF:
            # delaying a dropoff can only add excess, here and downstream
            p = v - n
            ride = lo - times[p] - inst.s[p]
            if ride > inst.m[p] + EPS:
                return
            times[v] = lo
            rec(idx + 1, times, _succ(v, lo, idx),
                acc + max(0.0, ride - inst.t[p][v]))
            del times[v]
            return
        # besides the grid, try the exact starts that make the vehicle
        # arrive precisely when a later node opens, or as late as a later
        # node's deadline still allows -- the continuous optimum always
        # lies at one of these synchronisation points
        cands = [inst.l[v]]
        path = inst.s[v]
        for k in range(idx + 1, len(seq)):
            path += inst.t[seq[k - 1]][seq[k]]
            for anchor in (inst.e[seq[k]], inst.l[seq[k]]):
                tv = anchor - path
                if lo < tv <= inst.l[v] + EPS:
                    cands.append(tv)
            path += inst.s[seq[k]]
        tv = lo
        while tv <= inst.l[v] + EPS:
            cands.append(tv)
            tv += step
        for tv in sorted(set(round(c, 12) for c in cands)):
            times[v] = tv
            rec(idx + 1, times, _succ(v, tv, idx), acc)
        del times[v]

    def _succ(v, tv, idx):
        if idx + 1 >= len(seq):
            return 0.0
        return tv + inst.s[v] + inst.t[v][seq[idx + 1]]

    rec(0, {}, 0.0, 0.0)
    return best[0]


def _orderings(inst, reqs):
    """All precedence- and capacity-valid orderings of a request set."""
    nodes = [p for p in reqs] + [p + inst.n for p in reqs]
    out = []
    for perm in permutations(nodes):
        load = 0
        ok = True
        seen = set()
        for v in perm:
            if inst.kind[v] == PICKUP:
                load += inst.q[v]
                seen.add(v)
                if load > inst.max_capacity():
                    ok = False
                    break
            else:
                if v - inst.n not in seen:
                    ok = False
                    break
                load += inst.q[v]
        if ok:
            out.append(perm)
    return out


def _with_stations(inst, core, max_insert=3):
    """All ways to insert up to max_insert station visits at zero-load gaps."""
    gaps = [0]
    load = 0
    for k, v in enumerate(core):
        load += inst.q[v]
        if load == 0:
            gaps.append(k + 1)
    yield tuple(core)
    singles = [(g, s) for g in gaps for s in inst.stations]
    from itertools import combinations_with_replacement
    for cnt in range(1, max_insert + 1):
        for combo in combinations_with_replacement(singles, cnt):
            route = list(core)
            for g, s in sorted(combo, key=lambda x: -x[0]):
                route.insert(g, s)
            yield tuple(route)


def exhaustive_solve(inst, n_as=None, max_station_insert=3, frag_table=None):
    """Optimal solution of a tiny instance by full enumeration.

    Maximises the number of served requests first, then minimises weighted
    cost, enumerating request-to-vehicle assignments, visit orders,
    destination-depot choices and station insertions.  Exponential in
    everything; intended for instances with a handful of requests.
    """
    if frag_table is None:
        from .fragments import FragmentTable
        frag_table = FragmentTable(inst)
    reqs = list(inst.pickups)
    K = inst.K
    best_served, best_cost, best_routes = -1, None, None
    # best route per (vehicle, request set, destination), shared across all
    # assignments that hand the same set to the same vehicle
    route_cache = {}

    def best_per_dest(k, rset):
        key = (k, rset)
        hit = route_cache.get(key)
        if hit is not None:
            return hit
        o = inst.origins[k]
        orders = _orderings(inst, rset) if rset else [()]
        cores = {core for order in orders
                 for core in _with_stations(inst, order, max_station_insert)}
        table = {}
        for dest in inst.destinations:
            best_r, best_c = None, None
            for core in cores:
                seq = (o,) + core + (dest,)
                # with per-station caps unlimited-or-shared this stays
                # exact for the tiny cases we enumerate
                chk = check_route(inst, seq, frag_table, n_as)
                if chk.feasible and (best_c is None or chk.cost < best_c):
                    best_c, best_r = chk.cost, seq
            if best_r is not None:
                table[dest] = (best_c, best_r)
        route_cache[key] = table
        return table

    def assignments(rs):
        if not rs:
            yield tuple(() for _ in range(K))
            return
        head, rest = rs[0], rs[1:]
        for sub in assignments(rest):
            for k in range(K):
                yield tuple(tuple(sorted(sub[i] + (head,))) if i == k
                            else sub[i] for i in range(K))
            yield sub  # head unserved

    seen_assign = set()
    for assign in assignments(reqs):
        if assign in seen_assign:
            continue
        seen_assign.add(assign)
        served = sum(len(a) for a in assign)
        if served < best_served:
            continue
        tables = [best_per_dest(k, assign[k]) for k in range(K)]
        if any(not t for t in tables):
            continue
        for dests in permutations(inst.destinations, K):
            total, routes = 0.0, []
            ok = True
            for k in range(K):
                hit = tables[k].get(dests[k])
                if hit is None:
                    ok = False
                    break
                total += hit[0]
                routes.append(hit[1])
            if not ok:
                continue
            if served > best_served or \
                    (served == best_served and total < best_cost - EPS):
                best_served, best_cost, best_routes = served, total, routes
    return best_served, best_cost, best_routes
