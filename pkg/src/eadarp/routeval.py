"""Route feasibility checking and costing.

Time windows and battery are checked with a forward labeling pass that keeps,
per visited node, the earliest service start, the latest useful service start
and the maximum net battery consumption (in time-equivalent units), folding
forced recharge time into arrival delays.  Ride times and the excess-ride-time
part of the objective are handled separately through the fragment
decomposition: any route is a chain of empty-to-empty fragments and its
minimum total excess is the sum of the fragment minima.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fragments import min_excess_lp, min_excess_single
from .model import DESTINATION, DROPOFF, ORIGIN, PICKUP, STATION


@dataclass
class Label:
    node: int
    t_min: float           # earliest service start, minimum prior recharge
    t_max: float           # earliest service start, maximum prior recharge
    rt_max: float          # time-to-full at this node under minimum recharge
    seen_station: bool
    h_since: float = 0.0   # consumption since the last station visit


@dataclass
class RouteCheck:
    feasible: bool
    reason: str = ""       # "", "structure", "window", "battery",
                           # "station_cap", "ride"
    travel: float = 0.0
    excess: float = 0.0
    cost: float = 0.0
    labels: tuple = ()


EPS = 1e-9


def initial_label(inst, origin):
    e = inst.e[origin]
    return Label(origin, e, e, 0.0, False)


def extend_label(inst, lab, j):
    """Propagate a label along arc (lab.node, j).

    Returns (label, "") on success or (None, reason) where reason is
    "window" or "battery" depending on which resource failed first.
    """
    i = lab.node
    t, s, e, l = inst.t, inst.s, inst.e, inst.l
    leg = t[i][j]
    h = inst.h[i][j]
    H = inst.H
    at_station = inst.kind[i] == STATION

    if at_station:
        slack = max(0.0, min(e[j] - lab.t_min - leg - s[i], lab.rt_max))
    else:
        slack = max(0.0, min(e[j] - lab.t_min - leg - s[i],
                             lab.t_max - lab.t_min))

    if lab.seen_station or at_station:
        carried = max(0.0, lab.rt_max - slack) + h
        z = max(0.0, carried - H)
        rt = min(H, carried)
        t_min = max(e[j], lab.t_min + leg + s[i]) + z
    else:
        rt = lab.rt_max + h
        t_min = max(e[j], lab.t_min + leg + s[i])

    if at_station:
        t_max = min(l[j], max(e[j], lab.t_min + lab.rt_max + leg + s[i]))
    else:
        t_max = min(l[j], max(e[j], lab.t_max + leg + s[i]))

    if t_min > l[j] + EPS or t_min > t_max + EPS:
        return None, "window"
    h_since = 0.0 if inst.kind[j] == STATION else lab.h_since + h
    if inst.kind[j] == DESTINATION:
        # The vehicle may stay longer at an earlier station to meet the
        # final-charge floor: delaying arrival from t_min towards t_max
        # converts one-for-one into extra charge, but consumption can never
        # drop below what was spent since the last station visit.
        reachable = max(h_since, rt - (t_max - t_min))
        if reachable > (1.0 - inst.gamma) * H + EPS:
            return None, "battery"
    elif rt > H + EPS:
        return None, "battery"
    return Label(j, t_min, t_max, rt, lab.seen_station or at_station,
                 h_since), ""


def split_fragments(inst, seq):
    """User-node subsequences of a route, split at zero-load positions."""
    frags = []
    cur = []
    load = 0
    for node in seq:
        k = inst.kind[node]
        if k in (PICKUP, DROPOFF):
            cur.append(node)
            load += inst.q[node]
            if load == 0:
                frags.append(tuple(cur))
                cur = []
        elif cur:
            return None  # depot or station with users on board
    if cur:
        return None
    return frags


def check_route(inst, seq, frag_table=None, n_as=None):
    """Full feasibility + cost check of one route (origin ... destination).

    `n_as` caps the number of visits each station may receive; None means
    unlimited.  Uses `frag_table` for excess lookups when available, falling
    back to the closed form / LP.
    """
    if len(seq) < 2 or inst.kind[seq[0]] != ORIGIN \
            or inst.kind[seq[-1]] != DESTINATION:
        return RouteCheck(False, "structure")

    # structure: pairing, load, station placement, visit cap
    n = inst.n
    load = 0
    seen = set()
    visits = {}
    for node in seq[1:-1]:
        k = inst.kind[node]
        if k == PICKUP:
            load += inst.q[node]
            seen.add(node)
            if load > inst.max_capacity():
                return RouteCheck(False, "structure")
        elif k == DROPOFF:
            if node - n not in seen:
                return RouteCheck(False, "structure")
            load += inst.q[node]
        elif k == STATION:
            if load != 0:
                return RouteCheck(False, "structure")
            visits[node] = visits.get(node, 0) + 1
            if n_as is not None and visits[node] > n_as:
                return RouteCheck(False, "station_cap")
        else:
            return RouteCheck(False, "structure")
    if load != 0:
        return RouteCheck(False, "structure")

    # ride time + excess via fragments
    frags = split_fragments(inst, seq[1:-1])
    if frags is None:
        return RouteCheck(False, "structure")
    excess = 0.0
    for fr in frags:
        if frag_table is not None:
            eu = frag_table.min_excess(fr)
        else:
            eu = (min_excess_single(inst, fr[0]) if len(fr) == 2
                  else min_excess_lp(inst, fr))
        if eu is None:
            return RouteCheck(False, "ride")
        excess += eu

    # windows + battery via labeling
    lab = initial_label(inst, seq[0])
    labels = [lab]
    for j in seq[1:]:
        lab, why = extend_label(inst, lab, j)
        if lab is None:
            return RouteCheck(False, why)
        labels.append(lab)

    travel = sum(inst.t[i][j] for i, j in zip(seq, seq[1:]))
    cost = inst.w1 * travel + inst.w2 * excess
    return RouteCheck(True, "", travel, excess, cost, tuple(labels))


def station_visits(inst, seq):
    out = {}
    for node in seq:
        if inst.kind[node] == STATION:
            out[node] = out.get(node, 0) + 1
    return out


class Evaluator:
    """check_route with memoisation keyed by the node sequence."""

    def __init__(self, inst, frag_table=None, n_as=None):
        self.inst = inst
        self.frag_table = frag_table
        self.n_as = n_as
        self.cache = {}
        self.hits = 0
        self.misses = 0

    def __call__(self, seq):
        key = tuple(seq)
        chk = self.cache.get(key)
        if chk is None:
            self.misses += 1
            chk = check_route(self.inst, key, self.frag_table, self.n_as)
            self.cache[key] = chk
        else:
            self.hits += 1
        return chk


def solution_cost(inst, routes, evaluator=None):
    """Total weighted cost of a set of routes; None if any is infeasible."""
    check = evaluator if evaluator is not None else \
        (lambda seq: check_route(inst, seq))
    total = 0.0
    for seq in routes:
        chk = check(seq)
        if not chk.feasible:
            return None
        total += chk.cost
    return total
