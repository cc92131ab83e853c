"""Time-window tightening and arc elimination, applied once before search."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .model import DROPOFF, ORIGIN, DESTINATION, PICKUP, STATION


class TriviallyInfeasible(ValueError):
    """A node's window collapsed (e > l) during tightening."""

    def __init__(self, node):
        self.node = node
        super().__init__(f"instance trivially infeasible: node {node} has e > l")


def tighten_time_windows(inst):
    """Tighten windows with the pickup, dropoff, station and depot rules.

    Rules are applied once, in the order pickups, dropoffs, depots,
    stations; windows never widen and a second pass is the identity.
    Raises TriviallyInfeasible when a window collapses.
    """
    n = inst.n
    e = list(inst.e)
    l = list(inst.l)
    t, s, m = inst.t, inst.s, inst.m

    for i in range(1, n + 1):
        d = i + n
        e[i] = max(e[i], e[d] - m[i] - s[i])
        l[i] = min(l[i], l[d] - t[i][d] - s[i])
    for i in range(1, n + 1):
        d = i + n
        e[d] = max(e[d], e[i] + t[i][d] + s[i])
        l[d] = min(l[d], l[i] + m[i] + s[i])
    # Depot rule before station rule: the station rule reads origin windows,
    # so this order makes the single pass idempotent.
    for dep in inst.origins + inst.destinations:
        e[dep] = max(0.0, min(e[j] - t[dep][j] for j in inst.pickups))
        l[dep] = min(l[dep], max(l[j] + s[dep] + t[j][dep]
                                 for j in inst.dropoffs))
    for st in inst.stations:
        e[st] = min(e[j] + t[j][st] for j in inst.origins)
        l[st] = max(inst.T_p - t[st][j] for j in inst.destinations)

    for nd in inst.nodes:
        if e[nd.id] > l[nd.id] + 1e-9:
            raise TriviallyInfeasible(nd.id)

    nodes = [replace(nd, e=e[nd.id], l=l[nd.id]) for nd in inst.nodes]
    return inst.with_nodes(nodes)


@dataclass
class ArcMask:
    allowed: list  # boolean matrix, 1-based like the travel matrix
    feasible: bool = True
    flagged: tuple = ()

    def ok(self, i, j):
        return self.allowed[i][j]


def eliminate_arcs(inst):
    """Remove arcs that cannot appear in any feasible route.

    Rules (standard branch-and-cut preprocessing):
      * loops, dropoff->own pickup;
      * arcs into origin depots, out of destination depots;
      * origin->dropoff, pickup->destination (load profile impossible);
      * pickup->station, station->dropoff (stations need an empty vehicle);
      * time-window incompatibility  e_i + s_i + t_ij > l_j;
      * pickup i -> user j whose minimal continuation to the dropoff of i
        already exceeds the ride-time cap: t_ij + s_j + t_{j,n+i} > m_i,
        and symmetrically user j -> dropoff n+i.
    """
    n = inst.n
    V = inst.num_nodes
    t, s, e, l, m = inst.t, inst.s, inst.e, inst.l, inst.m
    kind = inst.kind
    allowed = [[False] * (V + 1) for _ in range(V + 1)]

    for i in range(1, V + 1):
        ki = kind[i]
        for j in range(1, V + 1):
            if i == j:
                continue
            kj = kind[j]
            if kj == ORIGIN or ki == DESTINATION:
                continue
            if ki == DROPOFF and j == i - n:
                continue
            if ki == ORIGIN and kj == DROPOFF:
                continue
            if ki == PICKUP and kj in (DESTINATION, STATION):
                continue
            if ki == STATION and kj == DROPOFF:
                continue
            if e[i] + s[i] + t[i][j] > l[j] + 1e-9:
                continue
            if ki == PICKUP and kj in (PICKUP, DROPOFF) and j != i + n:
                if t[i][j] + s[j] + t[j][i + n] > m[i] + 1e-9:
                    continue
            if kj == DROPOFF and ki in (PICKUP, DROPOFF) and i != j - n:
                p = j - n
                if t[p][i] + s[i] + t[i][j] > m[p] + 1e-9:
                    continue
            allowed[i][j] = True

    flagged = []
    for i in inst.pickups:
        if not any(allowed[i][j] for j in range(1, V + 1)):
            flagged.append(("no outgoing arc", i))
        if not any(allowed[j][i] for j in range(1, V + 1)):
            flagged.append(("no incoming arc", i))
    return ArcMask(allowed, feasible=not flagged, flagged=tuple(flagged))


def preprocess(inst):
    """Tighten windows, then eliminate arcs."""
    tight = tighten_time_windows(inst)
    return tight, eliminate_arcs(tight)
