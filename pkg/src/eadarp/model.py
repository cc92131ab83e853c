"""Core data types, instance parsing/emission, synthetic generation, validation.

All battery quantities are stored internally as time-equivalents: the arc
matrix ``h`` holds minutes-of-recharge needed to replace the energy spent on
the arc, and ``H`` is the zero-to-full recharge duration.  Raw energy (the
``b`` matrix, battery capacity ``Q``) only appears in instance files.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass, replace

PICKUP = "pickup"
DROPOFF = "dropoff"
ORIGIN = "origin"
DESTINATION = "destination"
STATION = "station"

KINDS = (PICKUP, DROPOFF, ORIGIN, DESTINATION, STATION)


class InstanceError(ValueError):
    """Malformed instance text; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Node:
    id: int
    kind: str
    x: float
    y: float
    s: float  # service duration, minutes
    q: int    # load change, passengers (signed)
    e: float  # earliest service start
    l: float  # latest service start
    m: float = 0.0  # maximum ride time (pickups only)


class Instance:
    """Immutable problem datum.  Safe to share across concurrent searches.

    Node ids are 1-based and blocked: pickups 1..n, dropoffs n+1..2n,
    then origins, destinations, stations.
    """

    def __init__(self, nodes, K, capacities, Q, alpha, beta, gamma,
                 T_p, w1, w2, travel=None):
        self.nodes = tuple(nodes)
        self.K = K
        self.capacities = tuple(capacities)
        self.Q = Q
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.T_p = T_p
        self.w1 = w1
        self.w2 = w2
        self.H = Q / alpha

        self.n = sum(1 for nd in nodes if nd.kind == PICKUP)
        V = len(nodes)
        self.num_nodes = V
        self.pickups = tuple(nd.id for nd in nodes if nd.kind == PICKUP)
        self.dropoffs = tuple(nd.id for nd in nodes if nd.kind == DROPOFF)
        self.origins = tuple(nd.id for nd in nodes if nd.kind == ORIGIN)
        self.destinations = tuple(nd.id for nd in nodes
                                  if nd.kind == DESTINATION)
        self.stations = tuple(nd.id for nd in nodes if nd.kind == STATION)

        # id-indexed attribute arrays (index 0 unused)
        self.kind = [None] + [nd.kind for nd in nodes]
        self.e = [0.0] + [nd.e for nd in nodes]
        self.l = [0.0] + [nd.l for nd in nodes]
        self.s = [0.0] + [nd.s for nd in nodes]
        self.q = [0] + [nd.q for nd in nodes]
        self.m = [0.0] + [nd.m for nd in nodes]
        self.xy = [(0.0, 0.0)] + [(nd.x, nd.y) for nd in nodes]

        self.explicit_travel = travel is not None
        if travel is None:
            travel = [[0.0] * (V + 1) for _ in range(V + 1)]
            for a in nodes:
                ax, ay = a.x, a.y
                row = travel[a.id]
                for b in nodes:
                    row[b.id] = math.hypot(ax - b.x, ay - b.y)
        self.t = travel
        rate = beta / alpha
        self.h = [[v * rate for v in row] for row in travel]

    # -- helpers -----------------------------------------------------------

    def partner(self, i):
        """Matching dropoff of a pickup, or vice versa."""
        return i + self.n if i <= self.n else i - self.n

    def is_user(self, i):
        return 1 <= i <= 2 * self.n

    def max_capacity(self):
        return max(self.capacities)

    def with_gamma(self, gamma):
        """Copy of this instance with a different final-charge fraction."""
        return Instance(self.nodes, self.K, self.capacities, self.Q,
                        self.alpha, self.beta, gamma, self.T_p,
                        self.w1, self.w2, travel=self.t)

    def with_nodes(self, nodes):
        """Copy of this instance with replaced node attributes."""
        return Instance(nodes, self.K, self.capacities, self.Q, self.alpha,
                        self.beta, self.gamma, self.T_p, self.w1, self.w2,
                        travel=self.t)


@dataclass(frozen=True)
class Route:
    vehicle: int
    seq: tuple


@dataclass
class Solution:
    routes: list          # one Route per vehicle
    unserved: set
    cost: float = 0.0


# -- parsing ---------------------------------------------------------------
#
# Text format (normative for this repo):
#   line 1: K n |S| |F| T_p
#   line 2: Q alpha beta gamma w1 w2
#   line 3 (optional): "C c_1 ... c_K" per-vehicle capacities (default 3)
#   one line per node: id kind x y s q e l m       (m is 0 except pickups)
#   optional: a line "MATRIX" followed by a full travel-time matrix,
#   one row per node, overriding Euclidean distances.

def parse_instance(text):
    """Parse instance text (or the contents of a path-like/file argument)."""
    if hasattr(text, "read"):
        text = text.read()
    elif "\n" not in text and not text.strip().startswith("#"):
        with open(text) as fh:
            text = fh.read()
    lines = text.splitlines()
    rows = [(i + 1, ln.strip()) for i, ln in enumerate(lines)
            if ln.strip() and not ln.strip().startswith("#")]
    if len(rows) < 2:
        raise InstanceError("missing header lines")

    lno, header = rows[0]
    parts = header.split()
    if len(parts) != 5:
        raise InstanceError("header must be 'K n |S| |F| T_p'", lno)
    try:
        K, n, nS, nF = (int(v) for v in parts[:4])
        T_p = float(parts[4])
    except ValueError:
        raise InstanceError("non-numeric header field", lno)
    if K < 1 or n < 1:
        raise InstanceError("K and n must be positive", lno)

    lno, params = rows[1]
    parts = params.split()
    if len(parts) != 6:
        raise InstanceError("parameter line must be 'Q alpha beta gamma w1 w2'", lno)
    try:
        Q, alpha, beta, gamma, w1, w2 = (float(v) for v in parts)
    except ValueError:
        raise InstanceError("non-numeric parameter field", lno)

    body = rows[2:]
    capacities = [3] * K
    if body and body[0][1].split()[0] == "C":
        lno, cline = body[0]
        vals = cline.split()[1:]
        if len(vals) != K:
            raise InstanceError(f"expected {K} capacities", lno)
        capacities = [int(v) for v in vals]
        body = body[1:]

    total = 2 * n + K + nF + nS
    if len(body) < total:
        raise InstanceError(f"expected {total} node lines, found {len(body)}")

    expect = ([PICKUP] * n + [DROPOFF] * n + [ORIGIN] * K
              + [DESTINATION] * nF + [STATION] * nS)
    nodes = []
    for idx in range(total):
        lno, ln = body[idx]
        f = ln.split()
        if len(f) != 9:
            raise InstanceError("node line needs 9 fields: id kind x y s q e l m", lno)
        try:
            nid = int(f[0])
            kind = f[1]
            x, y, s = float(f[2]), float(f[3]), float(f[4])
            q = int(f[5])
            e, l, m = float(f[6]), float(f[7]), float(f[8])
        except ValueError:
            raise InstanceError("non-numeric node field", lno)
        if nid != idx + 1:
            raise InstanceError(f"node id {nid} out of order (expected {idx + 1})", lno)
        if kind not in KINDS:
            raise InstanceError(f"unknown node kind '{kind}'", lno)
        if kind != expect[idx]:
            raise InstanceError(
                f"node {nid} has kind '{kind}', expected '{expect[idx]}' "
                "(order: pickups, dropoffs, origins, destinations, stations)", lno)
        nodes.append(Node(nid, kind, x, y, s, q, e, l, m))

    for i in range(n):
        p, d = nodes[i], nodes[n + i]
        if d.q != -p.q:
            raise InstanceError(
                f"dropoff {d.id} load {d.q} does not pair pickup {p.id} "
                f"(expected {-p.q})", body[n + i][0])

    travel = None
    rest = body[total:]
    if rest:
        lno, tag = rest[0]
        if tag != "MATRIX":
            raise InstanceError("unexpected trailing content (did you mean 'MATRIX'?)", lno)
        if len(rest) - 1 != total:
            raise InstanceError(f"matrix block needs {total} rows", lno)
        travel = [[0.0] * (total + 1) for _ in range(total + 1)]
        for r in range(total):
            lno, ln = rest[1 + r]
            vals = ln.split()
            if len(vals) != total:
                raise InstanceError(f"matrix row needs {total} entries", lno)
            for c in range(total):
                travel[r + 1][c + 1] = float(vals[c])

    return Instance(nodes, K, capacities, Q, alpha, beta, gamma, T_p, w1, w2,
                    travel=travel)


def emit_instance(inst, explicit_matrix=False):
    """Serialize an Instance in the text format accepted by parse_instance."""
    out = []
    out.append(f"{inst.K} {inst.n} {len(inst.stations)} "
               f"{len(inst.destinations)} {inst.T_p!r}")
    out.append(f"{inst.Q!r} {inst.alpha!r} {inst.beta!r} {inst.gamma!r} "
               f"{inst.w1!r} {inst.w2!r}")
    out.append("C " + " ".join(str(c) for c in inst.capacities))
    for nd in inst.nodes:
        out.append(f"{nd.id} {nd.kind} {nd.x!r} {nd.y!r} {nd.s!r} {nd.q} "
                   f"{nd.e!r} {nd.l!r} {nd.m!r}")
    if explicit_matrix:
        out.append("MATRIX")
        V = inst.num_nodes
        for i in range(1, V + 1):
            out.append(" ".join(repr(inst.t[i][j]) for j in range(1, V + 1)))
    return "\n".join(out) + "\n"


# -- synthetic generation --------------------------------------------------

def generate_instance(K, n, num_stations=1, num_destinations=None,
                      horizon=600.0, gamma=0.4, seed=0, capacity=3,
                      max_ride=30.0, area=5.0, window=15.0,
                      alpha=0.055, beta=0.055, Q=14.85, service=1.0,
                      w1=0.75, w2=0.25):
    """Deterministic synthetic instance on a square of half-side ``area``.

    Time windows follow the standard DARP convention: outbound requests get
    the tight window on the pickup, inbound requests on the dropoff.
    """
    if K < 1 or n < 1:
        raise ValueError("K and n must be >= 1")
    if num_destinations is None:
        num_destinations = K
    if num_destinations < K:
        warnings.warn("num_destinations clamped to K")
        num_destinations = K
    if num_stations < 0:
        warnings.warn("num_stations clamped to 0")
        num_stations = 0
    if not 0.0 <= gamma <= 1.0:
        warnings.warn("gamma clamped to [0, 1]")
        gamma = min(1.0, max(0.0, gamma))

    rng = random.Random(seed)

    def pt():
        return (rng.uniform(-area, area), rng.uniform(-area, area))

    coords = [pt() for _ in range(2 * n + K + num_destinations + num_stations)]
    nodes = []
    lo, hi = 0.1 * horizon, 0.7 * horizon
    for i in range(n):
        px, py = coords[i]
        dx, dy = coords[n + i]
        direct = math.hypot(px - dx, py - dy)
        ride = max(max_ride, direct + 2.0 * service + 10.0)
        start = rng.uniform(lo, hi)
        if rng.random() < 0.5:  # outbound: tight pickup window
            pe, pl = start, start + window
            de, dl = 0.0, horizon
        else:                   # inbound: tight dropoff window
            pe, pl = 0.0, horizon
            de, dl = start, start + window
        nodes.append(Node(i + 1, PICKUP, px, py, service, 1, pe, pl, ride))
        nodes.append(Node(n + i + 1, DROPOFF, dx, dy, service, -1, de, dl, 0.0))
    nodes.sort(key=lambda nd: nd.id)

    nid = 2 * n
    for _ in range(K):
        x, y = coords[nid]
        nid += 1
        nodes.append(Node(nid, ORIGIN, x, y, 0.0, 0, 0.0, horizon))
    for _ in range(num_destinations):
        x, y = coords[nid]
        nid += 1
        nodes.append(Node(nid, DESTINATION, x, y, 0.0, 0, 0.0, horizon))
    for _ in range(num_stations):
        x, y = coords[nid]
        nid += 1
        nodes.append(Node(nid, STATION, x, y, 0.0, 0, 0.0, horizon))

    return Instance(nodes, K, [capacity] * K, Q, alpha, beta, gamma,
                    horizon, w1, w2)


# -- validation ------------------------------------------------------------

def validate_instance(inst, check_triangle=True):
    """Structural diagnostics; empty list iff all invariants hold."""
    diags = []
    n = inst.n
    for nd in inst.nodes:
        if nd.e > nd.l + 1e-9:
            diags.append(f"node {nd.id}: e {nd.e} > l {nd.l}")
        if nd.kind == PICKUP and nd.q <= 0:
            diags.append(f"pickup {nd.id}: load {nd.q} not positive")
        if nd.kind == DROPOFF and nd.q >= 0:
            diags.append(f"dropoff {nd.id}: load {nd.q} not negative")
        if nd.kind in (ORIGIN, DESTINATION, STATION) and (nd.q != 0 or nd.s != 0):
            diags.append(f"node {nd.id} ({nd.kind}): q and s must be zero")
    for i in range(1, n + 1):
        if inst.q[i + n] != -inst.q[i]:
            diags.append(f"request {i}: dropoff load {inst.q[i + n]} != {-inst.q[i]}")
    if len(inst.origins) != inst.K:
        diags.append(f"origin depot count {len(inst.origins)} != K {inst.K}")
    if len(inst.destinations) < inst.K:
        diags.append(f"destination depot count {len(inst.destinations)} < K")
    if not 0.0 <= inst.gamma <= 1.0:
        diags.append(f"gamma {inst.gamma} outside [0, 1]")
    if abs(inst.w1 + inst.w2 - 1.0) > 1e-9:
        diags.append(f"w1 + w2 = {inst.w1 + inst.w2} != 1")
    if abs(inst.H - inst.Q / inst.alpha) > 1e-9:
        diags.append("H != Q / alpha")
    rate = inst.beta / inst.alpha
    V = inst.num_nodes
    for i in range(1, V + 1):
        for j in range(1, V + 1):
            if abs(inst.h[i][j] - inst.t[i][j] * rate) > 1e-9:
                diags.append(f"h[{i}][{j}] inconsistent with beta/alpha * t")
    if check_triangle:
        t = inst.t
        for i in range(1, V + 1):
            ti = t[i]
            for k in range(1, V + 1):
                tik = ti[k]
                for j in range(1, V + 1):
                    if ti[j] > tik + t[k][j] + 1e-9:
                        diags.append(
                            f"triangle inequality violated at ({i},{k},{j})")
    return diags
