"""Enumeration of battery-restricted fragments and their minimum excess ride time.

A fragment is a maximal user-node subsequence that starts with a pickup taken
from an empty vehicle and ends at the dropoff that empties it again.  Because
no recharging can happen while users are on board, the minimum total excess
ride time of a route decomposes into the sum of the per-fragment minima, so
those minima are computed once up front and looked up during search.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .model import DROPOFF, PICKUP
from .simplex import OPTIMAL, solve_lp


@dataclass(frozen=True)
class Fragment:
    seq: tuple          # user node ids, pickup first, emptying dropoff last
    eu_min: float       # minimum total excess ride time over its requests
    duration: float     # total travel + service time along the fragment


def min_excess_single(inst, p):
    """Closed-form minimum excess for a lone request: wait-forced slack only.

    Returns None when even the best schedule violates the ride-time cap.
    """
    d = p + inst.n
    direct = inst.t[p][d]
    eu = max(0.0, inst.e[d] - inst.l[p] - inst.s[p] - direct)
    if eu > inst.m[p] - direct + 1e-9:
        return None
    return eu


def min_excess_lp(inst, seq):
    """Minimum total excess ride time of a user-node sequence, by LP.

    Variables are the service start times plus one excess variable per
    request served inside the sequence.  Returns None if infeasible.
    """
    pos = {node: k for k, node in enumerate(seq)}
    reqs = sorted(p for p in seq if inst.kind[p] == PICKUP)
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
    for node in seq:
        row([(pos[node], 1.0)], inst.l[node])
        row([(pos[node], -1.0)], -inst.e[node])

    c = [0.0] * nvars
    for p in reqs:
        c[rvar[p]] = 1.0
    res = solve_lp(c, A, b)
    if res.status != OPTIMAL:
        return None
    return res.objective


class FragmentTable:
    """All feasible fragments of an instance, keyed by node sequence."""

    def __init__(self, inst, mask=None):
        t0 = time.perf_counter()
        self.inst = inst
        self.frags = {}
        self._extra = {}
        self.n_lp = 0
        self._enumerate(mask)
        self.cpu = time.perf_counter() - t0

    # -- queries -----------------------------------------------------------

    def lookup(self, seq):
        return self.frags.get(tuple(seq))

    def min_excess(self, seq):
        """eu_min for any user-node sequence, cached; None if infeasible.

        Falls back to direct computation for sequences outside the
        enumerated table (arc-pruned or infeasible ones), so callers can
        evaluate arbitrary candidate routes.
        """
        seq = tuple(seq)
        hit = self.frags.get(seq)
        if hit is not None:
            return hit.eu_min
        if seq in self._extra:
            return self._extra[seq]
        eu = (min_excess_single(self.inst, seq[0]) if len(seq) == 2
              else min_excess_lp(self.inst, seq))
        self._extra[seq] = eu
        return eu

    def __len__(self):
        return len(self.frags)

    def stats(self):
        lens = [len(f.seq) for f in self.frags.values()]
        return {
            "N_frag": len(lens),
            "Leg_avg": sum(lens) / len(lens) if lens else 0.0,
            "Leg_max": max(lens) if lens else 0,
            "N_LP": self.n_lp,
            "CPU_s": self.cpu,
        }

    def dump(self):
        out = []
        for seq in sorted(self.frags):
            f = self.frags[seq]
            out.append("%s eu_min=%.6f dur=%.6f"
                       % ("-".join(map(str, seq)), f.eu_min, f.duration))
        return "\n".join(out)

    # -- enumeration -------------------------------------------------------

    def _enumerate(self, mask):
        inst = self.inst
        n = inst.n
        users = inst.pickups + inst.dropoffs
        cap = inst.max_capacity()

        def allowed(i, j):
            return mask is None or mask.ok(i, j)

        def emit(path, dur):
            seq = tuple(path)
            if len(seq) == 2:
                eu = min_excess_single(inst, seq[0])
            else:
                self.n_lp += 1
                eu = min_excess_lp(inst, seq)
            if eu is not None:
                self.frags[seq] = Fragment(seq, eu, dur)

        def extend(path, arrive, load, onboard, energy, dur):
            i = path[-1]
            for j in users:
                if j in path:
                    continue
                if inst.kind[j] == DROPOFF and j - n not in onboard:
                    continue
                if inst.kind[j] == PICKUP and load + inst.q[j] > cap:
                    continue
                if not allowed(i, j):
                    continue
                leg = inst.t[i][j]
                at = max(inst.e[j], arrive + inst.s[i] + leg)
                if at > inst.l[j] + 1e-9:
                    continue
                en = energy + inst.h[i][j]
                if en > inst.H + 1e-9:
                    continue
                nb = dict(onboard)
                bad = False
                for r in nb:
                    nb[r] += inst.s[i] + leg
                    if nb[r] + inst.t[j][r + n] > inst.m[r] + 1e-9:
                        bad = True
                if bad:
                    continue
                path.append(j)
                if inst.kind[j] == DROPOFF:
                    del nb[j - n]
                    if not nb:
                        emit(path, dur + inst.s[i] + leg)
                        path.pop()
                        continue
                else:
                    nb[j] = 0.0
                extend(path, at, load + inst.q[j], nb, en, dur + inst.s[i] + leg)
                path.pop()

        for p in inst.pickups:
            extend([p], inst.e[p], inst.q[p], {p: 0.0}, 0.0, 0.0)
