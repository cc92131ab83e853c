"""Command line front end: run repeated searches and report statistics."""

from __future__ import annotations

import argparse
import json
import sys
import time

from .fragments import FragmentTable
from .model import parse_instance
from .preprocess import preprocess
from .search import DAParams, da_search

CSV_COLUMNS = ["instance", "gamma", "n_as", "runs", "BC", "Q1", "AC", "Q3",
               "FeasRatio", "CPU_s"]


def quartiles(values):
    """(best, lower quartile, mean, upper quartile) of a non-empty sample.

    Quartiles interpolate linearly at sorted positions (n-1)/4 and
    3(n-1)/4, so for five runs they are the second and fourth best values.
    """
    vs = sorted(values)
    n = len(vs)

    def at(pos):
        lo = int(pos)
        hi = min(lo + 1, n - 1)
        frac = pos - lo
        return vs[lo] * (1 - frac) + vs[hi] * frac

    return vs[0], at((n - 1) / 4), sum(vs) / n, at(3 * (n - 1) / 4)


def run_experiment(inst, name, n_as=None, runs=5, params=None, seed=0,
                   jobs=1):
    """Solve one instance `runs` times and summarise the outcomes."""
    t0 = time.perf_counter()
    tight, mask = preprocess(inst)
    table = FragmentTable(tight, mask)
    args = [(tight, mask, table, params, n_as, seed + r)
            for r in range(runs)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_one_run, args))
    else:
        results = [_one_run(a) for a in args]
    cpu = time.perf_counter() - t0

    feas = [c for c, u in results if u == 0]
    row = {
        "instance": name,
        "gamma": inst.gamma,
        "n_as": "inf" if n_as is None else n_as,
        "runs": runs,
        "FeasRatio": len(feas) / runs,
        "CPU_s": cpu,
        "fragments": table.stats(),
        "all_costs": [c for c, _ in results],
        "all_unserved": [u for _, u in results],
    }
    if feas:
        bc, q1, ac, q3 = quartiles(feas)
        row.update(BC=bc, Q1=q1, AC=ac, Q3=q3)
    else:
        row.update(BC=None, Q1=None, AC=None, Q3=None)
    return row


def _one_run(args):
    tight, mask, table, params, n_as, seed = args
    res = da_search(tight, mask, table, params, n_as, seed)
    return res.cost, len(res.unserved)


def add_gaps(row, refs):
    """Add percentage gaps to reference best costs, when available."""
    ref = refs.get(row["instance"])
    if isinstance(ref, dict):
        ref = ref.get(str(row["gamma"]), ref.get("%g" % row["gamma"]))
    if ref is None:
        return
    for col in ("BC", "AC"):
        v = row.get(col)
        row["gap_" + col] = None if v is None else (v - ref) / ref * 100.0
    row["ref_BC"] = ref


def format_csv(rows):
    cols = list(CSV_COLUMNS)
    if any("gap_BC" in r for r in rows):
        cols += ["ref_BC", "gap_BC", "gap_AC"]
    out = [",".join(cols)]
    for r in rows:
        cells = []
        for c in cols:
            v = r.get(c)
            if v is None:
                cells.append("NA")
            elif isinstance(v, float):
                cells.append("%.2f" % v)
            else:
                cells.append(str(v))
        out.append(",".join(cells))
    return "\n".join(out) + "\n"


def format_json(rows):
    return json.dumps(rows, indent=2, default=str) + "\n"


def load_config(path):
    """key = value lines; '#' starts a comment; blank lines ignored."""
    opts = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError("%s:%d: expected key=value" % (path, lineno))
            k, v = (x.strip() for x in line.split("=", 1))
            opts[k.replace("-", "_")] = v
    return opts


def parse_n_as(text):
    if text in ("inf", "none", ""):
        return None
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("station visit cap must be >= 1")
    return v


def build_parser():
    ap = argparse.ArgumentParser(
        prog="eadarp",
        description="Annealing local-search solver for electric dial-a-ride "
                    "instances with partial recharging.")
    ap.add_argument("instance", nargs="+", help="instance file(s)")
    ap.add_argument("--config", help="key=value option file (flags win)")
    ap.add_argument("--gamma", type=float,
                    help="override minimum final battery fraction")
    ap.add_argument("--n-as", type=parse_n_as, default=None,
                    help="max visits per station (integer or 'inf')")
    ap.add_argument("--runs", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--iters", type=int, default=10000)
    ap.add_argument("--theta-max", type=float, default=0.9,
                    help="threshold maximum as a fraction of mean arc time")
    ap.add_argument("--theta-red", type=int, default=300)
    ap.add_argument("--n-imp", type=int, default=50)
    ap.add_argument("--jobs", type=int, default=1,
                    help="parallel worker processes for repeated runs")
    ap.add_argument("--refs", help="JSON file of reference best costs "
                                   "{instance: cost | {gamma: cost}}")
    ap.add_argument("--format", choices=["csv", "json"], default="csv")
    ap.add_argument("--out", help="write the report here (default stdout)")
    return ap


def main(argv=None):
    ap = build_parser()
    opts = ap.parse_args(argv)
    if opts.config:
        conf = load_config(opts.config)
        defaults = ap.parse_args(opts.instance)
        for k, v in conf.items():
            if not hasattr(opts, k):
                raise SystemExit("unknown config option: %s" % k)
            if getattr(opts, k) == getattr(defaults, k):
                cur = getattr(defaults, k)
                if k == "n_as":
                    v = parse_n_as(v)
                elif isinstance(cur, bool):
                    v = v.lower() in ("1", "true", "yes")
                elif isinstance(cur, int):
                    v = int(v)
                elif isinstance(cur, float):
                    v = float(v)
                setattr(opts, k, v)

    params = DAParams(theta_factor=opts.theta_max, theta_red=opts.theta_red,
                      n_imp=opts.n_imp, n_iter=opts.iters)
    refs = None
    if opts.refs:
        with open(opts.refs) as fh:
            refs = json.load(fh)

    rows = []
    for path in opts.instance:
        inst = parse_instance(path)
        if opts.gamma is not None:
            inst = inst.with_gamma(opts.gamma)
        name = path.rsplit("/", 1)[-1]
        if name.endswith(".txt"):
            name = name[:-4]
        row = run_experiment(inst, name, opts.n_as, opts.runs, params,
                             opts.seed, opts.jobs)
        if refs:
            add_gaps(row, refs)
        rows.append(row)

    text = format_csv(rows) if opts.format == "csv" else format_json(rows)
    if opts.out:
        with open(opts.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
