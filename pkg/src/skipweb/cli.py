"""Command-line workbench: lemma checks, message benchmarks, builds, stats.

Every run writes ``<command>.csv`` and ``<command>.json`` into ``--out``;
benchmarks also write ``messages.csv`` (one line per simulated message).
Exit codes: 0 success, 2 configuration error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import statistics
import sys

from . import generators
from .core import Kind, Universe, child_rng, conflict_list, halving_oracle
from .errors import ConfigError, InvariantViolation, SkipWebError
from .hosting import congestion, pointer_counts
from .netsim import make_network, messages_csv
from .web import rebuild_equivalent, sw_build

STRUCTURES = {"list": Kind.TOTAL_ORDER, "quadtree": Kind.POINTS, "trie": Kind.STRINGS, "trapmap": Kind.SEGMENTS}

# option name -> (parser, default)
OPTIONS = {
    "structure": (str, "list"),
    "n": (str, "1024"),
    "memory": (int, None),
    "blocking": (str, "arbitrary"),
    "dim": (int, 2),
    "bits": (int, 32),
    "alphabet": (str, "ACGT"),
    "length": (int, 32),
    "adversarial": (lambda v: str(v).lower() in ("1", "true", "yes", "on"), False),
    "seed": (int, 0),
    "trials": (int, 10000),
    "queries": (int, 1000),
    "updates": (int, 1000),
    "input": (str, None),
    "out": (str, "out"),
}


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc)) from exc
    for no, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("%s:%d: expected key = value" % (path, no))
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in OPTIONS:
            raise ConfigError("%s:%d: unknown key %r" % (path, no, key))
        try:
            out[key] = OPTIONS[key][0](value)
        except ValueError as exc:
            raise ConfigError("%s:%d: bad value for %s: %s" % (path, no, key, exc)) from exc
    return out


def resolve_config(args) -> dict:
    cfg = {k: d for k, (_, d) in OPTIONS.items()}
    if args.config:
        cfg.update(read_config(args.config))
    for k in OPTIONS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    if cfg["structure"] not in STRUCTURES:
        raise ConfigError("unknown structure %r" % (cfg["structure"],))
    if cfg["blocking"] not in ("arbitrary", "bucketed"):
        raise ConfigError("unknown blocking %r" % (cfg["blocking"],))
    if cfg["blocking"] == "bucketed" and cfg["structure"] != "list":
        raise ConfigError("bucketed blocking needs --structure list")
    try:
        cfg["sizes"] = [int(v) for v in str(cfg["n"]).split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError("--n must be an integer or a comma-separated list") from exc
    if not cfg["sizes"] or min(cfg["sizes"]) < 1:
        raise ConfigError("--n must be positive")
    for k in ("trials", "queries", "updates", "dim", "bits", "length"):
        if cfg[k] < 0:
            raise ConfigError("--%s must be non-negative" % k)
    return cfg


def make_universe(cfg, n) -> Universe:
    kind = STRUCTURES[cfg["structure"]]
    if kind is Kind.POINTS:
        bits = max(cfg["bits"], n + 1) if cfg["adversarial"] else cfg["bits"]
        return Universe.points(cfg["dim"], bits)
    if kind is Kind.STRINGS:
        return Universe.strings(cfg["alphabet"])
    if kind is Kind.SEGMENTS:
        return Universe.segments()
    return Universe.total_order()


def read_items(cfg, universe: Universe) -> list:
    path = cfg["input"]
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("cannot read input %s: %s" % (path, exc)) from exc
    items = []
    kind = universe.kind
    if kind is Kind.STRINGS:
        return [line.strip() for line in text.splitlines() if line.strip()]
    for no, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or not "".join(row).strip():
            continue
        try:
            vals = [_number(v) for v in row]
        except ValueError:
            raise ConfigError("%s:%d: not a number in %r" % (path, no, row)) from None
        if kind is Kind.TOTAL_ORDER:
            if len(vals) != 1:
                raise ConfigError("%s:%d: expected one key per line" % (path, no))
            items.append(vals[0])
        elif kind is Kind.POINTS:
            if len(vals) != universe.dim:
                raise ConfigError("%s:%d: expected %d coordinates" % (path, no, universe.dim))
            items.append(tuple(vals))
        else:
            if len(vals) != 4:
                raise ConfigError("%s:%d: expected x1,y1,x2,y2" % (path, no))
            items.append(((vals[0], vals[1]), (vals[2], vals[3])))
    return items


def _number(v: str):
    v = v.strip()
    try:
        return int(v)
    except ValueError:
        return float(v)


def ground_set(cfg, n, rng):
    universe = make_universe(cfg, n)
    if cfg["input"]:
        items = read_items(cfg, universe)
    else:
        items = generators.random_items(universe, n, rng, adversarial=cfg["adversarial"], length=cfg["length"])
    return universe, items


def default_memory(cfg, n) -> int:
    return cfg["memory"] if cfg["memory"] else max(1, math.ceil(math.log2(max(n, 2))))


def _fmt(v):
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return "%.6f" % v
    return v


def write_outputs(cfg, command, rows, summary, traces=None):
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    fields = list(rows[0]) if rows else []
    with open(os.path.join(out, command + ".csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fields)
        for r in rows:
            w.writerow([_fmt(r[f]) for f in fields])
    echo = {k: v for k, v in cfg.items() if k != "sizes"}
    with open(os.path.join(out, command + ".json"), "w", encoding="utf-8") as fh:
        json.dump({"command": command, "config": echo, "summary": summary, "rows": rows}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if traces is not None:
        with open(os.path.join(out, "messages.csv"), "w", newline="", encoding="utf-8") as fh:
            fh.write(messages_csv(traces))


# -- commands -----------------------------------------------------------------


def cmd_verify_lemma(cfg) -> dict:
    rows = []
    for n in cfg["sizes"]:
        universe = make_universe(cfg, n)
        rng = child_rng(cfg["seed"], "lemma", cfg["structure"], n)
        qps = 1 if universe.kind is Kind.TOTAL_ORDER else 10
        stats = halving_oracle(universe, n, cfg["trials"], rng, queries_per_sample=qps,
                               adversarial=cfg["adversarial"], length=cfg["length"])
        row = {"structure": cfg["structure"], "n": n, "trials": stats.trials, "samples": stats.samples,
               "mean_conflicts": stats.mean, "max_conflicts": stats.max, "stderr": stats.stderr,
               "mean_occupancy": stats.mean_occupancy}
        if universe.kind is Kind.SEGMENTS:
            matched, total = formula_check(cfg["trials"], child_rng(cfg["seed"], "formula", n), min(n, 64))
            row["formula_matches"] = matched
            row["formula_instances"] = total
        rows.append(row)
    summary = {"max_mean": max(r["mean_conflicts"] for r in rows)}
    if len(rows) > 1:
        means = [r["mean_conflicts"] for r in rows]
        summary["mean_ratio"] = max(means) / min(means)
    write_outputs(cfg, "verify-lemma", rows, summary)
    if any(r.get("formula_matches", 0) != r.get("formula_instances", 0) for r in rows):
        raise InvariantViolation("trapezoid conflict formula disagrees with brute force")
    return summary


def formula_check(instances, rng, max_segments=64):
    """Compare ``1 + a + 2b + 3c`` with brute-force conflict lists."""
    from .trapmap import TrapezoidalMap, trap_conflict_count
    from .core import halve

    universe = Universe.segments()
    matched = 0
    for _ in range(instances):
        n = rng.randrange(2, max_segments + 1)
        segs = generators.random_segments(universe, n, rng)
        sub = sorted(halve(segs, rng)[0])
        big = TrapezoidalMap.build(universe, segs)
        small = TrapezoidalMap.build(universe, sub, validate=False)
        # an instance matches when every trapezoid of the sample agrees
        matched += all(len(conflict_list(small.range(t), big)) == trap_conflict_count(small.range(t), segs).total
                       for t in small.nodes())
    return matched, instances


def _network(cfg, n, rng):
    universe, items = ground_set(cfg, n, rng)
    web = sw_build(universe, items, rng)
    memory = default_memory(cfg, len(items))
    net = make_network(web, cfg["blocking"], memory, rng)
    return universe, web, net, memory


def _host_row(cfg, web, net, memory):
    a = net.assignment
    cong = congestion(a, web)
    return {"structure": cfg["structure"], "blocking": cfg["blocking"], "n": len(web), "M": memory,
            "H": a.hosts, "levels": web.height + 1, "max_memory": a.max_memory(),
            "max_stored": a.max_stored(web), "replicas": a.replica_count(),
            "max_congestion": cong.max, "mean_congestion": cong.mean}


def cmd_bench_query(cfg) -> dict:
    rows, traces = [], []
    for n in cfg["sizes"]:
        rng = child_rng(cfg["seed"], "query", cfg["structure"], cfg["blocking"], n)
        universe, web, net, memory = _network(cfg, n, rng)
        level0 = web.level0
        counts = []
        for _ in range(cfg["queries"]):
            q = generators.random_query(universe, rng, level0)
            origin = rng.randrange(net.assignment.hosts)
            ans, trace = net.route_query(q, origin)
            if ans != level0.locate(q):
                raise InvariantViolation("query %r answered %r, oracle says %r" % (q, ans, level0.locate(q)))
            counts.append(trace.count)
        traces.extend(net.log)
        row = _host_row(cfg, web, net, memory)
        lg = math.log2(max(len(web), 2))
        row.update({"queries": len(counts), "mean_Q": _mean(counts), "max_Q": max(counts, default=0),
                    "Q_per_log2n": _mean(counts) / lg, "Q_per_loglog": _mean(counts) / (lg / math.log2(lg)) if lg > 1 else math.nan})
        rows.append(row)
    summary = {"agreement": 1.0, "mean_Q": {r["n"]: r["mean_Q"] for r in rows}}
    write_outputs(cfg, "bench-query", rows, summary, traces)
    return summary


def cmd_bench_update(cfg) -> dict:
    if cfg["structure"] == "trapmap":
        raise ConfigError("trapezoidal maps do not support updates")
    rows, traces = [], []
    for n in cfg["sizes"]:
        rng = child_rng(cfg["seed"], "update", cfg["structure"], cfg["blocking"], n)
        universe, items = ground_set(cfg, n, rng)
        extra_n = cfg["updates"]
        pool = generators.random_items(universe, len(items) + extra_n, rng,
                                       adversarial=False, length=cfg["length"]) if not cfg["input"] else []
        taken = set(items)
        fresh = [x for x in pool if x not in taken]
        rng.shuffle(fresh)  # pool is sorted; insert in random order
        web = sw_build(universe, items, rng)
        memory = default_memory(cfg, len(items))
        net = make_network(web, cfg["blocking"], memory, rng)
        present = sorted(items)
        ins, dels, rebuilds = [], [], 0
        for _ in range(cfg["updates"]):
            origin = rng.randrange(net.assignment.hosts)
            if present and (not fresh or rng.random() < 0.5):
                x = present.pop(rng.randrange(len(present)))
                report, trace = net.route_update("delete", x, origin)
                dels.append(trace.count)
            else:
                x = fresh.pop()
                report, trace = net.route_update("insert", x, origin, rng)
                present.append(x)
                ins.append(trace.count)
            rebuilds += report.rebuilt
        traces.extend(net.log)
        equivalent = rebuild_equivalent(web)
        row = _host_row(cfg, web, net, memory)
        row["n"] = n
        lg = math.log2(max(n, 2))
        both = ins + dels
        row.update({"updates": len(both), "mean_U": _mean(both), "max_U": max(both, default=0),
                    "mean_insert": _mean(ins), "mean_delete": _mean(dels), "U_per_log2n": _mean(ins) / lg,
                    "rebuilds": rebuilds, "rebuild_equivalent": int(equivalent)})
        rows.append(row)
        if not equivalent:
            write_outputs(cfg, "bench-update", rows, {"rebuild_equivalent": False}, traces)
            raise InvariantViolation("web differs from a rebuild with the recorded bits")
    summary = {"rebuild_equivalent": True, "mean_insert": {r["n"]: r["mean_insert"] for r in rows}}
    write_outputs(cfg, "bench-update", rows, summary, traces)
    return summary


def cmd_build(cfg) -> dict:
    n = cfg["sizes"][0]
    rng = child_rng(cfg["seed"], "build", cfg["structure"], n)
    universe, items = ground_set(cfg, n, rng)
    web = sw_build(universe, items, rng)
    if len(web) <= 512:
        try:
            web.check_hyperlinks()
        except SkipWebError as exc:
            raise InvariantViolation(str(exc)) from exc
    rows = []
    for level in range(web.height + 1):
        keys = [k for k in web.keys() if len(k) == level + 1]
        rows.append({"level": level, "structures": len(keys),
                     "items": sum(len(web.levels[k].items) for k in keys),
                     "elements": sum(len(web.levels[k]) for k in keys),
                     "hyperlinks": sum(len(web.hyperlinks.get((k, e), ())) for k in keys for e in web.levels[k].ranges)})
    tops = web.top_keys()
    summary = {"n": len(web), "height": web.height, "elements": web.element_count(),
               "mean_top_items": statistics.fmean(len(web.levels[k].items) for k in tops)}
    write_outputs(cfg, "build", rows, summary)
    return summary


def cmd_stats(cfg) -> dict:
    n = cfg["sizes"][0]
    rng = child_rng(cfg["seed"], "stats", cfg["structure"], cfg["blocking"], n)
    universe, web, net, memory = _network(cfg, n, rng)
    a = net.assignment
    cong = congestion(a, web)
    ptrs = pointer_counts(a, web)
    stored = a.stored_counts(web)
    rows = [{"host": h, "home": a.memory_of(h), "stored": stored[h], "pointers": ptrs[h],
             "congestion": cong.per_host[h]} for h in a.host_ids()]
    summary = _host_row(cfg, web, net, memory)
    write_outputs(cfg, "stats", rows, summary)
    return summary


def _mean(xs):
    return statistics.fmean(xs) if xs else math.nan


COMMANDS = {
    "verify-lemma": cmd_verify_lemma,
    "bench-query": cmd_bench_query,
    "bench-update": cmd_bench_update,
    "build": cmd_build,
    "stats": cmd_stats,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skipweb", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="key = value file; flags override it")
        s.add_argument("--structure", choices=sorted(STRUCTURES))
        s.add_argument("--n", help="ground-set size, or a comma-separated sweep")
        s.add_argument("--memory", type=int, help="host memory M in elements (default ceil(log2 n))")
        s.add_argument("--blocking", choices=["arbitrary", "bucketed"])
        s.add_argument("--dim", type=int)
        s.add_argument("--bits", type=int, help="quadtree grid is 2**bits per axis")
        s.add_argument("--alphabet")
        s.add_argument("--length", type=int, help="random string length")
        s.add_argument("--adversarial", action="store_const", const=True, default=None,
                       help="deep-chain quadtree input")
        s.add_argument("--seed", type=int)
        s.add_argument("--trials", type=int)
        s.add_argument("--queries", type=int)
        s.add_argument("--updates", type=int)
        s.add_argument("--input", help="newline strings, CSV points or CSV segments")
        s.add_argument("--out", help="output directory")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        cfg = resolve_config(args)
        summary = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print("invariant violated: %s" % exc, file=sys.stderr)
        return 3
    except SkipWebError as exc:
        # bad input data is a configuration problem
        print("error: %s" % exc, file=sys.stderr)
        return 3 if isinstance(exc, RuntimeError) else 2
    print(json.dumps(summary, sort_keys=True, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
