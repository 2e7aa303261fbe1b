"""Command line interface.

Subcommands: simulate (event-driven flow trace), map-check (closed form
vs simulation, exact), orbits (orbit catalog), scan (parameter-plane
sweep), graph (cell transition check).  Exit codes: 0 success, 1 a
mismatch or inclusion violation was found, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Optional

from .flow import (
    HorizonTooLarge,
    REACH_INTEGER,
    map_F_simulated,
    simulate_flow,
    write_trace_jsonl,
)
from .model import ModelError, Parameters, Scalar, frac, mod1, point3
from .orbits import (
    catalog,
    catalog_json,
    classify_parameters,
    observed_transitions,
)
from .pieces import PIECE_ORDER, apply_F

F = Fraction


def _q(x: Scalar) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_params(args) -> Parameters:
    return Parameters(frac(args.r), frac(args.s))


def _open_out(path: Optional[str]):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    params = _parse_params(args)
    phases = tuple(frac(tok) for tok in args.init.split(","))
    k = args.k if args.k is not None else len(phases)
    if len(phases) != k:
        print(f"error: --init has {len(phases)} phases, expected k={k}", file=sys.stderr)
        return 2
    for a, b in zip(phases, phases[1:]):
        if b < a:
            print("error: initial phases must be nondecreasing", file=sys.stderr)
            return 2
    if phases and phases[-1] - phases[0] > 1:
        print("error: initial phases must span at most one unit", file=sys.stderr)
        return 2
    horizon = frac(args.horizon)
    if horizon < 0:
        print("error: horizon must be nonnegative", file=sys.stderr)
        return 2

    trace = simulate_flow(phases, params, horizon)
    jsonl_to_stdout = args.out is None or args.out == "-"
    stream, close = _open_out(args.out)
    try:
        n = write_trace_jsonl(trace, stream)
    finally:
        if close:
            stream.close()
    # human-readable copy; kept off the JSONL stream
    report = sys.stderr if jsonl_to_stdout else sys.stdout
    print(f"k={k} r={_q(params.r)} s={_q(params.s)} horizon={_q(horizon)} "
          f"events={len(trace.events)} lines={n}", file=report)
    for ev in trace.events:
        print(f"  t={_q(ev.time)} cluster {ev.cluster} {ev.kind}", file=report)
        if ev.kind == REACH_INTEGER:
            section = tuple(sorted(mod1(p) for p in ev.phases))
            pretty = ", ".join(_q(x) for x in section)
            print(f"  return t={_q(ev.time)} section ({pretty})", file=report)
    fin = trace.final
    pretty = ", ".join(_q(mod1(p)) for p in fin.phases)
    print(f"  final t={_q(fin.time)} phases mod 1 ({pretty})", file=report)
    return 0


# ---------------------------------------------------------------------------
# map-check


def _triangle_sample(rng: random.Random, denom: int):
    a = F(rng.randint(0, denom), denom)
    b = F(rng.randint(0, denom), denom)
    return (a, b) if a <= b else (b, a)


def cmd_map_check(args) -> int:
    params = _parse_params(args)
    params.require_wedge()
    rng = random.Random(args.seed)
    started = time.perf_counter()
    mismatches = 0
    witness = None
    for _ in range(args.samples):
        x1, x2 = _triangle_sample(rng, 720)
        p = point3(x1, x2)
        closed, t_closed, _ = apply_F(p, params)
        simulated, t_sim, _ = map_F_simulated(p, params)
        if closed.coords != simulated.coords or t_closed != t_sim:
            mismatches += 1
            if witness is None:
                witness = (p, closed, t_closed, simulated, t_sim)
    elapsed = time.perf_counter() - started
    region = classify_parameters(params)
    report = {
        "r": _q(params.r),
        "s": _q(params.s),
        "region_index": region.index,
        "samples": args.samples,
        "seed": args.seed,
        "mismatches": mismatches,
        "max_deviation": "0/1" if mismatches == 0 else "nonzero",
        "elapsed_seconds": round(elapsed, 3),
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    print(f"map-check r={_q(params.r)} s={_q(params.s)}: "
          f"{mismatches} mismatches in {args.samples} samples "
          f"({elapsed:.2f}s)")
    if mismatches:
        p, closed, tc, simulated, ts = witness
        print("witness point:", tuple(map(_q, p.coords)), file=sys.stderr)
        print("closed form image:", tuple(map(_q, closed.coords)), f"t1={_q(tc)}",
              file=sys.stderr)
        print("simulated image:", tuple(map(_q, simulated.coords)), f"t1={_q(ts)}",
              file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# orbits


def cmd_orbits(args) -> int:
    params = _parse_params(args)
    params.require_wedge()
    result = catalog(params)
    region = classify_parameters(params)
    print(f"(r, s) = ({_q(params.r)}, {_q(params.s)}): parameter band {region.index}, "
          f"{region.description}")
    for rec in result.records:
        pts = "; ".join(f"({_q(a)}, {_q(b)})" for a, b in rec.points)
        print(f"  {rec.name} [{'-'.join(rec.code)}] {rec.kind} {rec.stability}: {pts}")
        if rec.notes:
            print(f"      {rec.notes}")
    for name, why in result.skipped:
        print(f"  - {name}: {why}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(catalog_json(result, params), fh, indent=2)
            fh.write("\n")
    return 0


# ---------------------------------------------------------------------------
# scan

SCAN_S_HIGH = F(3, 10)
SCAN_COLUMNS = ("r", "s", "region_index", "n_sources", "has_neutral_triangle", "notes")


def _scan_cell(r: Scalar, s: Scalar) -> tuple:
    try:
        region = classify_parameters(Parameters(r, s))
    except ModelError:
        return (_q(r), _q(s), "", "", "", "OutsideStudiedWedge")
    return (_q(r), _q(s), region.index, region.n_sources,
            int(region.has_neutral_triangle), "")


def _scan_row(job: tuple[int, int, int]) -> list[tuple]:
    j, nr, ns = job
    s = SCAN_S_HIGH * (2 * j + 1) / (2 * ns)
    return [_scan_cell(F(2 * i + 1, 2 * nr), s) for i in range(nr)]


def _worker_count(rows: int) -> int:
    limit = os.cpu_count() or 1
    env = os.environ.get("CYCLECLUST_THREADS")
    if env:
        try:
            limit = min(limit, max(1, int(env)))
        except ValueError:
            pass
    return max(1, min(limit, rows))


def cmd_scan(args) -> int:
    try:
        nr, ns = (int(tok) for tok in args.grid.lower().split("x"))
    except ValueError:
        print(f"error: --grid expects COLSxROWS, got {args.grid!r}", file=sys.stderr)
        return 2
    if nr <= 0 or ns <= 0:
        print("error: grid dimensions must be positive", file=sys.stderr)
        return 2
    jobs = [(j, nr, ns) for j in range(ns)]
    workers = _worker_count(ns)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_row, jobs, chunksize=max(1, ns // (4 * workers))))
    else:
        rows = [_scan_row(job) for job in jobs]

    stream, close = _open_out(args.out)
    try:
        if args.format == "csv":
            stream.write(f"# wedge scan, {nr}x{ns} cell midpoints over "
                         f"r in (0,1), s in (0,{SCAN_S_HIGH}); rationals as p/q\n")
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(SCAN_COLUMNS)
            for row in rows:
                writer.writerows(row)
        else:
            payload = {
                "grid": {"r_cells": nr, "s_cells": ns,
                         "r_range": ["0/1", "1/1"],
                         "s_range": ["0/1", _q(SCAN_S_HIGH)]},
                "columns": list(SCAN_COLUMNS),
                "cells": [list(cell) for row in rows for cell in row],
            }
            json.dump(payload, stream, indent=2)
            stream.write("\n")
    finally:
        if close:
            stream.close()
    print(f"scan {nr}x{ns} done ({nr * ns} cells)", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# graph


def cmd_graph(args) -> int:
    params = _parse_params(args)
    params.require_subcase_a()
    adjacency, violations = observed_transitions(
        params, samples_per_region=args.samples, seed=args.seed)
    payload = {
        "r": _q(params.r),
        "s": _q(params.s),
        "samples_per_region": args.samples,
        "seed": args.seed,
        "adjacency": {lab: list(adjacency[lab]) for lab in PIECE_ORDER},
        "violations": [
            {
                "region": v.region,
                "point": [_q(v.point[0]), _q(v.point[1])],
                "image": [_q(v.image[0]), _q(v.image[1])],
                "image_region": v.image_label,
            }
            for v in violations
        ],
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    for lab in PIECE_ORDER:
        print(f"  {lab} -> {', '.join(adjacency[lab])}")
    if violations:
        print(f"{len(violations)} inclusion violations", file=sys.stderr)
        for v in violations[:10]:
            print(f"  cell {v.region} point ({_q(v.point[0])}, {_q(v.point[1])}) "
                  f"-> ({_q(v.image[0])}, {_q(v.image[1])}) lands in {v.image_label}",
                  file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cycleclust",
        description="Exact return-map analysis of clustered phase oscillators "
                    "with a positive feedback window.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_params(p):
        p.add_argument("--r", required=True, help="feedback threshold, p/q or decimal")
        p.add_argument("--s", required=True, help="signalling width, p/q or decimal")

    p = sub.add_parser("simulate", help="event-driven flow trace")
    add_params(p)
    p.add_argument("--k", type=int, default=None, help="cluster count (default: len of --init)")
    p.add_argument("--init", required=True, help="comma-separated initial phases")
    p.add_argument("--horizon", required=True, help="time horizon, p/q or decimal")
    p.add_argument("--out", default=None, help="JSONL trace file (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("map-check", help="closed form vs simulation, exact equality")
    add_params(p)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="JSON report file")
    p.set_defaults(func=cmd_map_check)

    p = sub.add_parser("orbits", help="orbit catalog at one parameter point")
    add_params(p)
    p.add_argument("--out", default=None, help="JSON catalog file")
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("scan", help="parameter-plane region sweep")
    p.add_argument("--grid", default="200x200", help="COLSxROWS over r in (0,1), s in (0,0.3)")
    p.add_argument("--seed", type=int, default=0, help="accepted for interface symmetry")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("graph", help="cell transition graph and inclusion check")
    add_params(p)
    p.add_argument("--samples", type=int, default=200, help="samples per cell")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="adjacency JSON file")
    p.set_defaults(func=cmd_graph)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except (ModelError, HorizonTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
