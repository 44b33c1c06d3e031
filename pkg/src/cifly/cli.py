"""Command-line interface: reach, the algorithm suite, and a benchmark
harness.

Exit codes: 0 on success, 1 on input errors (unreadable files, parse or
validation failures), 2 on usage errors.  Structured output is JSON on
stdout with sorted keys and sorted node lists, so results for fixed
inputs and seeds are byte-stable; ``--report`` wraps the payload with
the command echo, input digests and the wall time, which is naturally
not byte-stable.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from . import causal, oracle, reductions
from .engine import reach, reach_states
from .errors import CiflyError, UnknownAlgoError
from .graph import (
    ADMG_SIGNATURE,
    CPDAG_SIGNATURE,
    DAG_SIGNATURE,
    Graph,
    SetAssignment,
    graph_from_json,
    graph_to_json,
)
from .ruletable import RuleTable, parse_rule_table

_SIGNATURES = {
    "dag": DAG_SIGNATURE,
    "admg": ADMG_SIGNATURE,
    "cpdag": CPDAG_SIGNATURE,
}


def _dump(obj, pretty: bool) -> str:
    if pretty:
        return json.dumps(obj, sort_keys=True, indent=2) + "\n"
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _read_json(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _resolve_table(spec: str) -> tuple[str, str]:
    """Resolve a table argument to (text, digest-source-name).

    Tries the literal path, then the CIFLY_TABLE_PATH root, then the
    bundled catalog names.
    """
    path = Path(spec)
    if path.is_file():
        return path.read_text(encoding="utf-8"), str(path)
    root = os.environ.get("CIFLY_TABLE_PATH")
    if root:
        candidate = Path(root) / spec
        if candidate.is_file():
            return candidate.read_text(encoding="utf-8"), str(candidate)
    if spec in causal.TABLE_CATALOG:
        return causal.table_text(spec), f"catalog:{spec}"
    raise CiflyError(f"cannot find rule table {spec!r}")


def _load_table(spec: str) -> tuple[RuleTable, str]:
    text, name = _resolve_table(spec)
    return parse_rule_table(text), hashlib.sha256(text.encode()).hexdigest()


def _load_graph(path: str, signature) -> tuple[Graph, Optional[list[str]], str]:
    obj = _read_json(path)
    graph, labels = graph_from_json(obj, signature)
    digest = hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()
    return graph, labels, digest


def _node_list(text: Optional[str]) -> list[int]:
    if text is None or not text.strip():
        return []
    return [int(part) for part in text.split(",")]


def _result_nodes(nodes, labels: Optional[list[str]]) -> dict:
    ordered = sorted(int(v) for v in nodes)
    payload: dict = {"result": ordered}
    if labels is not None:
        payload["names"] = [labels[v] for v in ordered]
    return payload


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_reach(args) -> dict:
    table, table_digest = _load_table(args.table)
    graph, labels, graph_digest = _load_graph(args.graph, table.signature)
    sets_obj = _read_json(args.sets)
    sets = {key: [value] if isinstance(value, int) else list(value)
            for key, value in sets_obj.items()}
    assignment = SetAssignment(graph.p, sets)
    payload = _result_nodes(reach(graph, assignment, table), labels)
    if args.states:
        states = sorted(
            (state.node, state.neighbor_type) if state.color is None
            else (state.node, state.neighbor_type, state.color)
            for state in reach_states(graph, assignment, table))
        payload["states"] = [list(state) for state in states]
    payload["_digests"] = {"graph": graph_digest, "table": table_digest}
    return payload


def _cmd_algo(args) -> dict:
    kind = args.subcommand
    if kind == "dsep":
        graph, _, _ = _load_graph(args.graph, ADMG_SIGNATURE)
        return {"result": causal.test_dsep(graph, _node_list(args.X),
                                           _node_list(args.Y), _node_list(args.Z))}
    if kind == "adjust":
        graph, _, _ = _load_graph(args.graph, CPDAG_SIGNATURE)
        return {"result": causal.adjustment_check_cpdag(
            graph, _node_list(args.X), _node_list(args.Y), _node_list(args.W))}
    if kind == "parent-aid":
        g_true, _, _ = _load_graph(args.true, CPDAG_SIGNATURE)
        g_guess, _, _ = _load_graph(args.guess, CPDAG_SIGNATURE)
        return {"result": causal.parent_aid(g_true, g_guess, threads=args.threads)}
    if kind == "iv-verify":
        graph, _, _ = _load_graph(args.graph, ADMG_SIGNATURE)
        return {"result": sorted(causal.iv_verify_all(
            graph, args.x, _node_list(args.Z), _node_list(args.W)))}
    if kind == "iv-optimal":
        graph, _, _ = _load_graph(args.graph, ADMG_SIGNATURE)
        result = causal.iv_optimal(graph, args.x, args.y)
        if result is None:
            return {"result": None}
        return {"Z": sorted(result.Z), "W": sorted(result.W),
                "optimal": result.graphically_optimal}
    if kind == "iv-find":
        graph, _, _ = _load_graph(args.graph, ADMG_SIGNATURE)
        hits = causal.iv_find(graph, args.x, args.y, exhaustive=args.exhaustive)
        return {"result": [{"z": z, "W": sorted(W)} for z, W in hits]}
    if kind == "moralize":
        graph, labels, _ = _load_graph(args.graph, DAG_SIGNATURE)
        return graph_to_json(reductions.moralize(graph), labels)
    if kind == "tc":
        graph, labels, _ = _load_graph(args.graph, DAG_SIGNATURE)
        return graph_to_json(reductions.transitive_closure(graph), labels)
    if kind == "project":
        graph, labels, _ = _load_graph(args.graph, DAG_SIGNATURE)
        projected = reductions.latent_projection(graph, _node_list(args.latent))
        return graph_to_json(projected, labels)
    raise UnknownAlgoError(f"unknown algorithm {kind!r}")


def _bench_instance(algo: str, p: int, deg: float, seed: int):
    """One benchmark instance plus the closure that runs the algorithm."""
    rng = np.random.default_rng(seed ^ 0x5EED)

    def pick(k: int, exclude=()) -> list[int]:
        pool = [v for v in range(p) if v not in exclude]
        return [int(v) for v in rng.choice(len(pool), size=min(k, len(pool)),
                                           replace=False)]

    if algo in ("reach", "dsep"):
        base = oracle.random_instance(oracle.GenConfig(p, deg, seed, "dag"))
        graph = causal.admg(p, base.edges["-->"])
        x = pick(1)
        z = pick(5, exclude=set(x))
        if algo == "reach":
            table = causal.table("admg_dsep")
            return lambda: reach(graph, {"X": x, "Z": z}, table)
        y = pick(1, exclude=set(x) | set(z))
        return lambda: causal.test_dsep(graph, x, y, z)
    if algo == "adjust":
        graph = oracle.random_instance(oracle.GenConfig(p, deg, seed, "cpdag"))
        x = pick(1)
        y = pick(1, exclude=set(x))
        w = pick(5, exclude=set(x) | set(y))
        return lambda: causal.adjustment_check_cpdag(graph, x, y, w)
    if algo == "parent-aid":
        g_true = oracle.random_instance(oracle.GenConfig(p, deg, seed, "cpdag"))
        g_guess = oracle.random_instance(oracle.GenConfig(p, deg, seed + 1, "cpdag"))
        return lambda: causal.parent_aid(g_true, g_guess)
    if algo in ("iv-verify", "iv-optimal", "iv-find"):
        graph = oracle.random_instance(oracle.GenConfig(p, deg, seed, "admg"))
        x = pick(1)[0]
        if algo == "iv-verify":
            z = pick(2, exclude={x})
            w = pick(3, exclude={x} | set(z))
            return lambda: causal.iv_verify_all(graph, x, z, w)
        y = pick(1, exclude={x})[0]
        if algo == "iv-optimal":
            return lambda: causal.iv_optimal(graph, x, y)
        return lambda: causal.iv_find(graph, x, y)
    raise UnknownAlgoError(f"unknown benchmark algorithm {algo!r}")


def _cmd_bench(args) -> dict:
    runs = [_bench_instance(args.algo, args.p, args.deg, args.seed + i)
            for i in range(args.reps)]
    runs[0]()  # warm-up excluded from timing (JIT compilation, caches)

    def timed(run) -> float:
        start = time.perf_counter()
        run()
        return time.perf_counter() - start

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            times = list(pool.map(timed, runs))
    else:
        times = [timed(run) for run in runs]
    return {
        "algo": args.algo,
        "p": args.p,
        "deg": args.deg,
        "reps": args.reps,
        "seed": args.seed,
        "threads": args.threads,
        "mean_s": statistics.fmean(times),
        "median_s": statistics.median(times),
    }


# ---------------------------------------------------------------------------
# Argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cifly",
        description="Rule-table reachability and the causal algorithm suite")
    parser.add_argument("--pretty", action="store_true",
                        help="indent the JSON output")
    sub = parser.add_subparsers(dest="command", required=True)

    p_reach = sub.add_parser("reach", help="run one rule-table reduction")
    p_reach.add_argument("--graph", required=True)
    p_reach.add_argument("--sets", required=True)
    p_reach.add_argument("--table", required=True)
    p_reach.add_argument("--states", action="store_true",
                         help="also list the visited states")
    p_reach.add_argument("--report", action="store_true",
                         help="wrap the payload in a run report")

    p_algo = sub.add_parser("algo", help="run a composite algorithm")
    algo_sub = p_algo.add_subparsers(dest="subcommand", required=True)

    def algo_parser(name: str, **flags):
        sp = algo_sub.add_parser(name)
        sp.add_argument("--report", action="store_true")
        for flag, kwargs in flags.items():
            sp.add_argument(f"--{flag}", **kwargs)
        return sp

    algo_parser("dsep", graph={"required": True}, X={"required": True},
                Y={"required": True}, Z={"default": ""})
    algo_parser("adjust", graph={"required": True}, X={"required": True},
                Y={"required": True}, W={"default": ""})
    algo_parser("parent-aid", true={"required": True}, guess={"required": True},
                threads={"type": int, "default": 1})
    algo_parser("iv-verify", graph={"required": True},
                x={"type": int, "required": True},
                Z={"required": True}, W={"default": ""})
    algo_parser("iv-optimal", graph={"required": True},
                x={"type": int, "required": True}, y={"type": int, "required": True})
    iv_find = algo_parser("iv-find", graph={"required": True},
                          x={"type": int, "required": True},
                          y={"type": int, "required": True})
    iv_find.add_argument("--exhaustive", action="store_true")
    algo_parser("moralize", graph={"required": True})
    algo_parser("tc", graph={"required": True})
    algo_parser("project", graph={"required": True}, latent={"default": ""})

    p_bench = sub.add_parser("bench", help="time an algorithm on random instances")
    p_bench.add_argument("--algo", required=True)
    p_bench.add_argument("--p", type=int, required=True)
    p_bench.add_argument("--deg", type=float, default=4.0)
    p_bench.add_argument("--reps", type=int, required=True)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--threads", type=int, default=1)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "bench" and args.reps < 1:
        parser.error("--reps must be at least 1")

    started = time.perf_counter()
    try:
        if args.command == "reach":
            payload = _cmd_reach(args)
        elif args.command == "algo":
            payload = _cmd_algo(args)
        else:
            payload = _cmd_bench(args)
    except (CiflyError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    digests = payload.pop("_digests", None)
    if getattr(args, "report", False):
        payload = {
            "command": " ".join(sys.argv[1:] if argv is None else argv),
            "digests": digests or {},
            "result": payload,
            "time_us": int((time.perf_counter() - started) * 1e6),
        }
    sys.stdout.write(_dump(payload, args.pretty))
    return 0


if __name__ == "__main__":
    sys.exit(main())
