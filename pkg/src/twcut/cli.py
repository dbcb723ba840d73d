"""Command-line interface: ``twcut <command> ...``.

Exit codes: 0 feasible / check passed, 1 infeasible / check failed,
2 usage, input or resource error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from . import component_dp, general_dp
from .component_dp import ProblemSpec, StateCapExceeded
from .decomposition import DecompositionError, decompose_min_fill, make_nice, parse_td, write_td
from .family import FamilyError, contains_member, load_family
from .graph import (
    Graph,
    GraphFormatError,
    VertexAnnotations,
    components_within_bound,
    delete_edges,
    max_component_metric,
    parse_edge_list,
    parse_edge_values,
    parse_named_edges,
    parse_vertex_values,
)
from .oracle import random_partial_ktree

SCHEMA = 1


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load_graph(path: str) -> Graph:
    return parse_edge_list(_read(path))


def _decomposition(graph: Graph, td_path: str | None):
    if td_path:
        td = parse_td(_read(td_path), graph)
        source = "file"
    else:
        td = decompose_min_fill(graph)
        source = "min-fill"
    return make_nice(td, graph), source


def _annotations(args, graph: Graph) -> VertexAnnotations | None:
    weights = parse_vertex_values(_read(args.weights), graph) if getattr(args, "weights", None) else None
    limits = parse_vertex_values(_read(args.limits), graph) if getattr(args, "limits", None) else None
    costs = parse_edge_values(_read(args.costs), graph) if getattr(args, "costs", None) else None
    if weights is None and limits is None and costs is None:
        return None
    ann = VertexAnnotations(weights, limits, costs)
    ann.check(graph)
    return ann


def _kind_counts(nodes, attr: str) -> dict[str, dict[str, int]]:
    out: dict[str, dict[str, int]] = {}
    for s in nodes:
        row = out.setdefault(s.kind, {"nodes": 0, "max_states": 0, "total_states": 0})
        row["nodes"] += 1
        row["max_states"] = max(row["max_states"], getattr(s, attr))
        row["total_states"] += getattr(s, attr)
    return out


def _optimum(x):
    return None if x == math.inf else int(x)


def _emit(report: dict, as_json: bool, out=None) -> None:
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
        return
    inst = report["instance"]
    out.write(f"graph: n={inst['n']} e={inst['e']} width={inst['width']} ({inst['decomposition']})\n")
    prob = report["problem"]
    out.write("problem: " + " ".join(f"{k}={v}" for k, v in prob.items() if v is not None) + "\n")
    opt = report["optimum"]
    out.write(f"optimum: {'inf' if opt is None else opt}\n")
    out.write(f"feasible: {'yes' if report['feasible'] else 'no'}\n")
    if report.get("witness") is not None:
        out.write(f"witness: {len(report['witness'])} edge(s)\n")
        for u, v in report["witness"]:
            out.write(f"  {u} {v}\n")
    for kind, row in sorted(report["states"].items()):
        out.write(f"states[{kind}]: nodes={row['nodes']} max={row['max_states']} total={row['total_states']}\n")
    out.write(f"time: {report['ms']:.1f} ms\n")


def _total_cost(graph: Graph, ann: VertexAnnotations | None) -> int:
    costs = ann.cost_vector(graph) if ann else None
    return sum(costs) if costs else graph.m


def _write_witness(path: str | None, witness) -> None:
    if path and witness is not None:
        Path(path).write_text("".join(f"{u} {v}\n" for u, v in witness), encoding="utf-8")


def cmd_solve_components(args) -> int:
    start = time.perf_counter()
    graph = _load_graph(args.graph)
    if args.h < 1:
        raise UsageError("--h must be >= 1")
    ann = _annotations(args, graph)
    nd, source = _decomposition(graph, args.td)
    spec = ProblemSpec(args.h, args.k, ann)
    res = component_dp.solve(graph, nd, spec, witness=args.witness, parallel=args.parallel)
    report = {
        "schema": SCHEMA,
        "command": "solve-components",
        "instance": {"n": graph.n, "e": graph.m, "width": nd.width, "decomposition": source},
        "problem": {
            "h": args.h,
            "k": args.k if args.k is not None else _total_cost(graph, ann),
            "weights": bool(ann and ann.weights),
            "limits": bool(ann and ann.limits),
            "costs": bool(ann and ann.edge_costs),
        },
        "optimum": _optimum(res.optimum),
        "feasible": res.feasible,
        "witness": [list(e) for e in res.witness] if res.witness is not None else None,
        "ms": (time.perf_counter() - start) * 1000.0,
        "states": _kind_counts(res.nodes, "valid_states"),
    }
    _write_witness(args.witness_out, res.witness)
    _emit(report, args.json)
    return 0 if res.feasible else 1


def cmd_solve_family(args) -> int:
    start = time.perf_counter()
    graph = _load_graph(args.graph)
    text = args.family if args.family.strip().startswith("@") else _read(args.family)
    family = load_family(text, "induced" if args.induced else None)
    nd, source = _decomposition(graph, args.td)
    res = general_dp.gen_solve(
        graph, nd, family, args.k, witness=args.witness, parallel=args.parallel, cache=not args.no_cache
    )
    report = {
        "schema": SCHEMA,
        "command": "solve-family",
        "instance": {"n": graph.n, "e": graph.m, "width": nd.width, "decomposition": source},
        "problem": {
            "family": args.family.strip() if args.family.strip().startswith("@") else Path(args.family).name,
            "members": len(family),
            "r": family.r,
            "mode": family.mode,
            "k": args.k if args.k is not None else graph.m,
        },
        "optimum": _optimum(res.optimum),
        "feasible": res.feasible,
        "witness": [list(e) for e in res.witness] if res.witness is not None else None,
        "ms": (time.perf_counter() - start) * 1000.0,
        "states": _kind_counts(res.nodes, "states"),
    }
    _write_witness(args.witness_out, res.witness)
    _emit(report, args.json)
    return 0 if res.feasible else 1


def cmd_decompose(args) -> int:
    graph = _load_graph(args.graph)
    td = decompose_min_fill(graph)
    lines = [f"c min-fill width {td.width}"]
    if args.nice:
        nd = make_nice(td, graph)
        counts = nd.kind_counts()
        if len(nd) > 4 * graph.n:
            raise AssertionError(f"nice decomposition has {len(nd)} nodes, more than 4n = {4 * graph.n}")
        lines.append(f"c nice nodes {len(nd)} (limit {4 * graph.n}) " + " ".join(f"{k}={v}" for k, v in counts.items()))
        td = nd
    sys.stdout.write("\n".join(lines) + "\n" + write_td(td, graph))
    return 0


def cmd_verify(args) -> int:
    graph = _load_graph(args.graph)
    deleted = parse_named_edges(_read(args.delete), graph)
    rest = delete_edges(graph, deleted)
    if args.family:
        text = args.family if args.family.strip().startswith("@") else _read(args.family)
        family = load_family(text, "induced" if args.induced else None)
        found, where = contains_member(rest, family)
        ok = not found
        detail = "no forbidden copy" if ok else f"member {where[0]} found at {where[1]}"
    else:
        if args.h is None:
            raise UsageError("verify needs --h or --family")
        ann = _annotations(args, graph)
        w = ann.weight_vector(graph) if ann else None
        lim = ann.limit_vector(graph, args.h) if ann else None
        ok = components_within_bound(rest, args.h, w, lim)
        metric = max_component_metric(rest, ann.weights if ann else None)
        detail = f"max component metric {metric}, bound {args.h}"
    report = {"schema": SCHEMA, "command": "verify", "deleted": len(deleted), "pass": ok, "detail": detail}
    if args.json:
        sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")
    else:
        sys.stdout.write(f"{'PASS' if ok else 'FAIL'}: deleted {len(deleted)} edge(s); {detail}\n")
    return 0 if ok else 1


def _bench_instances(args):
    if args.suite:
        base = Path(args.suite).parent
        for lineno, raw in enumerate(_read(args.suite).splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            opts = {"h": args.h, "k": args.k}
            for tok in tokens[1:]:
                key, _, val = tok.partition("=")
                if key not in opts or not val:
                    raise UsageError(f"suite line {lineno}: expected 'PATH [h=INT] [k=INT]'")
                opts[key] = int(val)
            path = tokens[0] if Path(tokens[0]).is_absolute() else str(base / tokens[0])
            yield tokens[0], (lambda p=path: _load_graph(p)), opts["h"], opts["k"]
    else:
        try:
            n, width, count, seed = (int(x) for x in args.random.split(","))
        except ValueError:
            raise UsageError("--random expects n,width,count,seed") from None
        for i in range(count):
            yield f"random-{seed + i}", (lambda s=seed + i: random_partial_ktree(n, width, s)[0]), args.h, args.k


def cmd_bench(args) -> int:
    if not args.suite and not args.random:
        raise UsageError("bench needs --suite or --random")
    rows = []
    total = time.perf_counter()
    for name, load, h, k in _bench_instances(args):
        row = {"instance": name}
        start = time.perf_counter()
        try:
            if h is None:
                raise UsageError("no h given (use --h or h= in the suite)")
            graph = load()
            nd = make_nice(decompose_min_fill(graph), graph)
            res = component_dp.solve(graph, nd, ProblemSpec(h, k), parallel=args.parallel)
            row.update(
                v=graph.n, e=graph.m, tw=nd.width, h=h, k=k if k is not None else graph.m,
                optimum=_optimum(res.optimum), feasible=res.feasible, status="ok",
            )
        except Exception as exc:  # reported per row; the run goes on
            row.update(status=f"error: {exc}")
        row["ms"] = (time.perf_counter() - start) * 1000.0
        rows.append(row)
    summary = {"instances": len(rows), "errors": sum(r["status"] != "ok" for r in rows),
               "ms": (time.perf_counter() - total) * 1000.0}
    if args.json:
        sys.stdout.write(json.dumps({"schema": SCHEMA, "command": "bench", "rows": rows, "summary": summary},
                                    indent=2, sort_keys=True) + "\n")
    else:
        cols = ["instance", "v", "e", "tw", "h", "optimum", "ms", "status"]
        table = [[_cell(r.get(c)) for c in cols] for r in rows]
        widths = [max([len(c)] + [len(row[i]) for row in table]) for i, c in enumerate(cols)]
        sys.stdout.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
        for row in table:
            sys.stdout.write("  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() + "\n")
        sys.stdout.write(f"# {summary['instances']} instance(s), {summary['errors']} error(s), "
                         f"{summary['ms']:.1f} ms total\n")
    return 0


def _cell(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.1f}"
    return str(x)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twcut", description="Edge deletion on graphs of small treewidth.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve-components", help="bound every component at h vertices")
    s.add_argument("--graph", required=True)
    s.add_argument("--h", type=int, required=True)
    s.add_argument("--k", type=int, help="budget (default: total edge cost, e(G) without --costs)")
    s.add_argument("--td", help="PACE .td decomposition to use instead of min-fill")
    s.add_argument("--weights", help="file of 'vertex weight' lines")
    s.add_argument("--limits", help="file of 'vertex limit' lines")
    s.add_argument("--costs", help="file of 'u v cost' lines")
    s.add_argument("--witness", action="store_true", help="report an optimal deletion set")
    s.add_argument("--witness-out", help="write the witness as an edge list")
    s.add_argument("--json", action="store_true")
    s.add_argument("--parallel", action="store_true")
    s.set_defaults(func=cmd_solve_components)

    s = sub.add_parser("solve-family", help="remove every copy of a forbidden family")
    s.add_argument("--graph", required=True)
    s.add_argument("--family", required=True, help="family file or preset such as '@trees 4'")
    s.add_argument("--k", type=int)
    s.add_argument("--induced", action="store_true")
    s.add_argument("--td")
    s.add_argument("--witness", action="store_true")
    s.add_argument("--witness-out")
    s.add_argument("--json", action="store_true")
    s.add_argument("--parallel", action="store_true")
    s.add_argument("--no-cache", action="store_true", help="disable per-entry memoisation")
    s.set_defaults(func=cmd_solve_family)

    s = sub.add_parser("decompose", help="min-fill tree decomposition in PACE .td form")
    s.add_argument("--graph", required=True)
    s.add_argument("--nice", action="store_true")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("verify", help="check a deletion set")
    s.add_argument("--graph", required=True)
    s.add_argument("--delete", required=True, help="edge list of deleted edges")
    s.add_argument("--h", type=int)
    s.add_argument("--family")
    s.add_argument("--induced", action="store_true")
    s.add_argument("--weights")
    s.add_argument("--limits")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("bench", help="solve a batch of instances")
    s.add_argument("--suite", help="file of 'PATH [h=INT] [k=INT]' lines")
    s.add_argument("--random", help="n,width,count,seed for random partial k-trees")
    s.add_argument("--h", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--json", action="store_true")
    s.add_argument("--parallel", action="store_true")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StateCapExceeded as exc:
        sys.stderr.write(f"error: state cap exceeded (TWCUT_STATE_CAP): {exc}\n")
    except (UsageError, GraphFormatError, DecompositionError, FamilyError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        sys.stderr.write(f"error: {msg}\n")
    return 2


if __name__ == "__main__":
    sys.exit(main())
