"""Command-line entry points: solve, train, gen, bench, oracle, convert.

Exit codes: 0 success, 1 bad input or usage, 2 SAT not solved within budget,
3 resource guard tripped, 4 training diverged.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import instances
from .gcn import GcnModel, default_widths, init_model
from .generate import planted_ksat
from .graph import MalformedInputError, is_independent_set
from .instances import ParseError
from .oracle import dpll_sat, exact_mis
from .pipeline import METHODS, PROBLEMS, mis_instance, run_method, solve_problem
from .search import SearchConfig
from .training import TrainConfig, TrainingDiverged, sat_sample, train
from .transforms import ResourceLimitError, sat_to_mis

log = logging.getLogger("misgcn")

EXIT_OK, EXIT_INPUT, EXIT_UNSOLVED, EXIT_RESOURCE, EXIT_DIVERGED = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _guess_format(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix == ".cnf":
        return "cnf"
    if suffix in (".col", ".clq", ".dimacs"):
        return "dimacs"
    return "edgelist"


def load_instance(path: Path, fmt: Optional[str], problem: str):
    """Returns (instance, original vertex ids or None)."""
    fmt = fmt or _guess_format(path)
    data = path.read_bytes()
    if problem == "sat" and fmt != "cnf":
        raise ParseError("--problem sat needs a CNF input")
    if fmt == "cnf":
        formula = instances.parse_cnf(data)
        if problem == "sat":
            return formula, None
        return sat_to_mis(formula).graph, None
    if fmt == "dimacs":
        return instances.parse_dimacs_graph(data), None
    g, ids = instances.parse_edge_list_ids(data)
    return g, ids


def load_or_init_model(path: Optional[str], seed: int, layers=20, width=32, maps=32) -> GcnModel:
    if path:
        return instances.read_model(Path(path).read_bytes())
    return init_model(layers, default_widths(layers, width, maps), seed)


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        time_limit=args.time_limit, threads=args.threads, maps=args.maps, seed=args.seed,
        reduction=not args.no_reduction, rekernelize=not args.no_reduction,
        local_search=not args.no_local_search,
    )


def cmd_solve(args) -> int:
    path = Path(args.input)
    try:
        instance, ids = load_instance(path, args.format, args.problem)
    except (OSError, ParseError, MalformedInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        model = load_or_init_model(args.model, args.seed)
    except (OSError, ParseError) as exc:
        print(f"error: model: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        report = solve_problem(args.problem, instance, model, _search_config(args), instance_id=path.name)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    if ids is not None:
        report.vertex_ids = [ids[v] for v in report.vertices]
    text = instances.write_solution(report, instance)
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    if args.problem == "sat" and not report.solved:
        return EXIT_UNSOLVED
    return EXIT_OK


def load_dataset(directory: Path, labels_per_instance: int, seed: int):
    samples = []
    for cnf in sorted(directory.glob("*.cnf")):
        assign_path = cnf.with_suffix(".assign")
        if not assign_path.exists():
            log.warning("skipping %s: no assignment file", cnf.name)
            continue
        formula = instances.parse_cnf(cnf.read_bytes())
        assignment = instances.parse_assignment(assign_path.read_bytes())
        samples.append(sat_sample(formula, assignment, labels_per_instance, seed + len(samples), cnf.stem))
    return samples


def cmd_train(args) -> int:
    try:
        samples = load_dataset(Path(args.data), args.labels_per_instance, args.seed)
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if not samples:
        print(f"error: no training instances in {args.data}", file=sys.stderr)
        return EXIT_INPUT
    config = TrainConfig(epochs=args.epochs, lr=args.lr, seed=args.seed, maps=args.maps,
                         layers=args.layers, width=args.width)
    try:
        result = train(samples, config)
    except TrainingDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    out = Path(args.out)
    out.write_bytes(instances.write_model(result.model))
    history = Path(args.history) if args.history else out.with_name(out.name + ".loss.csv")
    history.write_text("epoch,mean_hindsight_loss\n" + "".join(
        f"{e},{loss!r}\n" for e, loss in enumerate(result.history)))
    print(json.dumps({"model": str(out), "history": str(history), "epochs": config.epochs,
                      "final_loss": result.history[-1] if result.history else None}))
    return EXIT_OK


def generate_dataset(out: Path, num_vars: int, num_clauses: int, count: int, seed: int) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    width = max(4, len(str(count - 1)))
    paths = []
    for i in range(count):
        formula, assignment = planted_ksat(num_vars, num_clauses, rng)
        if dpll_sat(formula) is None:
            raise AssertionError("planted instance reported unsatisfiable")
        stem = out / f"inst_{i:0{width}d}"
        stem.with_suffix(".cnf").write_text(instances.write_cnf(formula, f"planted 3-SAT seed={seed} index={i}"))
        stem.with_suffix(".assign").write_text(instances.write_assignment(assignment))
        paths.append(stem.with_suffix(".cnf"))
    return paths


def cmd_gen(args) -> int:
    paths = generate_dataset(Path(args.out), args.vars, args.clauses, args.count, args.seed)
    print(json.dumps({"out": args.out, "instances": len(paths)}))
    return EXIT_OK


@dataclasses.dataclass
class BenchmarkRecord:
    instance: str
    method: str
    maps: Optional[int]
    solved: Optional[bool]
    objective: int
    reference: Optional[int]
    wall_time: float
    seed: int
    error: str = ""


def _reference_size(path: Path, fmt: Optional[str]) -> tuple[object, Optional[int]]:
    """MIS graph of a bench instance and the size that counts as solved."""
    fmt = fmt or _guess_format(path)
    if fmt == "cnf":
        formula = instances.parse_cnf(path.read_bytes())
        g, target = mis_instance("sat", formula)
        return g, target
    g, _ = load_instance(path, fmt, "mis")
    res = exact_mis(g, limit=200_000)
    return g, res.alpha


def run_benchmark(files: Sequence[Path], methods: Sequence[str], model: GcnModel, config: SearchConfig,
                  maps_sweep: Sequence[Optional[int]] = (None,), fmt: Optional[str] = None,
                  budget_scale: Optional[dict[str, float]] = None) -> list[BenchmarkRecord]:
    """One record per (instance, map count, method). ``budget_scale`` multiplies
    the time limit of the named methods."""
    budget_scale = budget_scale or {}
    records = []
    for path in files:
        try:
            g, reference = _reference_size(path, fmt)
        except Exception as exc:  # recorded, the sweep goes on
            for method in methods:
                records.append(BenchmarkRecord(path.name, method, None, None, 0, None, 0.0, config.seed, repr(exc)))
            continue
        for maps in maps_sweep:
            for method in methods:
                cfg = dataclasses.replace(
                    config, maps=maps, target=reference if _is_sat(path, fmt) else config.target,
                    time_limit=config.time_limit * budget_scale.get(method, 1.0))
                start = time.perf_counter()
                try:
                    best = run_method(method, g, model, cfg)
                    if not is_independent_set(g, best.vertices):
                        raise AssertionError("unverified solution")
                    size = best.size
                    solved = None if reference is None else size >= reference
                    records.append(BenchmarkRecord(path.name, method, maps, solved, size, reference,
                                                   time.perf_counter() - start, config.seed))
                except Exception as exc:
                    records.append(BenchmarkRecord(path.name, method, maps, None, 0, reference,
                                                   time.perf_counter() - start, config.seed, repr(exc)))
    return records


def _is_sat(path: Path, fmt: Optional[str]) -> bool:
    return (fmt or _guess_format(path)) == "cnf"


def summarize(records: Sequence[BenchmarkRecord]) -> list[dict]:
    rows = {}
    for r in records:
        key = (r.method, r.maps)
        rows.setdefault(key, []).append(r)
    out = []
    for (method, maps), rs in rows.items():
        judged = [r for r in rs if r.solved is not None]
        out.append({
            "method": method,
            "maps": maps,
            "instances": len(rs),
            "solved_pct": 100.0 * sum(r.solved for r in judged) / len(judged) if judged else None,
            "mean_objective": float(np.mean([r.objective for r in rs])) if rs else 0.0,
            "mean_time": float(np.mean([r.wall_time for r in rs])) if rs else 0.0,
            "errors": sum(1 for r in rs if r.error),
        })
    return out


def format_table(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), delimiter="\t", lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def cmd_bench(args) -> int:
    data = Path(args.data)
    files = sorted(p for p in data.glob("*") if p.suffix in (".cnf", ".txt", ".edges", ".col", ".clq", ".dimacs"))
    if not files:
        print(f"error: no instances in {data}", file=sys.stderr)
        return EXIT_INPUT
    if args.limit:
        files = files[:args.limit]
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        print(f"error: unknown methods {unknown}; choose from {list(METHODS)}", file=sys.stderr)
        return EXIT_INPUT
    try:
        sweep = [int(x) for x in args.sweep_maps.split(",")] if args.sweep_maps else [args.maps]
        scale = {}
        for item in filter(None, (args.budget_scale or "").split(",")):
            method, factor = item.split("=")
            scale[method.strip()] = float(factor)
        model = load_or_init_model(args.model, args.seed)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    config = SearchConfig(time_limit=args.time_limit, threads=args.threads, seed=args.seed)
    records = run_benchmark(files, methods, model, config, sweep, args.format, scale)
    summary = summarize(records)
    sys.stdout.write(format_table([dataclasses.asdict(r) for r in records]))
    sys.stdout.write("\n")
    sys.stdout.write(format_table(summary))
    if args.json:
        Path(args.json).write_text(json.dumps(
            {"records": [dataclasses.asdict(r) for r in records], "summary": summary}, indent=2) + "\n")
    return EXIT_OK


def cmd_oracle(args) -> int:
    path = Path(args.input)
    try:
        instance, _ = load_instance(path, args.format, args.problem)
        g, _ = mis_instance(args.problem, instance)
    except (OSError, ParseError, MalformedInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    doc = {"instance": path.name, "problem": args.problem}
    if args.problem == "sat":
        assignment = dpll_sat(instance)
        doc["satisfiable"] = assignment is not None
        doc["assignment"] = None if assignment is None else [v if b else -v for v, b in sorted(assignment.items())]
    res = exact_mis(g, limit=args.limit)
    doc.update({"alpha": res.alpha, "witness": res.witness, "expansions": res.expansions,
                "seconds": round(res.seconds, 6), "certified": res.known})
    if res.known and args.problem == "mvc":
        doc["cover_size"] = g.n - res.alpha
    if res.known and args.problem == "mc":
        doc["clique_size"] = res.alpha
    print(json.dumps(doc, indent=2))
    return EXIT_OK if res.known else EXIT_UNSOLVED


def cmd_convert(args) -> int:
    try:
        instance, _ = load_instance(Path(args.input), args.format, "mis")
    except (OSError, ParseError, MalformedInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = instances.write_dimacs_graph(instance) if args.to == "dimacs" else instances.write_edge_list(instance)
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="misgcn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def search_flags(p):
        p.add_argument("--model", help="model file; absent means seeded random weights")
        p.add_argument("--time-limit", type=float, default=10.0, help="seconds per instance")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--maps", type=int, default=None, help="use only the first M probability maps")

    p = sub.add_parser("solve", help="solve one instance")
    p.add_argument("--problem", choices=PROBLEMS, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("cnf", "edgelist", "dimacs"))
    search_flags(p)
    p.add_argument("--no-reduction", action="store_true")
    p.add_argument("--no-local-search", action="store_true")
    p.add_argument("--out", help="also write the report here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("train", help="train a model on planted SAT instances")
    p.add_argument("--data", required=True)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--maps", type=int, default=32)
    p.add_argument("--layers", type=int, default=20)
    p.add_argument("--width", type=int, default=32)
    p.add_argument("--labels-per-instance", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--history", help="loss history CSV (default: <out>.loss.csv)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("gen", help="generate planted random 3-SAT instances")
    p.add_argument("--vars", type=int, default=20)
    p.add_argument("--clauses", type=int, default=91)
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="ablation / M-sweep harness")
    p.add_argument("--data", required=True)
    p.add_argument("--methods", default="basic,basic+tree,full")
    p.add_argument("--format", choices=("cnf", "edgelist", "dimacs"))
    p.add_argument("--sweep-maps", help="comma-separated map counts, e.g. 1,4,8")
    p.add_argument("--limit", type=int, default=0, help="only the first N instances")
    p.add_argument("--json", help="also write records and summary as JSON")
    p.add_argument("--budget-scale", help="per-method time multipliers, e.g. basic=16,full=1")
    search_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="exact answer for a small instance")
    p.add_argument("--problem", choices=PROBLEMS, default="mis")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("cnf", "edgelist", "dimacs"))
    p.add_argument("--limit", type=int, default=2_000_000, help="branch-and-bound node budget")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("convert", help="write the MIS graph of an instance")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("cnf", "edgelist", "dimacs"))
    p.add_argument("--to", choices=("dimacs", "edgelist"), default="dimacs")
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
