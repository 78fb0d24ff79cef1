"""Command-line surface: validate, count-trees, infer, moments, train, bench,
and an oracle cross-check runner.

Exit codes: 0 success, 1 domain or validation failure, 2 I/O or format
failure.  Numbers print at 15 significant digits with ``-inf`` for the zero
marker, so machine-readable output round-trips as doubles.
"""
from __future__ import annotations

import argparse
import gc
import math
import statistics
import sys
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .graph import (
    DataFormatError,
    DirichletPrior,
    ModelFormatError,
    PriorFormatError,
    SpnGraph,
    StructureError,
    marginal_instance,
    parse_data,
    parse_instance,
    parse_model,
    parse_prior,
    serialize_model,
    serialize_prior,
    validate,
)
from .inference import NEG_INF, count_induced_trees, evaluate
from .moments import (
    MomentFunction,
    ZeroEvidenceError,
    compute_lambdas,
    compute_moments,
    single_edge_moment,
    z_x,
)
from .online import ADF, ALGORITHMS, BMM, CCCP, DirichletState, DomainError, train
from .oracle import (
    CapExceededError,
    edge_tree_masses,
    enumerate_trees,
    generate_random_spn,
    oracle_moments_bulk,
    oracle_polynomial,
    sample_instances,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_FORMAT = 2


def fmt(x: float) -> str:
    if x == NEG_INF:
        return "-inf"
    return format(x, ".15g")


class _ValidationFailed(Exception):
    def __init__(self, report):
        super().__init__("model failed validation")
        self.report = report


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_graph(path: str) -> SpnGraph:
    return parse_model(_read_text(path))


def _load_validated_graph(path: str) -> SpnGraph:
    graph = _load_graph(path)
    report = validate(graph)
    if not report.ok:
        raise _ValidationFailed(report)
    return graph


def _load_prior(path: Optional[str], graph: SpnGraph) -> DirichletPrior:
    if path is None:
        return DirichletPrior.uniform(graph)
    return parse_prior(_read_text(path), graph)


# --- commands ---------------------------------------------------------------

def cmd_validate(args) -> int:
    graph = _load_graph(args.model)
    report = validate(graph)
    print(f"nodes={graph.num_nodes} edges={graph.num_edges} vars={graph.num_vars}")
    if report.scope_masks is not None and len(graph.roots) == 1:
        scope = sorted(report.scope_set(graph.root))
        print(f"scope(root)={{{', '.join(map(str, scope))}}}")
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_DOMAIN


def cmd_count_trees(args) -> int:
    graph = _load_validated_graph(args.model)
    print(count_induced_trees(graph))
    return EXIT_OK


def cmd_infer(args) -> int:
    graph = _load_validated_graph(args.model)
    instances = parse_data(_read_text(args.data), graph)
    weights = graph.sum_weights
    log_norm = evaluate(graph, weights, marginal_instance(graph)).root_log_value
    for instance in instances:
        lv = evaluate(graph, weights, instance).root_log_value
        print(fmt(NEG_INF if lv == NEG_INF else lv - log_norm))
    return EXIT_OK


def cmd_moments(args) -> int:
    graph = _load_validated_graph(args.model)
    prior = _load_prior(args.prior, graph)
    instance = parse_instance(args.instance, graph)
    f = MomentFunction(args.function)
    try:
        report = compute_moments(graph, prior, instance, f)
    except ZeroEvidenceError:
        print("instance has zero probability under prior-mean weights", file=sys.stderr)
        return EXIT_DOMAIN
    for e in report.edges:
        print("\t".join([
            str(e.parent), str(e.child), fmt(e.lam),
            fmt(e.prior_moment), fmt(e.incremented_moment), fmt(e.posterior_moment),
        ]))
    return EXIT_OK


def cmd_train(args) -> int:
    graph = _load_validated_graph(args.model)
    prior = _load_prior(args.prior, graph)
    instances = parse_data(_read_text(args.data), graph)
    policy = "abort" if args.abort_on_zero_evidence else "skip"
    if args.algo == CCCP:
        initial = graph.sum_weights
    else:
        initial = DirichletState.from_prior(prior)
    state, log = train(graph, initial, instances, args.algo, on_zero_evidence=policy)

    consumed = len(log.consumed())
    skipped = len(log.entries) - consumed
    print(f"algo={args.algo} instances={len(log.entries)} consumed={consumed} skipped={skipped}")
    if consumed:
        print(f"final_running_avg={fmt(log.entries[-1].running_avg)}")

    if args.algo == CCCP:
        if args.out_model:
            _write_text(args.out_model, serialize_model(graph.with_sum_weights(state)))
        if args.out_prior:
            print("note: --out-prior ignored for cccp (weights go to --out-model)",
                  file=sys.stderr)
    else:
        if args.out_prior:
            _write_text(args.out_prior, serialize_prior(state.prior()))
        if args.out_model:
            print("note: --out-model ignored for adf/bmm (state goes to --out-prior)",
                  file=sys.stderr)
    if args.log:
        _write_text(args.log, log.to_csv())
    if args.plot:
        from .report import render_train_figure

        render_train_figure(log, args.plot)
    return EXIT_OK


def _write_text(path: str, text: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# --- benchmark ----------------------------------------------------------------

@dataclass
class BenchSample:
    edges: int
    nodes: int
    seconds: float
    seconds_per_edge: float
    naive_seconds: Optional[float] = None


@dataclass
class BenchReport:
    """Measured cost of the all-edges moment query across network sizes."""

    samples: List[BenchSample]
    repeats: int

    @property
    def slope(self) -> float:
        """Least-squares slope of seconds vs edges."""
        n = len(self.samples)
        mx = sum(s.edges for s in self.samples) / n
        my = sum(s.seconds for s in self.samples) / n
        num = sum((s.edges - mx) * (s.seconds - my) for s in self.samples)
        den = sum((s.edges - mx) ** 2 for s in self.samples)
        return num / den if den else float("nan")

    @property
    def per_edge_ratio(self) -> float:
        per_edge = [s.seconds_per_edge for s in self.samples]
        return max(per_edge) / min(per_edge)

    def to_csv(self) -> str:
        has_naive = any(s.naive_seconds is not None for s in self.samples)
        header = "edges,nodes,seconds,seconds_per_edge"
        if has_naive:
            header += ",naive_seconds"
        lines = [header]
        for s in self.samples:
            row = f"{s.edges},{s.nodes},{fmt(s.seconds)},{fmt(s.seconds_per_edge)}"
            if has_naive:
                row += "," + ("" if s.naive_seconds is None else fmt(s.naive_seconds))
            lines.append(row)
        return "\n".join(lines) + "\n"


def bench_graph(target_edges: int, seed: int) -> SpnGraph:
    """Deterministic DAG with approximately the requested edge count.

    Size is controlled through depth: two shallow probe builds estimate the
    edges-per-level rate, then the final build is sized from that estimate.
    """
    params = dict(sum_fanout=2, product_fanout=2, dag_merge_probability=0.9, arity=2)

    def build(depth: int) -> SpnGraph:
        return generate_random_spn(seed, num_vars=depth + 1, depth=depth, **params)

    d0, d1 = 24, 48
    e0 = build(d0).num_edges
    e1 = build(d1).num_edges
    rate = max((e1 - e0) / (d1 - d0), 1e-9)
    depth = max(1, round(d0 + (target_edges - e0) / rate))
    return build(depth)


def _median_seconds(fn, repeats: int, min_duration: float = 0.02) -> float:
    """Median wall time of fn() over ``repeats`` measurements.

    Fast calls are batched until one measurement exceeds ``min_duration``;
    collection is paused during timing.
    """
    calls = 1
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        while True:
            t0 = time.perf_counter()
            for _ in range(calls):
                fn()
            dt = time.perf_counter() - t0
            if dt >= min_duration or calls >= 4096:
                break
            calls *= 2
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            for _ in range(calls):
                fn()
            times.append((time.perf_counter() - t0) / calls)
    finally:
        if gc_was_enabled:
            gc.enable()
    return statistics.median(times)


def run_bench(
    min_edges: int,
    max_edges: int,
    steps: int,
    seed: int,
    naive: bool = False,
    naive_max_edges: int = 5000,
    repeats: int = 5,
) -> BenchReport:
    """Time the all-edges moment query across a geometric size sweep.

    Timing covers the two circuit passes and the per-edge combination only;
    generation, validation, and parsing are excluded.  With ``naive`` the
    per-edge full-recomputation total is also timed for sizes up to
    ``naive_max_edges``.
    """
    if steps < 1 or min_edges < 1 or max_edges < min_edges:
        raise ValueError("need steps >= 1 and 1 <= min_edges <= max_edges")
    if steps == 1:
        targets = [min_edges]
    else:
        ratio = (max_edges / min_edges) ** (1.0 / (steps - 1))
        targets = [round(min_edges * ratio ** i) for i in range(steps)]

    samples: List[BenchSample] = []
    for i, target in enumerate(targets):
        graph = bench_graph(target, seed + i)
        prior = DirichletPrior.uniform(graph)
        instance = sample_instances(graph, graph.sum_weights, 1, seed + i)[0]
        f = MomentFunction.MEAN

        seconds = _median_seconds(
            lambda: compute_moments(graph, prior, instance, f), repeats
        )
        naive_seconds = None
        if naive and graph.num_edges <= naive_max_edges:
            edges = graph.sum_edges()

            def run_naive():
                for edge in edges:
                    single_edge_moment(graph, prior, instance, edge, f)

            naive_seconds = _median_seconds(run_naive, 1)
        samples.append(BenchSample(
            edges=graph.num_edges,
            nodes=graph.num_nodes,
            seconds=seconds,
            seconds_per_edge=seconds / graph.num_edges,
            naive_seconds=naive_seconds,
        ))
    return BenchReport(samples, repeats)


def cmd_bench(args) -> int:
    report = run_bench(
        args.min_edges, args.max_edges, args.steps, args.seed,
        naive=args.naive, naive_max_edges=args.naive_max_edges,
        repeats=args.repeats,
    )
    csv_text = report.to_csv()
    if args.out:
        _write_text(args.out, csv_text)
    else:
        sys.stdout.write(csv_text)
    print(
        f"slope={fmt(report.slope)} s/edge  per-edge ratio={fmt(report.per_edge_ratio)}",
        file=sys.stderr,
    )
    if args.plot:
        from .report import render_bench_figure

        render_bench_figure(report, args.plot)
    return EXIT_OK


# --- oracle cross-check --------------------------------------------------------

def cmd_oracle_check(args) -> int:
    graph = _load_validated_graph(args.model)
    prior = _load_prior(args.prior, graph)
    instances = parse_data(_read_text(args.data), graph) if args.data else []

    failures = 0

    def check(name: str, ok: bool, detail: str = ""):
        nonlocal failures
        if not ok:
            failures += 1
        tail = f" {detail}" if detail else ""
        print(f"{'ok  ' if ok else 'FAIL'} {name}{tail}")

    tau = count_induced_trees(graph)
    try:
        trees = enumerate_trees(graph, cap=args.cap)
    except CapExceededError:
        print(f"skip enumeration: {tau} induced trees exceed cap {args.cap}")
        return EXIT_OK
    check("tree-count", len(trees) == tau, f"{len(trees)} == {tau}")

    for rowno, instance in enumerate(instances, start=1):
        fast = evaluate(graph, graph.sum_weights, instance).root_log_value
        fast_value = 0.0 if fast == NEG_INF else math.exp(fast)
        slow = oracle_polynomial(graph, graph.sum_weights, instance, cap=args.cap)
        check(
            f"polynomial row {rowno}",
            _close(fast_value, slow, 1e-12),
            f"{fmt(fast_value)} vs {fmt(slow)}",
        )

        z, mass = edge_tree_masses(graph, prior, instance, cap=args.cap)
        if z == 0.0:
            print(f"note row {rowno}: zero evidence under prior means; moment checks skipped")
            continue
        zx = z_x(graph, prior, instance)
        check(f"evidence row {rowno}", _close(zx, z, 1e-12), f"{fmt(zx)} vs {fmt(z)}")
        lambdas = compute_lambdas(graph, prior, instance)
        lam_ok = True
        for k, row in lambdas.items():
            for pos, child in enumerate(graph.children[k]):
                if not _close(row[pos] * zx, mass[(k, child)], 1e-9):
                    lam_ok = False
        check(f"edge-mass row {rowno}", lam_ok)
        for f in MomentFunction:
            expected = oracle_moments_bulk(graph, prior, instance, f, cap=args.cap)
            got = compute_moments(graph, prior, instance, f)
            moment_ok = all(
                _close(e.posterior_moment, expected[(e.parent, e.child)], 1e-9)
                for e in got.edges
            )
            check(f"moments[{f.value}] row {rowno}", moment_ok)

    print("all checks passed" if failures == 0 else f"{failures} check(s) failed")
    return EXIT_OK if failures == 0 else EXIT_DOMAIN


def _close(a: float, b: float, rel: float) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b), 1e-300)


# --- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spnmoments",
        description=(
            "Sum-product network toolkit: validation, inference, exact "
            "posterior edge moments, online learning, and scaling benchmarks."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check structural and semantic validity")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("count-trees", help="print the exact induced-tree count")
    p.add_argument("model")
    p.set_defaults(func=cmd_count_trees)

    p = sub.add_parser("infer", help="log-likelihood of each data row")
    p.add_argument("model")
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("moments", help="per-edge posterior moments for one instance")
    p.add_argument("model")
    p.add_argument("--prior")
    p.add_argument("--instance", required=True, help="CSV row, '?' marks marginalized")
    p.add_argument("--function", choices=[f.value for f in MomentFunction], default="mean")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("train", help="online learning over a data stream")
    p.add_argument("model")
    p.add_argument("--prior")
    p.add_argument("--data", required=True)
    p.add_argument("--algo", choices=list(ALGORITHMS), required=True)
    p.add_argument("--out-model")
    p.add_argument("--out-prior")
    p.add_argument("--log")
    p.add_argument("--plot", help="write a PNG of the likelihood curve")
    p.add_argument("--abort-on-zero-evidence", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("bench", help="scaling benchmark of the moment query")
    p.add_argument("--min-edges", type=int, default=1000)
    p.add_argument("--max-edges", type=int, default=100_000)
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--naive", action="store_true",
                   help="also time the per-edge quadratic recomputation")
    p.add_argument("--naive-max-edges", type=int, default=5000)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--out", help="write the CSV here instead of stdout")
    p.add_argument("--plot", help="write a PNG scaling figure")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle-check",
                       help="cross-check the fast engine against tree enumeration")
    p.add_argument("model")
    p.add_argument("--prior")
    p.add_argument("--data")
    p.add_argument("--cap", type=int, default=100_000)
    p.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _ValidationFailed as exc:
        print(exc.report.summary(), file=sys.stderr)
        return EXIT_DOMAIN
    except (ModelFormatError, PriorFormatError, DataFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (ZeroEvidenceError, DomainError, StructureError, CapExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
