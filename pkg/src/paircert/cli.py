"""Command-line driver.

Subcommands: `certify` (enclosure for one graph and disorder), `reproduce`
(the fixed flagship run with its reference bracket), `oracle` (exhaustive
small-n checks), `bench` (cost counters).

Output contract: stdout carries exactly one JSON document, and --out
writes the same bytes to a file; the human-readable report, including
measured wall time, goes to stderr. JSON content is independent of
--threads and of the machine, so identical configs diff clean.

Exit codes: 0 success, 1 numerical or reproduction failure, 2 usage or
configuration error (including oracle budget refusals).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

from .estimator import (
    SCHEMA_VERSION,
    certify,
    certify_dominated,
    choose_p,
    markov_apriori,
)
from .functions import (
    AnalyticFunction,
    FactorizationError,
    GFunction,
    QuadratureError,
    ResolventParams,
    ResolventTraceFunction,
    dominating_resolvent_scale,
)
from .graph import Graph, build_torus_cayley, from_edge_list, laplacian
from .oracle import check_domination, check_nonnegative, exact_expectation, walsh_spectrum
from .sampling import all_ones

# pair-evaluation count above which delta mode insists on --yes
YES_GATE = 10**6

REPRODUCE_GRAPH = "torus:15"
REPRODUCE_P = 30
REPRODUCE_SEED = 1
REPRODUCE_BRACKET = (0.2006, 0.2030)

ORACLE_TOL = 1e-10


class UsageError(ValueError):
    """Bad flag combination or unusable configuration."""


@dataclass(frozen=True)
class RunConfig:
    """One resolved invocation: graph source, disorder, mode, budget."""

    graph_spec: str
    lam: float
    gamma: float
    mode: str
    p: int | None
    delta: float | None
    seed: int
    out: str | None
    threads: int
    assume_yes: bool


def _parse_seed(text: str) -> int:
    try:
        value = int(text, 16) if text.lower().startswith("0x") else int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed {text!r} is not a decimal or 0x-prefixed hex integer")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed {text!r} is outside [0, 2^64)")
    return value


def _load_graph(spec: str) -> Graph:
    kind, _, rest = spec.partition(":")
    if kind == "torus" and rest:
        try:
            m = int(rest)
        except ValueError:
            raise UsageError(f"torus side {rest!r} is not an integer") from None
        return build_torus_cayley(m)
    if kind == "edges" and rest:
        try:
            with open(rest, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read edge list {rest!r}: {exc}") from None
        return from_edge_list(text)
    raise UsageError(f"unknown graph spec {spec!r}; expected torus:M or edges:PATH")


def _mode_string(h_spec: str | None) -> str:
    return "resolvent" if h_spec is None else f"spectral:{h_spec}"


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        graph_spec=args.graph,
        lam=args.lam,
        gamma=args.gamma,
        mode=_mode_string(getattr(args, "h", None)),
        p=getattr(args, "p", None),
        delta=getattr(args, "delta", None),
        seed=getattr(args, "seed", 0),
        out=args.out,
        threads=getattr(args, "threads", 1),
        assume_yes=getattr(args, "yes", False),
    )


def _config_json(config: RunConfig, graph: Graph, p: int | None) -> dict:
    doc = {
        "graph": config.graph_spec,
        "n": graph.n,
        "lambda": config.lam,
        "gamma": config.gamma,
        "mode": config.mode,
    }
    if p is not None:
        doc["p"] = p
        doc["seed"] = config.seed
    if config.delta is not None:
        doc["delta"] = config.delta
    return doc


def _emit(doc: dict, out_path: str | None):
    text = json.dumps(doc, indent=2) + "\n"
    sys.stdout.write(text)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _report(lines):
    print("\n".join(lines), file=sys.stderr)


def _resolve_p(config: RunConfig, graph: Graph, probe) -> int:
    """p from --p, or from --delta with a cost preview and the --yes gate."""
    if config.p is not None:
        return config.p
    p = choose_p(config.lam, config.gamma, config.delta, n=graph.n)
    evaluations = p * (p - 1) // 2 + 1
    start = time.perf_counter()
    probe()
    per_eval = time.perf_counter() - start
    _report([
        f"target width {config.delta}: p={p}, {evaluations} combined evaluations,"
        f" estimated {per_eval * evaluations:.1f}s"
    ])
    if p * p > YES_GATE and not config.assume_yes:
        raise UsageError(f"p={p} implies {p * p} pair evaluations (> {YES_GATE}); pass --yes to proceed")
    return p


def _build_params(config: RunConfig, graph: Graph) -> ResolventParams:
    try:
        return ResolventParams(config.lam, config.gamma, laplacian(graph))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_certify(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    graph = _load_graph(config.graph_spec)
    params = _build_params(config, graph)

    if config.mode == "resolvent":
        fn = ResolventTraceFunction(params)
        p = _resolve_p(config, graph, probe=lambda: fn.evaluate_with_g(all_ones(fn.n)))
        cert = certify(fn, p, config.seed, threads=config.threads)
        doc = {"schema_version": SCHEMA_VERSION, "config": _config_json(config, graph, p)}
        body = cert.to_json_dict()
        for key in ("schema_version", "p", "seed"):
            body.pop(key)
        doc.update(body)
        _emit(doc, config.out)
        _report([
            f"{config.graph_spec}: n={graph.n}, max degree {graph.max_degree}",
            f"lambda={config.lam:g} gamma={config.gamma:g} p={p} seed={config.seed} threads={config.threads}",
            f"E[f] in [{cert.lower!r}, {cert.upper!r}]  (width {cert.width:.4e})",
            f"expected width {cert.expected_width:.4e}, markov 90% width {cert.markov_90_width:.4e},"
            f" realized within markov: {'yes' if cert.realized_within_markov else 'NO'}",
            f"a-priori width from c={cert.c_bound:g}: {cert.c_markov_width:.4e}",
            f"evaluations {cert.counters.evaluations}, factorizations {cert.counters.factorizations},"
            f" wall {cert.counters.wall_ms:.1f} ms",
        ])
        return 0

    h = AnalyticFunction.from_spec(config.mode.partition(":")[2])
    f1, f2 = dominating_resolvent_scale(h, params, graph)
    g2 = GFunction(f2)
    p = _resolve_p(config, graph, probe=lambda: (f1.evaluate(all_ones(f1.n)), g2.evaluate(all_ones(g2.n))))
    cert = certify_dominated(f1, g2, p, config.seed, threads=config.threads)
    doc = {"schema_version": SCHEMA_VERSION, "config": _config_json(config, graph, p)}
    body = cert.to_json_dict()
    for key in ("schema_version", "p", "seed"):
        body.pop(key)
    doc.update(body)
    _emit(doc, config.out)
    _report([
        f"{config.graph_spec}: n={graph.n}, max degree {graph.max_degree}, h={h.name}",
        f"lambda={config.lam:g} gamma={config.gamma:g} p={p} seed={config.seed} threads={config.threads}",
        f"E[f1] within {cert.radius!r} of ({cert.center.real!r}, {cert.center.imag!r}i)",
        f"evaluations {cert.counters.evaluations}, factorizations {cert.counters.factorizations},"
        f" wall {cert.counters.wall_ms:.1f} ms",
    ])
    return 0


def cmd_reproduce(args: argparse.Namespace) -> int:
    config = RunConfig(
        graph_spec=REPRODUCE_GRAPH,
        lam=1.0,
        gamma=1.0,
        mode="resolvent",
        p=REPRODUCE_P,
        delta=None,
        seed=REPRODUCE_SEED,
        out=args.out,
        threads=args.threads,
        assume_yes=True,
    )
    graph = _load_graph(config.graph_spec)
    params = _build_params(config, graph)
    fn = ResolventTraceFunction(params)
    cert = certify(fn, config.p, config.seed, threads=config.threads)

    ref_lower, ref_upper = REPRODUCE_BRACKET
    intersects = cert.lower <= ref_upper and cert.upper >= ref_lower
    doc = {"schema_version": SCHEMA_VERSION, "config": _config_json(config, graph, config.p)}
    body = cert.to_json_dict()
    for key in ("schema_version", "p", "seed"):
        body.pop(key)
    doc.update(body)
    doc["reference"] = {"lower": ref_lower, "upper": ref_upper, "intersects": intersects}
    _emit(doc, config.out)
    _report([
        f"flagship run: {config.graph_spec} (n={graph.n}), lambda=1 gamma=1 p={config.p} seed={config.seed}",
        f"certified E[f] in [{cert.lower!r}, {cert.upper!r}]",
        f"reference bracket [{ref_lower}, {ref_upper}]: intersection {'nonempty' if intersects else 'EMPTY'}",
        f"evaluations {cert.counters.evaluations}, factorizations {cert.counters.factorizations},"
        f" wall {cert.counters.wall_ms:.1f} ms",
    ])
    if not intersects:
        print("error: certified interval misses the reference bracket; both provably contain E[f], so this is a bug", file=sys.stderr)
        return 1
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    graph = _load_graph(config.graph_spec)
    params = _build_params(config, graph)
    doc = {"schema_version": SCHEMA_VERSION, "config": _config_json(config, graph, None), "tol": ORACLE_TOL}

    if config.mode == "resolvent":
        fn = ResolventTraceFunction(params)
        exact = exact_expectation(fn)
        spectrum = walsh_spectrum(ResolventTraceFunction(params))
        verdict = check_nonnegative(spectrum, ORACLE_TOL)
        doc.update({
            "exact_expectation": exact,
            "min_coefficient": verdict.value,
            "min_coefficient_mask": verdict.mask,
            "nonnegative": verdict.ok,
        })
        _emit(doc, config.out)
        _report([
            f"{config.graph_spec}: n={graph.n}, 2^n = {1 << graph.n} evaluations per pass",
            f"exact E[f] = {exact!r}",
            f"min Walsh coefficient {verdict.value!r} at mask {verdict.mask} (subset {verdict.subset()})",
            f"nonnegative at tol {ORACLE_TOL:g}: {'yes' if verdict.ok else 'NO'}",
        ])
        return 0 if verdict.ok else 1

    h = AnalyticFunction.from_spec(config.mode.partition(":")[2])
    f1, f2 = dominating_resolvent_scale(h, params, graph)
    exact1 = complex(exact_expectation(f1))
    spectrum1 = walsh_spectrum(f1)
    spectrum2 = walsh_spectrum(f2)
    verdict = check_domination(spectrum1, spectrum2, ORACLE_TOL)
    doc.update({
        "exact_expectation_re": exact1.real,
        "exact_expectation_im": exact1.imag,
        "max_domination_excess": verdict.value,
        "max_domination_excess_mask": verdict.mask,
        "dominated": verdict.ok,
    })
    _emit(doc, config.out)
    _report([
        f"{config.graph_spec}: n={graph.n}, h={h.name}",
        f"exact E[f1] = {exact1.real!r} + {exact1.imag!r}i",
        f"worst |a_S| - b_S = {verdict.value!r} at mask {verdict.mask} (subset {verdict.subset()})",
        f"dominated at tol {ORACLE_TOL:g}: {'yes' if verdict.ok else 'NO'}",
    ])
    return 0 if verdict.ok else 1


def cmd_bench(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    graph = _load_graph(config.graph_spec)
    params = _build_params(config, graph)
    fn = ResolventTraceFunction(params)
    p = _resolve_p(config, graph, probe=lambda: fn.evaluate_with_g(all_ones(fn.n)))
    cert = certify(fn, p, config.seed, threads=config.threads)

    naive_equivalent = (graph.n + 1) * p * p
    speedup = naive_equivalent / cert.counters.factorizations
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": _config_json(config, graph, p),
        "counters": cert.counters.to_json_dict(),
        "naive_equivalent_evaluations": naive_equivalent,
        "speedup_ratio": speedup,
    }
    _emit(doc, config.out)
    _report([
        f"{config.graph_spec}: n={graph.n}, p={p}",
        f"factorizations performed: {cert.counters.factorizations}",
        f"naive-equivalent f evaluations: (n+1)p^2 = {naive_equivalent}",
        f"speedup from pair symmetry and the rank-one flip sweep: {speedup:.1f}x",
        f"wall {cert.counters.wall_ms:.1f} ms",
    ])
    return 0


def _add_run_flags(sub: argparse.ArgumentParser, with_samples: bool):
    sub.add_argument("--graph", required=True, help="torus:M (M >= 3) or edges:PATH")
    sub.add_argument("--lambda", dest="lam", type=float, required=True, help="disorder strength, positive")
    sub.add_argument("--gamma", type=float, required=True, help="spectral gap, positive")
    sub.add_argument("--h", help="analytic function poly:c0,c1,... or exp:s (switches to the dominated spectral mode)")
    sub.add_argument("--out", help="also write the JSON document to this path")
    if with_samples:
        group = sub.add_mutually_exclusive_group(required=True)
        group.add_argument("--p", type=int, help="sample count")
        group.add_argument("--delta", type=float, help="target expected width; picks p")
        sub.add_argument("--seed", type=_parse_seed, required=True, help="decimal or 0x-hex, in [0, 2^64)")
        sub.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads for pair evaluations")
        sub.add_argument("--yes", action="store_true", help="accept large delta-implied budgets")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paircert",
        description="Certified two-sided enclosures of E[f] for resolvent traces and analytic functional calculus on graphs.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    cert = commands.add_parser("certify", help="sample and certify an enclosure")
    _add_run_flags(cert, with_samples=True)
    cert.set_defaults(func=cmd_certify)

    repro = commands.add_parser("reproduce", help="fixed flagship run against the reference bracket")
    repro.add_argument("--out", help="also write the JSON document to this path")
    repro.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    repro.set_defaults(func=cmd_reproduce)

    orac = commands.add_parser("oracle", help="exhaustive small-n expectation and spectrum checks")
    _add_run_flags(orac, with_samples=False)
    orac.set_defaults(func=cmd_oracle)

    bench = commands.add_parser("bench", help="cost counters against the naive-equivalent figure")
    _add_run_flags(bench, with_samples=True)
    bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FactorizationError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # usage and configuration problems, including oracle budget refusals
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
