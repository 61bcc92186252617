"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 I/O error,
4 domain error (empty network, empty winning registry, unknown or
unsubstitutable failed service).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from .discovery import discover_and_select, ga_discover_and_select, sweep_and_select
from .exceptions import (
    BeehiveError,
    EmptyNetwork,
    NoServicesInBestRegistry,
    NoSubstituteAvailable,
    UnknownFailedService,
)
from .network import GeneratorParams, parse_attributes
from .scenario import METHODS, Scenario, ScenarioError, load_scenario, parse_range
from .substitution import EquivalenceCache, substitute

log = logging.getLogger("beehive")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DOMAIN = 4

DOMAIN_ERRORS = (EmptyNetwork, NoServicesInBestRegistry, UnknownFailedService, NoSubstituteAvailable)
QUANTILES = (0.1, 0.5, 0.9)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(_fail(EXIT_USAGE, message))


def _fail(code: int, message: str) -> int:
    print(f"beehive: error: {message}", file=sys.stderr)
    return code


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def _ms(start: float) -> float:
    return round((time.perf_counter() - start) * 1000.0, 3)


def _dumps(record: dict) -> str:
    return json.dumps(record, separators=(", ", ": "), allow_nan=False)


def _emit(lines: list[str], out: Path | None) -> None:
    text = "".join(line + "\n" for line in lines)
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    tmp = out.with_name(out.name + ".part")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, out)


def _load(args) -> Scenario:
    if not args.scenario:
        raise ScenarioError("--scenario is required")
    sc = load_scenario(args.scenario)
    if args.seed is not None:
        sc.seeds = [args.seed]
    if args.out:
        sc.out = Path(args.out)
    return sc


# -- discover / bench ---------------------------------------------------

def _run_method(method: str, sc: Scenario, net, query, seed: int):
    if method == "bees":
        return discover_and_select(net, sc.taxonomy(), query, sc.bees, seed)
    if method == "ga":
        return ga_discover_and_select(net, sc.taxonomy(), query, sc.ga, seed)
    return sweep_and_select(net, sc.taxonomy(), query)


def run_discover(sc: Scenario) -> list[dict]:
    """One record per (seed, method), sorted by seed then method name."""
    records = []
    for seed in sc.seeds:
        net = sc.network(seed)
        query = sc.query(net, seed)
        for method in sc.methods:
            start = time.perf_counter()
            res = _run_method(method, sc, net, query, seed)
            wall = _ms(start)
            records.append({
                "seed": seed,
                "method": method,
                "domain": query.wanted_domain,
                "registry": res.registry_id,
                "similarity": res.similarity,
                "service": res.selected_service.id,
                "probes": res.trace.total_probes,
                "registries": len(net),
                "iterations": len(res.trace.iterations),
                "stop_reason": res.trace.stop_reason,
                "wall_ms": wall,
            })
            log.debug("seed %d %s -> %s (%d probes)", seed, method, res.registry_id, res.trace.total_probes)
    records.sort(key=lambda r: (r["seed"], r["method"]))
    return records


def _quantiles(values) -> dict[str, float]:
    arr = np.asarray(values, dtype=float)
    return {f"p{int(q * 100)}": float(np.quantile(arr, q)) for q in QUANTILES}


def aggregate(records: list[dict]) -> list[dict]:
    """Per-method summary; recomputable from the per-seed records alone."""
    best = {}
    for r in records:
        best[r["seed"]] = max(best.get(r["seed"], 0.0), r["similarity"])
    out = []
    for method in sorted({r["method"] for r in records}):
        rows = [r for r in records if r["method"] == method]
        probes = [r["probes"] for r in rows]
        ratio = [r["probes"] / r["registries"] for r in rows]
        out.append({
            "method": method,
            "runs": len(rows),
            "best_match_rate": sum(abs(r["similarity"] - best[r["seed"]]) <= 1e-12 for r in rows) / len(rows),
            "exact_match_rate": sum(r["similarity"] == 1.0 for r in rows) / len(rows),
            "similarity_mean": float(np.mean([r["similarity"] for r in rows])),
            "probes": _quantiles(probes),
            "probe_fraction": _quantiles(ratio),
            "iterations": _quantiles([r["iterations"] for r in rows]),
            "wall_ms": _quantiles([r["wall_ms"] for r in rows]),
        })
    return out


def cmd_discover(args) -> int:
    sc = _load(args)
    records = run_discover(sc)
    _emit([_dumps(r) for r in records], sc.out)
    if not args.quiet:
        for agg in aggregate(records):
            print(_dumps(agg), file=sys.stderr)
    return EXIT_OK


def cmd_bench(args) -> int:
    sc = _load(args)
    if args.methods:
        methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
        if not methods or any(m not in METHODS for m in methods):
            raise ScenarioError(f"--methods must be drawn from {METHODS}")
        sc.methods = methods
    records = run_discover(sc)
    aggs = aggregate(records)
    _emit([_dumps(a) for a in aggs], sc.out)
    if not args.quiet:
        for agg in aggs:
            print(f"{agg['method']:>6}: runs={agg['runs']} best_match={agg['best_match_rate']:.3f} "
                  f"median_probes={agg['probes']['p50']:g}", file=sys.stderr)
    return EXIT_OK


# -- substitute ---------------------------------------------------------

def _injection_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1, dtype=np.uint64)[0])


def run_substitute(sc: Scenario) -> tuple[list[dict], EquivalenceCache | None]:
    if not sc.failures:
        raise ScenarioError("substitute needs a non-empty 'failures' key")
    records, cache = [], None
    for seed in sc.seeds:
        net = sc.network(seed)
        weights = sc.qos_weights(net)
        cache = EquivalenceCache(sc.cache_ttl, sc.cache_capacity)
        for index, (tick, failed) in enumerate(sc.failures):
            cache.evict_expired(tick)
            start = time.perf_counter()
            sub = substitute(failed, cache, net, sc.taxonomy(), sc.bees, weights,
                             sc.requested_level, tick, _injection_seed(seed, index))
            records.append({
                "seed": seed,
                "tick": tick,
                "failed_id": failed,
                "substitute_id": sub.service.id,
                "registry": sub.registry_id,
                "source": sub.source,
                "probes": sub.probes,
                "wall_ms": _ms(start),
            })
    return records, cache


def cmd_substitute(args) -> int:
    sc = _load(args)
    records, cache = run_substitute(sc)
    _emit([_dumps(r) for r in records], sc.out)
    if args.cache_dump:
        # cache of the last seed processed
        Path(args.cache_dump).write_text(cache.dump(), encoding="utf-8")
    return EXIT_OK


# -- generate -----------------------------------------------------------

def cmd_generate(args) -> int:
    from .network import generate_network

    if args.scenario:
        sc = load_scenario(args.scenario)
        if sc.generator is None:
            raise ScenarioError("scenario has no 'generate.*' keys")
        params, tax = sc.generator, sc.taxonomy()
        seed = args.seed if args.seed is not None else (sc.generator_seed or 0)
        out = Path(args.out) if args.out else sc.out
    else:
        smin, smax = parse_range(args.services)
        params = GeneratorParams(
            registry_count=args.registries, services_min=smin, services_max=smax,
            attributes=parse_attributes(args.attributes) if args.attributes else GeneratorParams().attributes,
            adjacency=args.adjacency, k=args.k,
        )
        tax = Scenario(taxonomy_source=args.taxonomy).taxonomy()
        seed = args.seed if args.seed is not None else 0
        out = Path(args.out) if args.out else None
    net, xml = generate_network(params, tax, seed)
    if out is None:
        sys.stdout.write(xml)
    else:
        out.write_text(xml, encoding="utf-8")
    if not args.quiet:
        print(f"registries={len(net)} services={net.service_count}", file=sys.stderr)
    return EXIT_OK


# -- entry point --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario file (flat key = value)")
    common.add_argument("--out", help="output path; stdout when omitted")
    common.add_argument("--seed", type=_u64, help="override the scenario's seed list with one seed")
    common.add_argument("--quiet", action="store_true", help="suppress summaries on stderr")

    parser = _Parser(prog="beehive", description="Bees-algorithm web service discovery toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", parents=[common], help="write a synthetic network file")
    gen.add_argument("--registries", type=int, default=10)
    gen.add_argument("--services", default="3-8", help="services per registry, 'min-max'")
    gen.add_argument("--k", type=int, default=4, help="peers per registry under taxonomy-proximity")
    gen.add_argument("--adjacency", default="taxonomy-proximity", choices=["taxonomy-proximity", "none"])
    gen.add_argument("--attributes", help="e.g. availability:higher,cost:lower")
    gen.add_argument("--taxonomy", default="builtin", help="taxonomy file, 'builtin' or 'balanced:BxL'")
    gen.set_defaults(func=cmd_generate)

    dis = sub.add_parser("discover", parents=[common], help="run discovery per seed and method")
    dis.set_defaults(func=cmd_discover)

    subs = sub.add_parser("substitute", parents=[common], help="replay failure injections")
    subs.add_argument("--cache-dump", help="write the final equivalence cache as two columns")
    subs.set_defaults(func=cmd_substitute)

    bench = sub.add_parser("bench", parents=[common], help="aggregate comparison of methods")
    bench.add_argument("--methods", help="override the scenario's methods, e.g. bees,sweep,ga")
    bench.set_defaults(func=cmd_bench)
    return parser


def _setup_logging():
    level = os.environ.get("BEEHIVE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except DOMAIN_ERRORS as exc:
        return _fail(EXIT_DOMAIN, str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))
    except (BeehiveError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        return _fail(EXIT_USAGE, str(msg))


if __name__ == "__main__":
    sys.exit(main())
