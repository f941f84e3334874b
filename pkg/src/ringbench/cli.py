"""Command-line surface: generate, analyze, split, sweep, ablate, evaluate,
baseline.

Exit codes: 0 success, 1 configuration error, 2 IO error, 3 validation
failure. Every command prints the configuration it ran with, so any output
is reproducible from its own log.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ._version import __version__
from .baselines import (
    GRAPH_AGGREGATE,
    TABULAR,
    predict,
    train_graph_aggregate,
    train_tabular,
)
from .config import (
    GeneratorConfig,
    load_config_file,
    resolved_from_echo,
)
from .errors import ConfigError, GenerationError, RingbenchError, ValidationError
from .export import export_bundle, load_bundle
from .graph import drop_relation, drop_user_feature
from .metrics import auc_roc, evaluate_scores, read_score_file, write_score_file
from .pipeline import generate
from .rng import make_rng
from .schema import RING_TYPE_NAMES
from .split import split as split_users
from .stats import cohens_d, homophily, motif_fingerprints

SWEEP_RING_SIZES = (3, 5, 8, 12, 20, 30)
SWEEP_SMALL_TEST_RINGS = 3


def _cmd_generate(args) -> int:
    if args.config:
        config = load_config_file(args.config)
    else:
        overrides = {}
        if args.ring_size is not None:
            overrides = {t: (args.ring_size, args.ring_size)
                         for t in ("ticketing", "ghost_hotel", "ato")}
        config = GeneratorConfig(
            scale=None if args.users is not None else args.scale,
            n_users=args.users,
            seed=args.seed,
            n_ticketing_rings=args.rings_ticketing,
            n_ghost_hotel_rings=args.rings_ghost,
            n_ato_rings=args.rings_ato,
            ring_size_overrides=overrides,
            fraud_rate_target=args.fraud_rate,
            feature_exclusions=frozenset(args.drop_feature or ()),
            relation_exclusions=frozenset(args.drop_relation or ()),
            widen_ring_bounds=args.widen_ring_bounds or args.ring_size is not None,
            split_fractions=tuple(args.fractions),
        )
    result = generate(config=config)
    assignment = split_users(result.graph, result.rings,
                             result.resolved.split_fractions,
                             make_rng(result.resolved.seed, "split"))
    manifest = export_bundle(result.graph, result.rings, assignment,
                             result.resolved, args.out, result.fraud_rate)
    print(f"config: {json.dumps(result.resolved.echo(), sort_keys=True)}")
    for node_type, count in manifest["counts"]["nodes"].items():
        print(f"  {node_type:<16}{count:>9}")
    print(f"  {'total edges':<16}{sum(manifest['counts']['edges'].values()):>9}")
    print(f"  rings           {manifest['counts']['rings']:>9}")
    print(f"  fraud rate      {result.fraud_rate:>9.4f}")
    print(f"bundle digest: {manifest['bundle_digest']}")
    print(f"wrote {args.out}")
    return 0


def _cmd_analyze(args) -> int:
    graph, rings, _assignment = load_bundle(args.bundle)
    motifs = motif_fingerprints(graph, rings)
    hom = homophily(graph)
    cal = cohens_d(graph)
    print("== motif fingerprints ==")
    print(motifs.to_text())
    print("== edge homophily ==")
    print(hom.to_text())
    print("== feature calibration (fraud vs legit) ==")
    print(cal.to_text())
    print(f"calibration gate (<{cal.limit}): {'pass' if cal.passed else 'FAIL'}")
    if args.csv_dir:
        out = Path(args.csv_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "motifs.csv").write_text(motifs.to_csv(), encoding="utf-8")
        (out / "homophily.csv").write_text(hom.to_csv(), encoding="utf-8")
        (out / "calibration.csv").write_text(cal.to_csv(), encoding="utf-8")
        print(f"wrote CSV reports to {out}")
    return 0


def _cmd_split(args) -> int:
    graph, rings, _old = load_bundle(args.bundle)
    assignment = split_users(graph, rings, tuple(args.fractions),
                             make_rng(args.seed, "split"))
    for warning in assignment.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    from .export import _split_rings_csv, _split_users_csv
    (out / "split_users.csv").write_text(_split_users_csv(assignment), encoding="utf-8")
    (out / "split_rings.csv").write_text(_split_rings_csv(assignment), encoding="utf-8")
    sizes = [int((assignment.user_partition == i).sum()) for i in range(3)]
    print(f"user partitions train/val/test: {sizes[0]}/{sizes[1]}/{sizes[2]}")
    print(f"wrote {out}/split_users.csv and {out}/split_rings.csv")
    return 0


def _cmd_evaluate(args) -> int:
    graph, rings, assignment = load_bundle(args.bundle)
    scores = read_score_file(args.scores)
    report = evaluate_scores(scores, graph.nodes["user"].labels, rings, assignment)
    print(report.to_text())
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
        print(f"wrote {args.csv}")
    return 0


def _cmd_baseline(args) -> int:
    graph, rings, assignment = load_bundle(args.bundle)
    rng = make_rng(args.seed, f"baseline/{args.model}")
    if args.model == "tabular":
        model = train_tabular(graph, assignment, rng)
    else:
        model = train_graph_aggregate(graph, assignment, rng)
    scores = predict(model, graph)
    write_score_file(args.out, scores)
    labels = graph.nodes["user"].labels
    test_ids = assignment.users_in("test")
    print(f"model: {model.kind} ({model.n_features} features)")
    if np.unique(labels[test_ids]).size == 2:
        test_auc = auc_roc([scores[int(u)] for u in test_ids], labels[test_ids])
        print(f"test AUC: {test_auc:.4f}")
    else:
        print("test AUC: n/a (single-class test partition)")
    print(f"wrote {args.out}")
    return 0


def _cmd_ablate(args) -> int:
    graph, rings, assignment = load_bundle(args.bundle)
    manifest = json.loads((Path(args.bundle) / "manifest.json").read_text(encoding="utf-8"))
    resolved = resolved_from_echo(manifest["config"])
    for relation in args.drop_relation or ():
        graph = drop_relation(graph, relation)
    for feature in args.drop_feature or ():
        graph = drop_user_feature(graph, feature)
    out_manifest = export_bundle(graph, rings, assignment, resolved, args.out,
                                 manifest.get("observed_fraud_rate"))
    print(f"bundle digest: {out_manifest['bundle_digest']}")
    print(f"wrote {args.out}")
    return 0


def sweep_ring_count(ring_size: int) -> int:
    """Rings per type for a sweep condition: floor division, minimum 2."""
    return max(2, 300 // (ring_size * 3))


def run_sweep(scale: str, seed: int, out_path: str | Path) -> list[dict]:
    """Difficulty sweep: for each ring size, regenerate, train the
    graph-aggregate baseline, and report per-type test AUC."""
    rows: list[dict] = []
    for ring_size in SWEEP_RING_SIZES:
        n_rings = sweep_ring_count(ring_size)
        result = generate(
            scale=scale,
            seed=seed,
            n_ticketing_rings=n_rings,
            n_ghost_hotel_rings=n_rings,
            n_ato_rings=n_rings,
            ring_size_overrides={t: (ring_size, ring_size)
                                 for t in ("ticketing", "ghost_hotel", "ato")},
            widen_ring_bounds=True,
        )
        assignment = split_users(result.graph, result.rings,
                                 result.resolved.split_fractions,
                                 make_rng(seed, "split"))
        model = train_graph_aggregate(
            result.graph, assignment, make_rng(seed, f"sweep/{ring_size}"))
        scores = predict(model, result.graph)
        users = result.graph.nodes["user"]
        test_ids = assignment.users_in("test")
        test_scores = np.array([scores[int(u)] for u in test_ids])
        test_types = users.ring_types[test_ids]
        legit_mask = test_types == 0
        test_ring_ids = [rid for rid, p in assignment.ring_partition.items() if p == 2]
        rings_by_id = {r.ring_id: r for r in result.rings}
        for type_code, type_name in RING_TYPE_NAMES.items():
            pos_mask = test_types == type_code
            n_test_rings = sum(
                1 for rid in test_ring_ids
                if rings_by_id[rid].ring_type == type_code
            )
            if pos_mask.any() and legit_mask.any():
                mask = pos_mask | legit_mask
                auc = auc_roc(test_scores[mask], (test_types[mask] > 0).astype(int))
            else:
                auc = float("nan")
            warn = n_test_rings <= SWEEP_SMALL_TEST_RINGS
            rows.append({
                "ring_size": ring_size,
                "ring_type": type_name,
                "n_rings": n_rings,
                "n_test_rings": n_test_rings,
                "auc": auc,
                "low_test_rings_warning": warn,
            })
    header = "ring_size,ring_type,n_rings,n_test_rings,auc,low_test_rings_warning"
    lines = [header]
    for r in rows:
        auc_s = "nan" if np.isnan(r["auc"]) else repr(r["auc"])
        lines.append(f"{r['ring_size']},{r['ring_type']},{r['n_rings']},"
                     f"{r['n_test_rings']},{auc_s},{int(r['low_test_rings_warning'])}")
    Path(out_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return rows


def _cmd_sweep(args) -> int:
    rows = run_sweep(args.scale, args.seed, args.out)
    for r in rows:
        if r["low_test_rings_warning"]:
            print(
                f"warning: ring_size={r['ring_size']} leaves only "
                f"{r['n_test_rings']} {r['ring_type']} ring(s) in the test "
                f"partition; the AUC estimate is unreliable",
                file=sys.stderr,
            )
    print(f"wrote {len(rows)} sweep rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringbench",
        description="Deterministic travel-fraud ring graph generator and harness",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a graph and export a bundle")
    g.add_argument("--scale", default="medium",
                   choices=["toy", "small", "medium", "large", "xlarge"])
    g.add_argument("--users", type=int, default=None,
                   help="explicit user count (overrides --scale)")
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--rings-ticketing", type=int, default=None)
    g.add_argument("--rings-ghost", type=int, default=None)
    g.add_argument("--rings-ato", type=int, default=None)
    g.add_argument("--ring-size", type=int, default=None,
                   help="fix every ring's member count (implies widened bounds)")
    g.add_argument("--fraud-rate", type=float, default=None)
    g.add_argument("--drop-relation", action="append", default=None)
    g.add_argument("--drop-feature", action="append", default=None)
    g.add_argument("--fractions", nargs=3, type=float, default=[0.6, 0.2, 0.2],
                   metavar=("TRAIN", "VAL", "TEST"))
    g.add_argument("--widen-ring-bounds", action="store_true")
    g.add_argument("--config", default=None, help="YAML config file")
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_generate)

    a = sub.add_parser("analyze", help="motif/homophily/calibration reports")
    a.add_argument("--bundle", required=True)
    a.add_argument("--csv-dir", default=None)
    a.set_defaults(func=_cmd_analyze)

    s = sub.add_parser("split", help="re-split a bundle's users and rings")
    s.add_argument("--bundle", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--fractions", nargs=3, type=float, default=[0.6, 0.2, 0.2],
                   metavar=("TRAIN", "VAL", "TEST"))
    s.set_defaults(func=_cmd_split)

    w = sub.add_parser("sweep", help="ring-size difficulty sweep over the "
                                     "graph-aggregate baseline")
    w.add_argument("--scale", default="medium",
                   choices=["toy", "small", "medium", "large", "xlarge"])
    w.add_argument("--seed", type=int, default=42)
    w.add_argument("--out", required=True)
    w.set_defaults(func=_cmd_sweep)

    e = sub.add_parser("evaluate", help="score a prediction file against a bundle")
    e.add_argument("--bundle", required=True)
    e.add_argument("--scores", required=True)
    e.add_argument("--csv", default=None)
    e.set_defaults(func=_cmd_evaluate)

    b = sub.add_parser("baseline", help="train a native baseline, emit scores")
    b.add_argument("--bundle", required=True)
    b.add_argument("--model", choices=["tabular", "graph"], default="graph")
    b.add_argument("--seed", type=int, default=42)
    b.add_argument("--out", required=True)
    b.set_defaults(func=_cmd_baseline)

    ab = sub.add_parser("ablate", help="drop relations/features, re-export")
    ab.add_argument("--bundle", required=True)
    ab.add_argument("--drop-relation", action="append", default=None)
    ab.add_argument("--drop-feature", action="append", default=None)
    ab.add_argument("--out", required=True)
    ab.set_defaults(func=_cmd_ablate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, GenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    except RingbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
