"""Command-line interface for the mapping pipeline and its stages.

Exit code 0 on success; failures print an error JSON to stderr and exit 1.
The SWARMTOPO_OUT environment variable overrides the output directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import fileio, svgplot
from .classifier import IntervalSet, TrainingGrid, train
from .diagram_metrics import bottleneck_distance
from .mds import classical_mds
from .metric import build_encounter_graph, shortest_path_metric
from .persistence import rips_diagram
from .pipeline import (
    PRESETS,
    ScenarioConfig,
    generate_hole_ensembles,
    run_pipeline,
    run_seed,
    run_sweep,
)
from .simulate import simulate
from .subsample import knn_filter, maxmin_subsample


def _load_config(args) -> ScenarioConfig:
    if args.preset:
        return PRESETS[args.preset]()
    if not args.config:
        raise ValueError("need --config <path> or --preset <name>")
    return ScenarioConfig.from_json_file(args.config)


def _out_dir(args) -> Path:
    out = os.environ.get("SWARMTOPO_OUT") or args.out
    if not out:
        raise ValueError("need --out <dir> (or SWARMTOPO_OUT)")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _cmd_simulate(args) -> int:
    config = _load_config(args)
    out = _out_dir(args)
    seed = args.seed if args.seed is not None else config.seeds[0]
    result = simulate(
        config.domain,
        config.n_agents,
        config.crw,
        config.sensing,
        config.duration,
        config.n_landmarks,
        config.dispersion_time,
        seed,
        comm_radius=config.comm_radius,
        trajectory_stride=args.trajectory_stride,
    )
    fileio.write_events_csv(out / "events.csv", result.events, args.withhold_truth)
    fileio.write_communities_json(out / "communities.json", result.communities)
    if args.dump_trajectories:
        fileio.write_trajectories_csv(out / "trajectories.csv", result.trajectories)
    print(f"{len(result.events)} events, {len(result.landmark_ids)} landmarks -> {out}")
    return 0


def _cmd_metric(args) -> int:
    config = _load_config(args)
    out = _out_dir(args)
    events = fileio.read_events_csv(args.events)
    communities = fileio.read_communities_json(args.communities, events)
    graph = build_encounter_graph(events, communities, config.crw.speed)
    dist = shortest_path_metric(graph)
    fileio.write_distance_matrix(out / "distances.csv", dist)
    print(f"{graph.n_events} events, {graph.n_edges} edges -> {out / 'distances.csv'}")
    return 0


def _cmd_embed(args) -> int:
    out = _out_dir(args)
    dist = fileio.read_distance_matrix(args.distances)
    emb = classical_mds(dist)
    fileio.write_coordinates_csv(out / "coords.csv", emb.coordinates)
    svgplot.write_scatter_svg(out / "embedding.svg", emb.coordinates, "MDS embedding")
    print(f"stress {emb.stress:.4f} -> {out / 'coords.csv'}")
    return 0


def _cmd_subsample(args) -> int:
    out = _out_dir(args)
    dist = fileio.read_distance_matrix(args.distances)
    kept = knn_filter(dist, args.k, args.q)
    sample = maxmin_subsample(dist, kept, min(args.size, len(kept)), args.seed or 0)
    fileio.write_indices_json(out / "kept.json", kept)
    fileio.write_indices_json(out / "sample.json", sample)
    print(f"kept {len(kept)} of {len(dist)}, sampled {len(sample)}")
    return 0


def _cmd_persist(args) -> int:
    out = _out_dir(args)
    dist = fileio.read_distance_matrix(args.distances)
    if args.indices:
        idx = fileio.read_indices_json(args.indices)
        dist = dist[np.ix_(idx, idx)]
    diagram = rips_diagram(dist, args.max_scale)
    fileio.write_diagram_csv(out / "diagram.csv", diagram)
    svgplot.write_diagram_svg(out / "diagram.svg", diagram)
    print(f"{len(diagram.features)} features -> {out / 'diagram.csv'}")
    return 0


def _cmd_bottleneck(args) -> int:
    out = _out_dir(args)
    a = fileio.read_diagram_csv(args.a)
    b = fileio.read_diagram_csv(args.b)
    result = bottleneck_distance(a, b, args.dim)
    fileio.write_bottleneck_json(out / "bottleneck.json", result)
    print(f"d_B = {result.distance}")
    return 0


def _cmd_classify_train(args) -> int:
    out = _out_dir(args)
    ensembles = generate_hole_ensembles(args.runs, args.holes, args.seed or 7)
    result = train(ensembles, TrainingGrid(), alpha=args.alpha)
    fileio.write_params_json(out / "params_dim1.json", 1, result.params, result.hard_error)
    print(
        f"optimum q={result.params.q} delta={result.params.delta} tau={result.params.tau} "
        f"(smoothed {result.smoothed_error:.4f}, hard {result.hard_error:.4f})"
    )
    return 0


def _cmd_classify_eval(args) -> int:
    out = _out_dir(args)
    diagram = fileio.read_diagram_csv(args.diagram)
    dim, params, _ = fileio.read_params_json(args.params)
    from .classifier import estimate_betti

    outcome = estimate_betti(IntervalSet.from_diagram(diagram, dim), params)
    report = {
        "dim": dim,
        "beta_hat": outcome.beta_hat,
        "signal_indices": sorted(outcome.signal_indices),
        "scores": [float(s) for s in outcome.normalized_scores],
    }
    (out / "classification.json").write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
    print(f"beta_hat = {outcome.beta_hat}")
    return 0


def _cmd_pipeline(args) -> int:
    config = _load_config(args)
    out = _out_dir(args)
    result = run_pipeline(config, withhold_truth=args.withhold_truth, out_dir=out)
    n_fail = sum(1 for o in result.outcomes if o.failure)
    for o in result.outcomes:
        if o.failure:
            print(f"seed {o.seed}: FAILED ({o.failure})")
        else:
            lam = "n/a" if math.isnan(o.lambda3) else f"{o.lambda3:.3f}"
            print(
                f"seed {o.seed}: events={o.n_events} beta0={o.beta0} beta1={o.beta1} "
                f"lambda3={lam}"
            )
    print(f"manifest: {result.manifest_path}")
    if n_fail:
        print(json.dumps({"error": "PipelineFailure", "failed_seeds": n_fail}), file=sys.stderr)
        return 1
    return 0


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    out = _out_dir(args)
    values = [int(v) for v in args.values.split(",")]
    rows = run_sweep(config, args.parameter, values, args.seeds_per_value, out_dir=out)
    for r in rows:
        if r["seed"] == "mean":
            print(f"value {r['value']}: mean lambda3 {r['lambda3']:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmtopo",
        description="Map an unknown 2D environment from swarm encounter events.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", help="scenario config JSON")
            p.add_argument("--preset", choices=sorted(PRESETS), help="built-in scenario")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("simulate", help="run the swarm and write events")
    common(p)
    p.add_argument("--withhold-truth", action="store_true")
    p.add_argument("--dump-trajectories", action="store_true")
    p.add_argument("--trajectory-stride", type=int, default=20)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("metric", help="encounter graph shortest-path metric")
    common(p)
    p.add_argument("--events", required=True)
    p.add_argument("--communities", required=True)
    p.set_defaults(func=_cmd_metric)

    p = sub.add_parser("embed", help="classical MDS of a distance matrix")
    common(p, config=False)
    p.add_argument("--distances", required=True)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("subsample", help="KNN filter plus maxmin subsample")
    common(p, config=False)
    p.add_argument("--distances", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--q", type=float, default=0.9)
    p.add_argument("--size", type=int, default=150)
    p.set_defaults(func=_cmd_subsample)

    p = sub.add_parser("persist", help="Rips persistence diagram")
    common(p, config=False)
    p.add_argument("--distances", required=True)
    p.add_argument("--indices", help="JSON index list restricting the matrix")
    p.add_argument("--max-scale", type=float, default=None)
    p.set_defaults(func=_cmd_persist)

    p = sub.add_parser("bottleneck", help="bottleneck distance of two diagrams")
    common(p, config=False)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--dim", type=int, default=1)
    p.set_defaults(func=_cmd_bottleneck)

    p = sub.add_parser("classify-train", help="train the interval classifier")
    common(p, config=False)
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--holes", type=int, default=2)
    p.add_argument("--alpha", type=float, default=20.0)
    p.set_defaults(func=_cmd_classify_train)

    p = sub.add_parser("classify-eval", help="classify a diagram's intervals")
    common(p, config=False)
    p.add_argument("--diagram", required=True)
    p.add_argument("--params", required=True)
    p.set_defaults(func=_cmd_classify_eval)

    p = sub.add_parser("pipeline", help="full per-seed pipeline with artifacts")
    common(p)
    p.add_argument("--withhold-truth", action="store_true")
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("sweep", help="sweep agent or landmark counts")
    common(p)
    p.add_argument("--parameter", choices=["n_agents_moving", "n_landmarks"], required=True)
    p.add_argument("--values", required=True, help="comma-separated counts")
    p.add_argument("--seeds-per-value", type=int, default=5)
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
