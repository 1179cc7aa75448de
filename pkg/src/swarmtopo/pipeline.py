"""End-to-end experiment pipeline: simulate, estimate, embed, classify.

Per seed the chain is events -> encounter graph -> shortest-path metric ->
subsample -> persistence, with the landmark-community route and the
geodesic ground truth alongside for evaluation.  Artifacts land in a
per-seed directory and a manifest records content hashes so reruns are
verifiable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import fileio, svgplot
from .classifier import (
    PRESET_DIM0,
    PRESET_DIM1,
    ClassifierParams,
    IntervalSet,
    classify_diagram,
    snr,
)
from .diagram_metrics import bottleneck_distance
from .geodesic import estimate_deltas, pairwise_geodesics, reference_point_cloud
from .geometry import Domain
from .mds import classical_mds
from .metric import (
    build_encounter_graph,
    community_distances,
    estimate_lambda3,
    shortest_path_metric,
)
from .persistence import PersistenceDiagram, rips_diagram
from .simulate import CrwParams, SensingParams, simulate
from .subsample import SubsampleParams, knn_filter, maxmin_subsample


@dataclass
class ScenarioConfig:
    domain: Domain
    n_agents: int
    n_landmarks: int
    duration: float
    dispersion_time: float
    crw: CrwParams
    sensing: SensingParams
    subsample: SubsampleParams
    seeds: list[int]
    output_dir: str = "out"
    comm_radius: float | None = None
    ref_spacing: float = 2.0
    delta_spacing: float = 1.5
    rips_max_scale: float | None = None

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("seeds must be non-empty")

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.to_dict(),
            "n_agents": self.n_agents,
            "n_landmarks": self.n_landmarks,
            "duration": self.duration,
            "dispersion_time": self.dispersion_time,
            "crw": {
                "char_length": self.crw.char_length,
                "speed": self.crw.speed,
                "stop_prob_per_segment": self.crw.stop_prob_per_segment,
                "stop_duration_mean": self.crw.stop_duration_mean,
            },
            "sensing": {
                "detection_radius": self.sensing.detection_radius,
                "sample_interval": self.sensing.sample_interval,
            },
            "subsample": {
                "k": self.subsample.k,
                "q": self.subsample.q,
                "target_size": self.subsample.target_size,
            },
            "seeds": list(self.seeds),
            "output_dir": self.output_dir,
            "comm_radius": self.comm_radius,
            "ref_spacing": self.ref_spacing,
            "delta_spacing": self.delta_spacing,
            "rips_max_scale": self.rips_max_scale,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        return cls(
            domain=Domain.from_dict(data["domain"]),
            n_agents=int(data["n_agents"]),
            n_landmarks=int(data["n_landmarks"]),
            duration=float(data["duration"]),
            dispersion_time=float(data["dispersion_time"]),
            crw=CrwParams(**data["crw"]),
            sensing=SensingParams(**data["sensing"]),
            subsample=SubsampleParams(**data["subsample"]),
            seeds=[int(s) for s in data["seeds"]],
            output_dir=data.get("output_dir", "out"),
            comm_radius=data.get("comm_radius"),
            ref_spacing=float(data.get("ref_spacing", 2.0)),
            delta_spacing=float(data.get("delta_spacing", 1.5)),
            rips_max_scale=data.get("rips_max_scale"),
        )

    @classmethod
    def from_json_file(cls, path) -> "ScenarioConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def scenario1_desk(seeds=None) -> ScenarioConfig:
    """30 m empty square, desk scale."""
    return _desk_config([], seeds)


def scenario2_desk(seeds=None) -> ScenarioConfig:
    """30 m square with one centered 8 m square obstacle."""
    return _desk_config([[[11, 11], [19, 11], [19, 19], [11, 19]]], seeds)


def scenario3_desk(seeds=None) -> ScenarioConfig:
    """30 m square with two 6 m square obstacles."""
    return _desk_config(
        [
            [[5, 12], [11, 12], [11, 18], [5, 18]],
            [[19, 12], [25, 12], [25, 18], [19, 18]],
        ],
        seeds,
    )


def scenario2_paper(seeds=None) -> ScenarioConfig:
    """Paper-scale single obstacle run (slow).

    The reported sensing radius of 0.01 m makes encounters vanishingly rare
    at this density, so the desk default of 0.5 m is kept here as well.
    """
    return ScenarioConfig(
        domain=Domain(50, 50, [[[18, 18], [32, 18], [32, 32], [18, 32]]]),
        n_agents=150,
        n_landmarks=20,
        duration=200.0,
        dispersion_time=20.0,
        crw=CrwParams(char_length=0.30, speed=0.1),
        sensing=SensingParams(detection_radius=0.5, sample_interval=1.0),
        subsample=SubsampleParams(),
        seeds=seeds or [1],
        ref_spacing=3.0,
        delta_spacing=2.5,
    )


def _desk_config(obstacles, seeds) -> ScenarioConfig:
    return ScenarioConfig(
        domain=Domain(30, 30, obstacles),
        n_agents=80,
        n_landmarks=12,
        duration=300.0,
        dispersion_time=30.0,
        crw=CrwParams(char_length=0.8, speed=0.2),
        sensing=SensingParams(detection_radius=0.5, sample_interval=0.25),
        subsample=SubsampleParams(k=10, q=0.9, target_size=150),
        seeds=seeds or list(range(1, 21)),
        comm_radius=4.5,
        ref_spacing=2.0,
        delta_spacing=1.5,
    )


PRESETS = {
    "scenario1-desk": scenario1_desk,
    "scenario2-desk": scenario2_desk,
    "scenario3-desk": scenario3_desk,
    "scenario2-paper": scenario2_paper,
}


# -- reference diagrams -------------------------------------------------------

_REFERENCE_CACHE: dict = {}


def compute_reference(domain: Domain, spacing: float, max_scale: float | None = None):
    """Grid sampling of the free space, its geodesic metric and diagram."""
    key = (json.dumps(domain.to_dict(), sort_keys=True), spacing, max_scale)
    if key not in _REFERENCE_CACHE:
        points, dist = reference_point_cloud(domain, spacing)
        diagram = rips_diagram(dist, max_scale)
        _REFERENCE_CACHE[key] = (points, dist, diagram)
    return _REFERENCE_CACHE[key]


@dataclass
class SeedOutcome:
    seed: int
    n_events: int = 0
    n_component_events: int = 0
    lambda3: float = math.nan
    delta_e: float = math.nan
    delta_l: float = math.nan
    db_p: dict = field(default_factory=dict)  # dim -> bottleneck(PD_M, PD_P)
    db_l: dict = field(default_factory=dict)
    beta0: int = 0
    beta1: int = 0
    stability_rhs: float = math.nan
    stability_ok: bool | None = None
    max_true_distance: float = math.nan
    stress: float = math.nan
    snr_value: float = math.nan
    tp: int = 0
    fn: int = 0
    fp: int = 0
    failure: str | None = None
    diagram_p: PersistenceDiagram | None = None
    diagram_l: PersistenceDiagram | None = None
    outcome1: object = None


def _largest_component_indices(graph) -> np.ndarray:
    n, labels = connected_components(graph.to_sparse(), directed=False)
    if n <= 1:
        return np.arange(graph.n_events)
    counts = np.bincount(labels)
    return np.nonzero(labels == int(np.argmax(counts)))[0]


def _nearest_free_point(domain: Domain, p, step: float = 0.05) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if domain.contains_point(p):
        return p
    for r_mult in range(1, 400):
        r = r_mult * step
        for a in np.linspace(0, 2 * np.pi, 16, endpoint=False):
            cand = p + r * np.array([np.cos(a), np.sin(a)])
            if domain.contains_point(cand):
                return cand
    raise ValueError("no free point near the requested position")


def _hole_detection(
    diagram_m: PersistenceDiagram,
    diagram_p: PersistenceDiagram,
    signal_set: set[int],
    true_holes: int,
):
    """Attribute classified dim-1 signals to true holes via bottleneck matching."""
    feats_m = [f for f in diagram_m.features if f[0] == 1]
    feats_p = [f for f in diagram_p.features if f[0] == 1]
    fin_m = [i for i, f in enumerate(feats_m) if math.isfinite(f[2])]
    fin_p = [i for i, f in enumerate(feats_p) if math.isfinite(f[2])]
    if true_holes == 0:
        return 0, 0, len(signal_set)
    by_pers = sorted(fin_m, key=lambda i: feats_m[i][1] - feats_m[i][2])
    hole_feats = set(by_pers[:true_holes])
    signal_positions = {fin_p[k] for k in signal_set if k < len(fin_p)}
    match = bottleneck_distance(diagram_m, diagram_p, 1).matching
    detected = set()
    fp = 0
    for i_m, j_p in match:
        if j_p is not None and j_p in signal_positions:
            if i_m is not None and i_m in hole_feats:
                detected.add(i_m)
            else:
                fp += 1
    tp = len(detected)
    return tp, true_holes - tp, fp


def run_seed(
    config: ScenarioConfig,
    seed: int,
    withhold_truth: bool = False,
    params_dim0: ClassifierParams = PRESET_DIM0,
    params_dim1: ClassifierParams = PRESET_DIM1,
    out_dir: Path | None = None,
    plain_maxmin: bool = False,
) -> SeedOutcome:
    """One seed of the full chain; artifacts written when out_dir is given."""
    outcome = SeedOutcome(seed=seed)
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
        trajectory_stride=20,
    )
    events = result.events
    outcome.n_events = len(events)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        fileio.write_events_csv(out_dir / "events.csv", events, withhold_truth)
        fileio.write_communities_json(out_dir / "communities.json", result.communities)
    if len(events) < 4:
        raise ValueError(f"seed {seed}: too few events ({len(events)}) for the pipeline")

    graph = build_encounter_graph(events, result.communities, config.crw.speed)
    dist = shortest_path_metric(graph)
    comp = _largest_component_indices(graph)
    outcome.n_component_events = len(comp)
    sub = dist[np.ix_(comp, comp)]

    if plain_maxmin:
        kept_local = np.arange(len(comp))
    else:
        kept_local = knn_filter(sub, min(config.subsample.k, len(comp) - 1), config.subsample.q)
    target = min(config.subsample.target_size, len(kept_local))
    sample_local = maxmin_subsample(sub, kept_local, target, seed)
    sample = comp[sample_local]
    cloud = dist[np.ix_(sample, sample)]

    diagram_p = rips_diagram(cloud, config.rips_max_scale)
    outcome.diagram_p = diagram_p

    communities_used = [c for c in result.communities if c.event_indices]
    comm_dist = community_distances(dist, communities_used) if communities_used else np.zeros((0, 0))
    diagram_l = rips_diagram(comm_dist, config.rips_max_scale) if len(comm_dist) else None
    outcome.diagram_l = diagram_l

    embedding = classical_mds(cloud)
    outcome.stress = embedding.stress

    beta0, beta1, out0, out1 = classify_diagram(diagram_p, params_dim0, params_dim1)
    outcome.beta0, outcome.beta1 = beta0, beta1
    outcome.outcome1 = out1
    if out1.noise_indices:
        outcome.snr_value = snr([out1])

    if out_dir is not None:
        fileio.write_distance_matrix(out_dir / "distances.csv", dist)
        fileio.write_indices_json(out_dir / "kept.json", comp[kept_local])
        fileio.write_indices_json(out_dir / "sample.json", sample)
        fileio.write_coordinates_csv(out_dir / "coords.csv", embedding.coordinates)
        svgplot.write_scatter_svg(out_dir / "embedding.svg", embedding.coordinates, "MDS embedding")
        fileio.write_diagram_csv(out_dir / "diagram_p.csv", diagram_p)
        if diagram_l is not None:
            fileio.write_diagram_csv(out_dir / "diagram_l.csv", diagram_l)
            fileio.write_distance_matrix(out_dir / "community_distances.csv", comm_dist)
        r1 = diagram_p.interval_lengths(1)
        offset = None
        if len(r1):
            r_q = float(np.quantile(r1, params_dim1.q))
            offset = params_dim1.tau * (r_q + params_dim1.delta)
        svgplot.write_diagram_svg(out_dir / "diagram_p.svg", diagram_p, "encounter diagram", offset)

    if not withhold_truth:
        _evaluate_truth(config, outcome, events, communities_used, comm_dist, diagram_p, diagram_l, out1)

    if out_dir is not None:
        _write_seed_reports(out_dir, config, outcome)
    return outcome


def _evaluate_truth(config, outcome, events, communities_used, comm_dist, diagram_p, diagram_l, out1):
    domain = config.domain
    _, _, diagram_m = compute_reference(domain, config.ref_spacing, config.rips_max_scale)
    usable = [c for c in communities_used if c.centroid is not None]
    if len(usable) >= 2:
        cents = np.array([_nearest_free_point(domain, c.centroid) for c in usable])
        truth = pairwise_geodesics(domain, cents)
        idx = [communities_used.index(c) for c in usable]
        est = comm_dist[np.ix_(idx, idx)]
        conv = estimate_lambda3(est, truth, 0.95)
        outcome.lambda3 = conv.lambda3_hat
        outcome.max_true_distance = float(truth[np.isfinite(truth)].max())
        delta_e, delta_l = estimate_deltas(events, usable, domain, config.delta_spacing)
        outcome.delta_e, outcome.delta_l = delta_e, delta_l
    for dim in (0, 1):
        outcome.db_p[dim] = bottleneck_distance(diagram_m, diagram_p, dim).distance
        if diagram_l is not None:
            outcome.db_l[dim] = bottleneck_distance(diagram_m, diagram_l, dim).distance
    if math.isfinite(outcome.lambda3) and math.isfinite(outcome.delta_l):
        outcome.stability_rhs = (1 + outcome.lambda3) * (2 * outcome.delta_l + outcome.delta_e)
        db_max = max(v for v in outcome.db_p.values())
        outcome.stability_ok = bool(db_max <= outcome.stability_rhs)
    tp, fn, fp = _hole_detection(diagram_m, diagram_p, out1.signal_indices, len(domain.obstacles))
    outcome.tp, outcome.fn, outcome.fp = tp, fn, fp


def _write_seed_reports(out_dir: Path, config: ScenarioConfig, outcome: SeedOutcome):
    est = {
        "lambda3": _json_num(outcome.lambda3),
        "delta_e": _json_num(outcome.delta_e),
        "delta_l": _json_num(outcome.delta_l),
        "stability_rhs": _json_num(outcome.stability_rhs),
        "stability_ok": outcome.stability_ok,
        "max_true_distance": _json_num(outcome.max_true_distance),
    }
    (out_dir / "estimates.json").write_text(json.dumps(est, indent=1, sort_keys=True) + "\n")
    if outcome.db_p:
        db = {
            "pd_m_vs_pd_p": {str(k): _json_num(v) for k, v in outcome.db_p.items()},
            "pd_m_vs_pd_l": {str(k): _json_num(v) for k, v in outcome.db_l.items()},
        }
        (out_dir / "bottleneck.json").write_text(json.dumps(db, indent=1, sort_keys=True) + "\n")
    report = {
        "seed": outcome.seed,
        "n_events": outcome.n_events,
        "beta0": outcome.beta0,
        "beta1": outcome.beta1,
        "snr": _json_num(outcome.snr_value),
        "tp": outcome.tp,
        "fn": outcome.fn,
        "fp": outcome.fp,
        "stress": _json_num(outcome.stress),
    }
    (out_dir / "classification.json").write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")


def _json_num(x):
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf"
    return x


@dataclass
class PipelineResult:
    outcomes: list[SeedOutcome]
    manifest_path: Path | None
    output_dir: Path | None


def run_pipeline(
    config: ScenarioConfig,
    withhold_truth: bool = False,
    out_dir=None,
    params_dim0: ClassifierParams = PRESET_DIM0,
    params_dim1: ClassifierParams = PRESET_DIM1,
) -> PipelineResult:
    """Run every configured seed; write artifacts and a hashed manifest."""
    root = Path(out_dir) if out_dir is not None else None
    outcomes = []
    failures: dict[str, str] = {}
    for seed in config.seeds:
        seed_dir = root / f"seed_{seed}" if root is not None else None
        try:
            outcomes.append(
                run_seed(
                    config,
                    seed,
                    withhold_truth=withhold_truth,
                    params_dim0=params_dim0,
                    params_dim1=params_dim1,
                    out_dir=seed_dir,
                )
            )
        except Exception as exc:  # noqa: BLE001 - preserve partial outputs
            failures[f"seed_{seed}"] = f"{type(exc).__name__}: {exc}"
            bad = SeedOutcome(seed=seed)
            bad.failure = str(exc)
            outcomes.append(bad)
    manifest_path = None
    if root is not None:
        root.mkdir(parents=True, exist_ok=True)
        if not withhold_truth:
            _, _, diagram_m = compute_reference(config.domain, config.ref_spacing, config.rips_max_scale)
            fileio.write_diagram_csv(root / "diagram_m.csv", diagram_m)
        (root / "config.json").write_text(
            json.dumps(config.to_dict(), indent=1, sort_keys=True) + "\n"
        )
        artifacts = [
            str(p.relative_to(root))
            for p in sorted(root.rglob("*"))
            if p.is_file() and p.name != "manifest.json"
        ]
        manifest_path = root / "manifest.json"
        fileio.write_manifest(manifest_path, root, artifacts, failures)
    return PipelineResult(outcomes, manifest_path, root)


def run_sweep(
    base: ScenarioConfig,
    parameter: str,
    values: list[int],
    seeds_per_value: int,
    out_dir=None,
) -> list[dict]:
    """Sweep moving-agent or landmark count; aggregate the seed metrics."""
    if parameter not in ("n_agents_moving", "n_landmarks"):
        raise ValueError("parameter must be n_agents_moving or n_landmarks")
    if len(values) < 2:
        raise ValueError("need at least 2 sweep values")
    seeds = list(base.seeds)
    while len(seeds) < seeds_per_value:
        seeds.append(seeds[-1] + 1)
    seeds = seeds[:seeds_per_value]

    rows = []
    movers = base.n_agents - base.n_landmarks
    for value in values:
        cfg_dict = base.to_dict()
        if parameter == "n_agents_moving":
            cfg_dict["n_agents"] = int(value) + base.n_landmarks
        else:
            cfg_dict["n_landmarks"] = int(value)
            cfg_dict["n_agents"] = movers + int(value)
        cfg_dict["seeds"] = seeds
        cfg = ScenarioConfig.from_dict(cfg_dict)
        for seed in seeds:
            out = run_seed(cfg, seed)
            rows.append(
                {
                    "value": int(value),
                    "seed": seed,
                    "lambda3": out.lambda3,
                    "db_pdp": max(out.db_p.values()) if out.db_p else math.nan,
                    "db_pdl": max(out.db_l.values()) if out.db_l else math.nan,
                    "delta_e": out.delta_e,
                    "delta_l": out.delta_l,
                }
            )

    means = []
    for value in values:
        vrows = [r for r in rows if r["value"] == value]
        means.append(
            {
                "value": int(value),
                "seed": "mean",
                **{
                    k: float(np.nanmean([r[k] for r in vrows]))
                    for k in ("lambda3", "db_pdp", "db_pdl", "delta_e", "delta_l")
                },
            }
        )

    if out_dir is not None:
        root = Path(out_dir)
        root.mkdir(parents=True, exist_ok=True)
        cols = ["value", "seed", "lambda3", "db_pdp", "db_pdl", "delta_e", "delta_l"]
        lines = [",".join(cols)]
        for r in means + rows:
            lines.append(",".join(str(r[c]) for c in cols))
        (root / "sweep.csv").write_text("\n".join(lines) + "\n")
        series = {
            name: [m[name] for m in means]
            for name in ("lambda3", "db_pdp", "db_pdl", "delta_e", "delta_l")
        }
        svgplot.write_trend_svg(root / "sweep.svg", values, series, f"sweep over {parameter}")
    return means + rows


# -- synthetic training ensembles ---------------------------------------------


def random_hole_domain(
    n_holes: int,
    rng: np.random.Generator,
    side: float = 30.0,
    hole_range: tuple[float, float] = (6.0, 8.0),
    wall_clearance: float = 3.0,
    hole_clearance: float = 4.0,
) -> Domain:
    """Square domain with randomly placed, well-separated square holes."""
    for _ in range(1000):
        polys = []
        boxes = []
        ok = True
        for _ in range(n_holes):
            size = rng.uniform(*hole_range)
            placed = False
            for _ in range(200):
                x0 = rng.uniform(wall_clearance, side - size - wall_clearance)
                y0 = rng.uniform(wall_clearance, side - size - wall_clearance)
                box = (x0, y0, x0 + size, y0 + size)
                if all(
                    box[2] + hole_clearance < b[0]
                    or b[2] + hole_clearance < box[0]
                    or box[3] + hole_clearance < b[1]
                    or b[3] + hole_clearance < box[1]
                    for b in boxes
                ):
                    boxes.append(box)
                    polys.append([[x0, y0], [x0 + size, y0], [x0 + size, y0 + size], [x0, y0 + size]])
                    placed = True
                    break
            if not placed:
                ok = False
                break
        if ok:
            return Domain(side, side, polys)
    raise ValueError("could not place the requested holes")


def sample_free_points(domain: Domain, n: int, rng: np.random.Generator) -> np.ndarray:
    out = []
    while len(out) < n:
        cand = np.column_stack(
            [rng.uniform(0, domain.width, n), rng.uniform(0, domain.height, n)]
        )
        out.extend(cand[domain.in_free_space(cand)].tolist())
    return np.asarray(out[:n])


def generate_hole_ensembles(
    n_runs: int,
    n_holes: int,
    seed: int,
    n_points: int = 450,
    subsample_to: int = 150,
    params: SubsampleParams | None = None,
) -> list[tuple[IntervalSet, int]]:
    """Sampled point clouds of random hole domains, reduced to dim-1 intervals.

    Mirrors the pipeline's subsampling: uniform free-space samples, geodesic
    metric, KNN filter, then maxmin down to `subsample_to` points.
    """
    params = params or SubsampleParams()
    rng = np.random.default_rng(seed)
    ensembles = []
    for run in range(n_runs):
        domain = random_hole_domain(n_holes, rng)
        pts = sample_free_points(domain, n_points, rng)
        dist = pairwise_geodesics(domain, pts)
        kept = knn_filter(dist, params.k, params.q)
        target = min(subsample_to, len(kept))
        sample = maxmin_subsample(dist, kept, target, seed * 1000 + run)
        diagram = rips_diagram(dist[np.ix_(sample, sample)])
        ensembles.append((IntervalSet.from_diagram(diagram, 1), n_holes))
    return ensembles
