"""Readers and writers for the on-disk artifact formats.

Floats are written with repr (shortest round-trip form) so every file reads
back bit-exactly; infinities use the token `inf`.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .classifier import ClassifierParams
from .diagram_metrics import MatchingResult
from .persistence import PersistenceDiagram
from .simulate import EncounterEvent, LandmarkCommunity, Trajectories


def _fmt(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


# -- events -------------------------------------------------------------


def write_events_csv(path, events: list[EncounterEvent], withhold_truth: bool = False) -> None:
    lines = ["t_start,t_end,id_a,id_b,x,y"]
    for e in events:
        if withhold_truth or e.truth_position is None:
            xy = ","
        else:
            xy = f"{_fmt(e.truth_position[0])},{_fmt(e.truth_position[1])}"
        lines.append(f"{_fmt(e.t_start)},{_fmt(e.t_end)},{e.id_a},{e.id_b},{xy}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_events_csv(path) -> list[EncounterEvent]:
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0] != "t_start,t_end,id_a,id_b,x,y":
        raise ValueError("bad events CSV header")
    events = []
    for line in lines[1:]:
        t1, t2, a, b, x, y = line.split(",")
        truth = None if x == "" else (float(x), float(y))
        events.append(EncounterEvent(float(t1), float(t2), int(a), int(b), truth))
    return events


# -- trajectories ---------------------------------------------------------


def write_trajectories_csv(path, traj: Trajectories) -> None:
    lines = ["t,id,x,y,mode"]
    for ti, t in enumerate(traj.times):
        for ai, aid in enumerate(traj.agent_ids):
            x, y = traj.positions[ti, ai]
            lines.append(f"{_fmt(t)},{int(aid)},{_fmt(x)},{_fmt(y)},{int(traj.modes[ti, ai])}")
    Path(path).write_text("\n".join(lines) + "\n")


# -- distance matrices ----------------------------------------------------


def write_distance_matrix(path, dist: np.ndarray) -> None:
    d = np.asarray(dist, dtype=float)
    n = d.shape[0]
    lines = [str(n)]
    for row in d:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_distance_matrix(path) -> np.ndarray:
    lines = Path(path).read_text().strip().splitlines()
    n = int(lines[0])
    rows = [[float(v) for v in line.split(",")] for line in lines[1 : n + 1]]
    out = np.asarray(rows, dtype=float)
    if out.shape != (n, n):
        raise ValueError("distance matrix shape does not match header")
    return out


# -- persistence diagrams ---------------------------------------------------


def write_diagram_csv(path, diagram: PersistenceDiagram) -> None:
    lines = ["dim,birth,death"]
    for dim, birth, death in diagram.features:
        lines.append(f"{dim},{_fmt(birth)},{_fmt(death)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_diagram_csv(path) -> PersistenceDiagram:
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0] != "dim,birth,death":
        raise ValueError("bad diagram CSV header")
    features = []
    for line in lines[1:]:
        dim, birth, death = line.split(",")
        features.append((int(dim), float(birth), float(death)))
    return PersistenceDiagram(features)


# -- coordinates -------------------------------------------------------------


def write_coordinates_csv(path, coords: np.ndarray) -> None:
    lines = ["index,x,y"]
    for i, (x, y) in enumerate(np.asarray(coords, dtype=float)):
        lines.append(f"{i},{_fmt(x)},{_fmt(y)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_coordinates_csv(path) -> np.ndarray:
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0] != "index,x,y":
        raise ValueError("bad coordinates CSV header")
    rows = [line.split(",")[1:] for line in lines[1:]]
    return np.asarray([[float(x), float(y)] for x, y in rows])


# -- JSON artifacts -----------------------------------------------------------


def _dump_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def write_communities_json(path, communities: list[LandmarkCommunity]) -> None:
    _dump_json(
        path,
        {str(c.landmark_id): sorted(int(i) for i in c.event_indices) for c in communities},
    )


def read_communities_json(path, events: list[EncounterEvent] | None = None) -> list[LandmarkCommunity]:
    data = json.loads(Path(path).read_text())
    communities = []
    for lid, idxs in sorted(data.items(), key=lambda kv: int(kv[0])):
        centroid = None
        if events is not None:
            pts = [events[i].truth_position for i in idxs if events[i].truth_position]
            if pts:
                arr = np.asarray(pts, dtype=float)
                centroid = (float(arr[:, 0].mean()), float(arr[:, 1].mean()))
        communities.append(LandmarkCommunity(int(lid), set(int(i) for i in idxs), centroid))
    return communities


def write_indices_json(path, indices) -> None:
    _dump_json(path, [int(i) for i in indices])


def read_indices_json(path) -> np.ndarray:
    return np.asarray(json.loads(Path(path).read_text()), dtype=int)


def write_params_json(path, dim: int, params: ClassifierParams, error: float) -> None:
    _dump_json(
        path,
        {
            "dim": dim,
            "q": params.q,
            "delta": params.delta,
            "tau": params.tau,
            "alpha": params.alpha,
            "error": error,
        },
    )


def read_params_json(path) -> tuple[int, ClassifierParams, float]:
    data = json.loads(Path(path).read_text())
    params = ClassifierParams(data["q"], data["delta"], data["tau"], data["alpha"])
    return int(data["dim"]), params, float(data["error"])


def write_bottleneck_json(path, result: MatchingResult) -> None:
    _dump_json(
        path,
        {
            "distance": result.distance if math.isfinite(result.distance) else "inf",
            "matching": [[a, b] for a, b in result.matching],
        },
    )


def read_bottleneck_json(path) -> MatchingResult:
    data = json.loads(Path(path).read_text())
    d = data["distance"]
    distance = math.inf if d == "inf" else float(d)
    matching = [(a, b) for a, b in data["matching"]]
    return MatchingResult(distance, matching)


# -- manifest -----------------------------------------------------------------


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path, artifact_dir, artifacts: list[str], failures: dict[str, str]) -> None:
    root = Path(artifact_dir)
    hashes = {rel: file_sha256(root / rel) for rel in sorted(artifacts)}
    _dump_json(path, {"artifacts": hashes, "failures": dict(sorted(failures.items()))})


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text())
