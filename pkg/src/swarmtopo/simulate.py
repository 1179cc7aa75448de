"""Seeded swarm simulation: correlated random walk with static landmarks.

Agents move piecewise-linearly with exponentially distributed segment
lengths and isotropic reorientation, bounce off walls and obstacles into
the inward half-circle, and may probabilistically stop at reorientations.
Pairs within the detection radius record encounter events; after the
dispersion phase a subset of agents is frozen as landmarks and every event
touching a landmark joins that landmark's community.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .geometry import Domain, segments_properly_intersect

MODE_CRW = 0
MODE_STATIC = 1


@dataclass
class CrwParams:
    """Correlated-random-walk motion parameters."""

    char_length: float  # mean segment length (m)
    speed: float  # m/s
    stop_prob_per_segment: float = 0.0
    stop_duration_mean: float = 1.0

    def __post_init__(self):
        if self.char_length <= 0:
            raise ValueError("char_length must be positive")
        if self.speed <= 0:
            raise ValueError("speed must be positive")
        if not 0.0 <= self.stop_prob_per_segment <= 1.0:
            raise ValueError("stop_prob_per_segment must be in [0, 1]")


@dataclass
class SensingParams:
    detection_radius: float  # m
    sample_interval: float  # s

    def __post_init__(self):
        if self.detection_radius <= 0:
            raise ValueError("detection_radius must be positive")
        if self.sample_interval <= 0:
            raise ValueError("sample_interval must be positive")

    def validate_against(self, crw: CrwParams) -> None:
        bound = self.detection_radius / (2.0 * crw.speed)
        if self.sample_interval > bound:
            raise ValueError(
                f"sample_interval {self.sample_interval} exceeds "
                f"detection_radius/(2*speed) = {bound}; encounters could be stepped over"
            )


def default_sample_interval(duration: float, crw: CrwParams, detection_radius: float) -> float:
    """duration * 1e-4, capped so no encounter can be stepped over."""
    return min(duration * 1e-4, detection_radius / (2.0 * crw.speed))


@dataclass
class AgentState:
    """Snapshot of one agent, used by the reflection rule and tests."""

    id: int
    position: np.ndarray
    heading: float
    mode: int = MODE_CRW
    segment_remaining: float = 0.0
    stop_remaining: float = 0.0


@dataclass(frozen=True)
class EncounterEvent:
    t_start: float
    t_end: float
    id_a: int
    id_b: int
    truth_position: tuple[float, float] | None = None

    def __post_init__(self):
        if self.t_end < self.t_start:
            raise ValueError("t_end must be >= t_start")
        if self.id_a == self.id_b:
            raise ValueError("an event needs two distinct agents")

    @property
    def t_mid(self) -> float:
        return 0.5 * (self.t_start + self.t_end)

    @property
    def ids(self) -> frozenset:
        return frozenset((self.id_a, self.id_b))


@dataclass
class LandmarkCommunity:
    landmark_id: int
    event_indices: set[int] = field(default_factory=set)
    centroid: tuple[float, float] | None = None


@dataclass
class Trajectories:
    """Sampled agent tracks: times (T,), positions (T, n, 2), modes (T, n)."""

    times: np.ndarray
    positions: np.ndarray
    modes: np.ndarray
    agent_ids: np.ndarray


@dataclass
class SimulationResult:
    events: list[EncounterEvent]
    communities: list[LandmarkCommunity]
    trajectories: Trajectories
    landmark_ids: list[int]
    communication_graph: dict[int, set[int]]


def sample_segment_length(crw: CrwParams, rng: np.random.Generator) -> float:
    """One exponentially distributed CRW segment length (mean char_length)."""
    return float(rng.exponential(crw.char_length))


def reflect_heading(agent: AgentState, normals, rng: np.random.Generator) -> float:
    """Heading uniform over directions pointing into every inward normal.

    `normals` is one unit vector or a sequence of them (corner contact).
    """
    normals = np.atleast_2d(np.asarray(normals, dtype=float))
    for _ in range(10000):
        theta = rng.uniform(0.0, 2.0 * np.pi)
        d = np.array([np.cos(theta), np.sin(theta)])
        if np.all(normals @ d > 0):
            return float(theta)
    # normals nearly opposed; fall back to the mean normal direction
    mean = normals.sum(axis=0)
    return float(np.arctan2(mean[1], mean[0]))


def select_landmarks(
    communication_graph: dict[int, set[int]],
    landmark_count: int,
    rng: np.random.Generator,
) -> set[int]:
    """Maxmin landmark choice by hop distance on the communication graph.

    The first landmark is drawn at random; each following one maximizes the
    hop distance to the chosen set.  On a disconnected graph the landmarks
    are instead drawn uniformly over agents, which allocates them across
    clusters in proportion to cluster size.
    """
    nodes = sorted(communication_graph)
    if landmark_count > len(nodes):
        raise ValueError("landmark_count exceeds the number of agents in the graph")
    if landmark_count <= 0:
        return set()

    comp = _components(communication_graph, nodes)
    if len(comp) > 1:
        chosen = rng.choice(nodes, size=landmark_count, replace=False)
        return {int(c) for c in chosen}

    chosen = [int(rng.choice(nodes))]
    dist = _hop_distances(communication_graph, chosen[0], nodes)
    while len(chosen) < landmark_count:
        best = None
        best_d = -1.0
        for v in nodes:
            if v in chosen:
                continue
            if dist[v] > best_d:
                best_d = dist[v]
                best = v
        chosen.append(best)
        nd = _hop_distances(communication_graph, best, nodes)
        for v in nodes:
            if nd[v] < dist[v]:
                dist[v] = nd[v]
    return set(chosen)


def _hop_distances(graph: dict[int, set[int]], source: int, nodes) -> dict[int, float]:
    dist = {v: np.inf for v in nodes}
    dist[source] = 0
    frontier = [source]
    while frontier:
        nxt = []
        for u in frontier:
            for v in graph[u]:
                if dist[v] == np.inf:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def _components(graph: dict[int, set[int]], nodes) -> list[set[int]]:
    seen: set[int] = set()
    comps = []
    for start in nodes:
        if start in seen:
            continue
        comp = {start}
        frontier = [start]
        seen.add(start)
        while frontier:
            u = frontier.pop()
            for v in graph[u]:
                if v not in seen:
                    seen.add(v)
                    comp.add(v)
                    frontier.append(v)
        comps.append(comp)
    return comps


def communication_graph_at(positions: np.ndarray, ids, radius: float) -> dict[int, set[int]]:
    d2 = ((positions[:, None, :] - positions[None, :, :]) ** 2).sum(-1)
    adj = {int(i): set() for i in ids}
    n = len(ids)
    for i in range(n):
        for j in range(i + 1, n):
            if d2[i, j] <= radius * radius:
                adj[int(ids[i])].add(int(ids[j]))
                adj[int(ids[j])].add(int(ids[i]))
    return adj


def check_free_space_connectivity(domain: Domain, scale: float) -> int:
    """Number of free-space components on a grid at the given scale."""
    nx = max(int(np.ceil(domain.width / scale)) + 1, 2)
    ny = max(int(np.ceil(domain.height / scale)) + 1, 2)
    xs = np.linspace(0, domain.width, nx)
    ys = np.linspace(0, domain.height, ny)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    free = domain.in_free_space(pts).reshape(nx, ny)
    if not free.any():
        return 0
    labels = -np.ones((nx, ny), dtype=int)
    n_comp = 0
    for sx in range(nx):
        for sy in range(ny):
            if not free[sx, sy] or labels[sx, sy] >= 0:
                continue
            stack = [(sx, sy)]
            labels[sx, sy] = n_comp
            while stack:
                cx, cy = stack.pop()
                for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    mx, my = cx + dx, cy + dy
                    if 0 <= mx < nx and 0 <= my < ny and free[mx, my] and labels[mx, my] < 0:
                        labels[mx, my] = n_comp
                        stack.append((mx, my))
            n_comp += 1
    return n_comp


class _OpenEvent:
    __slots__ = ("t_start", "mid_sum", "count", "last_seen")

    def __init__(self, t_start: float, midpoint: np.ndarray):
        self.t_start = t_start
        self.mid_sum = midpoint.copy()
        self.count = 1
        self.last_seen = t_start

    def update(self, t: float, midpoint: np.ndarray):
        self.mid_sum += midpoint
        self.count += 1
        self.last_seen = t

    def close(self, id_a: int, id_b: int) -> EncounterEvent:
        c = self.mid_sum / self.count
        return EncounterEvent(self.t_start, self.last_seen, id_a, id_b, (float(c[0]), float(c[1])))


def simulate(
    domain: Domain,
    n_agents: int,
    crw: CrwParams,
    sensing: SensingParams,
    duration: float,
    landmark_count: int,
    dispersion_time: float,
    seed: int,
    comm_radius: float | None = None,
    initial_positions: np.ndarray | None = None,
    trajectory_stride: int = 1,
) -> SimulationResult:
    """Run the two-mode swarm and collect encounter events.

    Events are recorded from `dispersion_time` onward; at that instant the
    `landmark_count` landmarks are chosen over the hop-distance
    communication graph (radius `comm_radius`, default 0.15 * max side) and
    frozen in static mode for the rest of the run.  Equal seeds give
    bit-identical outputs.
    """
    if n_agents < 1:
        raise ValueError("need at least one agent")
    if landmark_count >= n_agents:
        raise ValueError("landmark_count must be smaller than n_agents")
    if not duration > dispersion_time >= 0:
        raise ValueError("need duration > dispersion_time >= 0")
    sensing.validate_against(crw)

    n_comp = check_free_space_connectivity(
        domain, max(sensing.detection_radius, domain.width / 100)
    )
    if n_comp == 0:
        raise ValueError("domain free space is empty at agent scale")
    if n_comp > 1:
        warnings.warn(f"free space has {n_comp} components at agent scale; proceeding")

    if comm_radius is None:
        comm_radius = 0.15 * max(domain.width, domain.height)

    rng = np.random.default_rng(seed)
    dt = sensing.sample_interval
    r_d = sensing.detection_radius
    ids = np.arange(1, n_agents + 1)

    if initial_positions is not None:
        pos = np.asarray(initial_positions, dtype=float).copy()
        if pos.shape != (n_agents, 2):
            raise ValueError("initial_positions must be (n_agents, 2)")
        if not domain.in_free_space(pos).all():
            raise ValueError("initial positions must lie in free space")
    else:
        pos = _sample_free_positions(domain, n_agents, rng)

    heading = rng.uniform(0.0, 2.0 * np.pi, size=n_agents)
    seg_rem = rng.exponential(crw.char_length, size=n_agents)
    mode = np.full(n_agents, MODE_CRW, dtype=int)
    stop_rem = np.zeros(n_agents)
    is_landmark = np.zeros(n_agents, dtype=bool)

    n_steps = int(round(duration / dt))
    disp_step = int(np.ceil(dispersion_time / dt)) if dispersion_time > 0 else 0
    landmark_ids: list[int] = []
    comm_graph: dict[int, set[int]] = {int(i): set() for i in ids}

    open_events: dict[tuple[int, int], _OpenEvent] = {}
    closed: list[EncounterEvent] = []
    in_contact = np.zeros((n_agents, n_agents), dtype=bool)
    iu, ju = np.triu_indices(n_agents, 1)

    stride = max(trajectory_stride, 1)
    rec_steps = list(range(0, n_steps + 1, stride))
    if rec_steps[-1] != n_steps:
        rec_steps.append(n_steps)
    traj_t = np.empty(len(rec_steps))
    traj_pos = np.empty((len(rec_steps), n_agents, 2))
    traj_mode = np.empty((len(rec_steps), n_agents), dtype=int)
    rec_cursor = 0

    speed_dt = crw.speed * dt
    for step in range(n_steps + 1):
        t = step * dt

        if step == disp_step and landmark_count > 0 and not landmark_ids:
            comm_graph = communication_graph_at(pos, ids, comm_radius)
            chosen = select_landmarks(comm_graph, landmark_count, rng)
            landmark_ids = sorted(chosen)
            for lid in landmark_ids:
                k = lid - 1
                is_landmark[k] = True
                mode[k] = MODE_STATIC

        # -- contact detection at the sampled instant ---------------------
        d2 = ((pos[iu] - pos[ju]) ** 2).sum(-1)
        near = d2 <= r_d * r_d
        record = t >= dispersion_time
        contact_flat = in_contact[iu, ju]
        for idx in np.nonzero(near)[0]:
            i, j = int(iu[idx]), int(ju[idx])
            key = (i, j)
            midpoint = 0.5 * (pos[i] + pos[j])
            if contact_flat[idx]:
                ev = open_events.get(key)
                if ev is not None:
                    ev.update(t, midpoint)
                elif record:
                    # contact carried over from the dispersion phase
                    open_events[key] = _OpenEvent(t, midpoint)
            else:
                in_contact[i, j] = True
                if record:
                    open_events[key] = _OpenEvent(t, midpoint)
                # collision between two moving agents: both reorient
                if (
                    mode[i] == MODE_CRW
                    and mode[j] == MODE_CRW
                    and not is_landmark[i]
                    and not is_landmark[j]
                ):
                    for a in (i, j):
                        heading[a], seg_rem[a], mode[a], stop_rem[a] = _reorient(crw, rng)
        gone = contact_flat & ~near
        for idx in np.nonzero(gone)[0]:
            i, j = int(iu[idx]), int(ju[idx])
            in_contact[i, j] = False
            ev = open_events.pop((i, j), None)
            if ev is not None:
                closed.append(ev.close(int(ids[i]), int(ids[j])))

        if rec_cursor < len(rec_steps) and step == rec_steps[rec_cursor]:
            traj_t[rec_cursor] = t
            traj_pos[rec_cursor] = pos
            traj_mode[rec_cursor] = mode
            rec_cursor += 1

        if step == n_steps:
            break

        # -- motion --------------------------------------------------------
        waking = np.nonzero((mode == MODE_STATIC) & ~is_landmark)[0]
        for k in waking:
            stop_rem[k] -= dt
            if stop_rem[k] <= 0:
                heading[k], seg_rem[k], mode[k], stop_rem[k] = _reorient(crw, rng)

        expired = np.nonzero((mode == MODE_CRW) & ~is_landmark & (seg_rem <= 0))[0]
        for k in expired:
            heading[k], seg_rem[k], mode[k], stop_rem[k] = _reorient(crw, rng)

        act = np.nonzero((mode == MODE_CRW) & ~is_landmark)[0]
        if len(act):
            prop = pos[act] + speed_dt * np.column_stack(
                [np.cos(heading[act]), np.sin(heading[act])]
            )
            ok = domain.in_free_space(prop) & ~domain.segments_blocked(pos[act], prop)
            good = act[ok]
            pos[good] = prop[ok]
            seg_rem[good] -= speed_dt
            for k, proposal in zip(act[~ok], prop[~ok]):
                normals = _contact_normals(domain, pos[k], proposal)
                agent = AgentState(int(ids[k]), pos[k], heading[k], int(mode[k]), seg_rem[k])
                heading[k] = reflect_heading(agent, normals, rng)
                seg_rem[k] = sample_segment_length(crw, rng)

    for (i, j), ev in sorted(open_events.items()):
        closed.append(ev.close(int(ids[i]), int(ids[j])))

    closed.sort(key=lambda e: (e.t_start, e.id_a, e.id_b))
    communities = build_communities(closed, landmark_ids)
    traj = Trajectories(traj_t, traj_pos, traj_mode, ids)
    return SimulationResult(closed, communities, traj, landmark_ids, comm_graph)


def build_communities(events: list[EncounterEvent], landmark_ids) -> list[LandmarkCommunity]:
    communities = []
    for lid in sorted(landmark_ids):
        idxs = {i for i, e in enumerate(events) if lid in (e.id_a, e.id_b)}
        centroid = None
        pts = [events[i].truth_position for i in sorted(idxs) if events[i].truth_position]
        if pts:
            arr = np.asarray(pts)
            centroid = (float(arr[:, 0].mean()), float(arr[:, 1].mean()))
        communities.append(LandmarkCommunity(int(lid), idxs, centroid))
    return communities


def _reorient(crw: CrwParams, rng: np.random.Generator):
    """New isotropic heading and segment; possibly a probabilistic stop."""
    theta = rng.uniform(0.0, 2.0 * np.pi)
    length = sample_segment_length(crw, rng)
    if crw.stop_prob_per_segment > 0 and rng.uniform() < crw.stop_prob_per_segment:
        return theta, length, MODE_STATIC, float(rng.exponential(crw.stop_duration_mean))
    return theta, length, MODE_CRW, 0.0


def _contact_normals(domain: Domain, current: np.ndarray, proposal: np.ndarray) -> np.ndarray:
    normals = []
    if proposal[0] < 0:
        normals.append((1.0, 0.0))
    if proposal[0] > domain.width:
        normals.append((-1.0, 0.0))
    if proposal[1] < 0:
        normals.append((0.0, 1.0))
    if proposal[1] > domain.height:
        normals.append((0.0, -1.0))
    if not normals:
        for poly in domain.obstacles:
            a, b = poly, np.roll(poly, -1, axis=0)
            for e1, e2 in zip(a, b):
                if segments_properly_intersect(current[None], proposal[None], e1, e2)[0]:
                    edge = e2 - e1
                    n = np.array([-edge[1], edge[0]])
                    n /= np.linalg.norm(n) + 1e-300
                    if np.dot(n, current - e1) < 0:
                        n = -n
                    normals.append((float(n[0]), float(n[1])))
            if normals:
                break
        if not normals:
            # landed inside without a detected crossing (vertex graze):
            # push back toward the current position
            back = current - proposal
            nrm = np.linalg.norm(back)
            normals.append((1.0, 0.0) if nrm == 0 else tuple(back / nrm))
    return np.asarray(normals[:2], dtype=float)


def _sample_free_positions(domain: Domain, n: int, rng: np.random.Generator) -> np.ndarray:
    out = np.empty((n, 2))
    filled = 0
    for _ in range(100000):
        need = n - filled
        if need == 0:
            break
        cand = np.column_stack(
            [rng.uniform(0, domain.width, need), rng.uniform(0, domain.height, need)]
        )
        ok = domain.in_free_space(cand)
        take = cand[ok]
        out[filled : filled + len(take)] = take
        filled += len(take)
    if filled < n:
        raise ValueError("could not place agents in free space")
    return out
