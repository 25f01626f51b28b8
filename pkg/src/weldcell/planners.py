"""Sampling-based planners over 6-D joint space with configuration-cost support.

Five planners share one toolbox: a bidirectional transition-based RRT that
filters tree growth through a Metropolis-style cost test, plain RRT-Connect,
RRT* with rewiring, a lazily validated PRM*, and a lower-bound-tracked RRT
that returns paths within a (1 + eps) factor of its lower-bound graph cost.

Budgets are expressed in nominal seconds but executed as a deterministic
iteration count (``budget_s * iteration_rate``), so a (seed, request, scene)
triple fully determines each planner's output regardless of machine speed.
Wall-clock time is measured for reporting only and never steers control flow.
"""

from __future__ import annotations

import hashlib
import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import (DisconnectedError, InvalidEndpointError,
                     PlannerTimeoutError)
from .kinematics import KinematicChain
from .scene import CollisionChecker, MotionCheckParams, Scene, interpolate_configs

PLANNER_NAMES = ("bitrrt", "rrtconnect", "rrtstar", "prmstar", "lbtrrt")


def derive_seed(master_seed: int, planner: str, goal: str, trial: int) -> int:
    """Stable per-run RNG seed; adding planners never shifts other streams."""
    key = f"{master_seed}:{planner}:{goal}:{trial}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


@dataclass
class Path:
    """Joint-space waypoints, request start first and request goal last."""

    waypoints: np.ndarray

    def __post_init__(self):
        self.waypoints = np.atleast_2d(np.asarray(self.waypoints, dtype=float))

    def length(self) -> float:
        if len(self.waypoints) < 2:
            return 0.0
        return float(np.linalg.norm(np.diff(self.waypoints, axis=0), axis=1).sum())

    def __len__(self) -> int:
        return len(self.waypoints)


@dataclass
class PlanRequest:
    start: np.ndarray
    goal: np.ndarray
    cost_fn: Optional[Callable] = None  # maps q -> cost >= 0; None = constant
    budget_s: float = 2.0
    seed: int = 0
    step: float = 0.1
    goal_bias: float = 0.05
    iteration_rate: float = 1500.0  # iterations per nominal second

    def __post_init__(self):
        self.start = np.asarray(self.start, dtype=float)
        self.goal = np.asarray(self.goal, dtype=float)
        if self.budget_s <= 0 or self.step <= 0:
            raise ValueError("budget and extension step must be positive")

    def iterations(self) -> int:
        return max(1, int(self.budget_s * self.iteration_rate))

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed))


@dataclass
class PlannerStats:
    planner: str
    seed: int
    success: bool
    iterations: int
    nominal_time_s: float
    wall_time_s: float
    nodes: int
    waypoints: int
    path_length: float
    best_cost_trace: list = field(default_factory=list)


@dataclass
class PlanResult:
    path: Optional[Path]
    stats: PlannerStats


# ---------------------------------------------------------------------------
# transition test (Metropolis criterion with adaptive temperature)
# ---------------------------------------------------------------------------

@dataclass
class TransitionParams:
    t_rate: float = 2.0
    nfail_max: int = 10
    t_init_factor: float = 1e-4
    t_init: Optional[float] = None  # explicit override of the initial temperature

    def __post_init__(self):
        if self.t_rate <= 1.0:
            raise ValueError("temperature rate must exceed 1")
        if self.nfail_max < 1:
            raise ValueError("nfail_max must be at least 1")


class TransitionState:
    """Adaptive temperature, failure counter, and observed cost range."""

    def __init__(self, params: TransitionParams, rng: np.random.Generator,
                 c_start: float = 1.0, c_goal: float = 1.0):
        self.params = params
        self.rng = rng
        self.c_min = min(c_start, c_goal)
        self.c_max = max(c_start, c_goal)
        init_range = max(self.c_max, 1e-9)
        self.temperature = params.t_init if params.t_init is not None \
            else params.t_init_factor * init_range
        self.temperature = max(self.temperature, 1e-12)
        self.nfail = 0

    def cost_normalizer(self) -> float:
        span = self.c_max - self.c_min
        return span if span > 1e-12 else max(self.c_max, 1.0)

    def observe(self, cost: float):
        self.c_min = min(self.c_min, cost)
        self.c_max = max(self.c_max, cost)


def transition_test(state: TransitionState, c_parent: float, c_new: float,
                    distance: float = 0.0) -> bool:
    """Accept or reject a candidate node by comparing its cost to its parent.

    Downhill (c_new <= c_parent) always passes and cools the temperature.
    Uphill passes with probability exp(-dc / (K * T)) where K normalizes by the
    observed cost range; after ``nfail_max`` consecutive rejections the
    temperature is multiplied by the rate.  ``distance`` is accepted for
    slope-normalized variants and is unused by this rule.
    """
    state.observe(c_parent)
    state.observe(c_new)
    if c_new <= c_parent:
        state.temperature = max(state.temperature / state.params.t_rate, 1e-12)
        state.nfail = 0
        return True
    k = state.cost_normalizer()
    p = math.exp(-(c_new - c_parent) / (k * state.temperature))
    if state.rng.random() < p:
        state.nfail = 0
        return True
    state.nfail += 1
    if state.nfail >= state.params.nfail_max:
        state.temperature *= state.params.t_rate
        state.nfail = 0
    return False


# ---------------------------------------------------------------------------
# shared tree machinery
# ---------------------------------------------------------------------------

class _Tree:
    """Append-only node store with brute-force nearest neighbors."""

    def __init__(self, root: np.ndarray, root_cost: float = 0.0, capacity: int = 256):
        self._nodes = np.empty((capacity, root.shape[0]))
        self._nodes[0] = root
        self.parents = [-1]
        self.node_cost = [root_cost]  # configuration cost c(q), cached
        self.size = 1

    @property
    def nodes(self) -> np.ndarray:
        return self._nodes[:self.size]

    def add(self, q: np.ndarray, parent: int, node_cost: float = 0.0) -> int:
        if self.size == self._nodes.shape[0]:
            grown = np.empty((2 * self.size, self._nodes.shape[1]))
            grown[:self.size] = self._nodes
            self._nodes = grown
        self._nodes[self.size] = q
        self.parents.append(parent)
        self.node_cost.append(node_cost)
        self.size += 1
        return self.size - 1

    def nearest(self, q: np.ndarray) -> int:
        d = np.linalg.norm(self.nodes - q, axis=1)
        return int(np.argmin(d))

    def near(self, q: np.ndarray, radius: float) -> np.ndarray:
        d = np.linalg.norm(self.nodes - q, axis=1)
        return np.nonzero(d <= radius)[0]

    def path_to_root(self, index: int) -> list:
        out = []
        while index >= 0:
            out.append(index)
            index = self.parents[index]
        return out


def _steer(q_from: np.ndarray, q_to: np.ndarray, step: float):
    """Step from ``q_from`` toward ``q_to``; returns (q_new, reached)."""
    delta = q_to - q_from
    dist = float(np.linalg.norm(delta))
    if dist <= step:
        return q_to.copy(), True
    return q_from + (step / dist) * delta, False


def _sample(rng, lo, hi):
    return rng.uniform(lo, hi)


class _QueryContext:
    """Per-query plumbing shared by all planners."""

    def __init__(self, scene: Scene, chain: KinematicChain, request: PlanRequest,
                 motion: MotionCheckParams):
        self.checker = CollisionChecker(scene, chain)
        self.request = request
        self.motion = motion
        self.lo = chain.limits_lo
        self.hi = chain.limits_hi
        self.rng = request.rng()
        self.start_time = time.perf_counter()
        if bool(self.checker.check_configs(request.start[None, :])[0]):
            raise InvalidEndpointError("start configuration is in collision")
        if bool(self.checker.check_configs(request.goal[None, :])[0]):
            raise InvalidEndpointError("goal configuration is in collision")

    def config_free(self, q) -> bool:
        return not bool(self.checker.check_configs(np.asarray(q)[None, :])[0])

    def edge_valid(self, q_a, q_b) -> bool:
        qs = interpolate_configs(q_a, q_b, self.motion.resolution)
        return not bool(self.checker.check_configs(qs).any())

    def cost(self, q) -> float:
        return float(self.request.cost_fn(q)) if self.request.cost_fn else 0.0

    def wall(self) -> float:
        return time.perf_counter() - self.start_time

    def stats(self, name: str, success: bool, iterations: int, nodes: int,
              path: Optional[Path], trace=None) -> PlannerStats:
        return PlannerStats(
            planner=name, seed=self.request.seed, success=success,
            iterations=iterations,
            nominal_time_s=iterations / self.request.iteration_rate,
            wall_time_s=self.wall(), nodes=nodes,
            waypoints=len(path) if path else 0,
            path_length=path.length() if path else float("nan"),
            best_cost_trace=list(trace) if trace else [])


def _trivial_result(ctx: _QueryContext, name: str) -> Optional[PlanResult]:
    """Handle start == goal: a single-waypoint path with no search work."""
    if np.allclose(ctx.request.start, ctx.request.goal, atol=1e-12):
        path = Path(ctx.request.start[None, :])
        return PlanResult(path, ctx.stats(name, True, 0, 1, path))
    return None


# ---------------------------------------------------------------------------
# bidirectional planners
# ---------------------------------------------------------------------------

def _grow_greedy(ctx, tree: _Tree, target: np.ndarray,
                 transition: Optional[TransitionState]) -> Optional[int]:
    """RRT-Connect style extension: step repeatedly toward ``target`` until a
    check fails or the target is reached.  Returns the last inserted index."""
    near_idx = tree.nearest(target)
    current = tree.nodes[near_idx]
    parent = near_idx
    last = None
    while True:
        q_new, reached = _steer(current, target, ctx.request.step)
        if not ctx.edge_valid(current, q_new):
            break
        c_new = ctx.cost(q_new)
        if transition is not None and \
                not transition_test(transition, tree.node_cost[parent], c_new,
                                    float(np.linalg.norm(q_new - current))):
            break
        parent = tree.add(q_new, parent, c_new)
        last = parent
        current = q_new
        if reached:
            break
    return last


def _join_paths(start_tree: _Tree, a_idx: int, goal_tree: _Tree, b_idx: int) -> Path:
    fwd = [start_tree.nodes[i] for i in reversed(start_tree.path_to_root(a_idx))]
    back = [goal_tree.nodes[i] for i in goal_tree.path_to_root(b_idx)]
    waypoints = [fwd[0]]
    for q in fwd[1:] + back:
        if not np.allclose(q, waypoints[-1], atol=1e-12):
            waypoints.append(q)
    return Path(np.array(waypoints))


def _plan_bidirectional(scene, chain, request, motion, name: str,
                        transition_params: Optional[TransitionParams]) -> PlanResult:
    ctx = _QueryContext(scene, chain, request, motion)
    trivial = _trivial_result(ctx, name)
    if trivial:
        return trivial
    c_start = ctx.cost(request.start)
    c_goal = ctx.cost(request.goal)
    transition = None
    if transition_params is not None:
        transition = TransitionState(transition_params, ctx.rng, c_start, c_goal)
    start_tree = _Tree(request.start, c_start)
    goal_tree = _Tree(request.goal, c_goal)
    trees = [(start_tree, True), (goal_tree, False)]
    budget = request.iterations()
    for it in range(1, budget + 1):
        (active, active_is_start), (other, _) = trees[0], trees[1]
        if ctx.rng.random() < request.goal_bias:
            q_rand = other.nodes[0].copy()
        else:
            q_rand = _sample(ctx.rng, ctx.lo, ctx.hi)
        new_idx = _grow_greedy(ctx, active, q_rand, transition)
        if new_idx is not None:
            q_new = active.nodes[new_idx]
            conn_idx = _grow_greedy(ctx, other, q_new, transition)
            if conn_idx is not None:
                q_conn = other.nodes[conn_idx]
                gap = float(np.linalg.norm(q_new - q_conn))
                if gap <= request.step and ctx.edge_valid(q_new, q_conn):
                    join_ok = True
                    if transition is not None and gap > 1e-12:
                        join_ok = transition_test(
                            transition, active.node_cost[new_idx],
                            other.node_cost[conn_idx], gap)
                    if join_ok:
                        if active_is_start:
                            path = _join_paths(active, new_idx, other, conn_idx)
                        else:
                            path = _join_paths(other, conn_idx, active, new_idx)
                        nodes = start_tree.size + goal_tree.size
                        return PlanResult(path, ctx.stats(name, True, it, nodes, path))
        trees.reverse()
    nodes = start_tree.size + goal_tree.size
    raise PlannerTimeoutError(
        f"{name}: no path within {budget} iterations",
        stats=ctx.stats(name, False, budget, nodes, None))


def plan_bitrrt(scene: Scene, chain: KinematicChain, request: PlanRequest,
                transition_params: Optional[TransitionParams] = None,
                motion: MotionCheckParams = MotionCheckParams()) -> PlanResult:
    """Bidirectional transition-based RRT: candidate nodes must pass both the
    edge validity check and the Metropolis cost test before insertion."""
    params = transition_params if transition_params is not None else TransitionParams()
    return _plan_bidirectional(scene, chain, request, motion, "bitrrt", params)


def plan_rrt_connect(scene: Scene, chain: KinematicChain, request: PlanRequest,
                     motion: MotionCheckParams = MotionCheckParams()) -> PlanResult:
    """Plain bidirectional RRT-Connect (transition test always accepts)."""
    return _plan_bidirectional(scene, chain, request, motion, "rrtconnect", None)


# ---------------------------------------------------------------------------
# RRT* (path-length cost, anytime)
# ---------------------------------------------------------------------------

def _rewire_radius(gamma: float, n: int, step: float) -> float:
    n = max(n, 2)
    return max(gamma * (math.log(n) / n) ** (1.0 / 6.0), step)


def plan_rrt_star(scene: Scene, chain: KinematicChain, request: PlanRequest,
                  gamma: float = 2.0,
                  motion: MotionCheckParams = MotionCheckParams()) -> PlanResult:
    """RRT* over joint-space path length; returns the best path at budget end."""
    ctx = _QueryContext(scene, chain, request, motion)
    trivial = _trivial_result(ctx, "rrtstar")
    if trivial:
        return trivial
    tree = _Tree(request.start)
    cost_to_come = [0.0]
    children: list[list[int]] = [[]]
    goal_links: list[tuple[int, float]] = []  # (node, edge length) candidates
    trace: list[float] = []
    budget = request.iterations()

    def best_goal() -> tuple[float, int]:
        best_c, best_i = math.inf, -1
        for idx, d in goal_links:
            c = cost_to_come[idx] + d
            if c < best_c - 1e-12:
                best_c, best_i = c, idx
        return best_c, best_i

    def propagate(root_idx: int):
        stack = [root_idx]
        while stack:
            i = stack.pop()
            for ch in children[i]:
                cost_to_come[ch] = cost_to_come[i] + \
                    float(np.linalg.norm(tree.nodes[ch] - tree.nodes[i]))
                stack.append(ch)

    for it in range(1, budget + 1):
        if ctx.rng.random() < request.goal_bias:
            q_rand = request.goal.copy()
        else:
            q_rand = _sample(ctx.rng, ctx.lo, ctx.hi)
        near_idx = tree.nearest(q_rand)
        q_new, _ = _steer(tree.nodes[near_idx], q_rand, request.step)
        if not ctx.config_free(q_new):
            trace.append(best_goal()[0])
            continue
        radius = _rewire_radius(gamma, tree.size, request.step)
        near = tree.near(q_new, radius)
        if near.size == 0:
            near = np.array([near_idx])
        # choose the cheapest parent whose edge validates
        dists = np.linalg.norm(tree.nodes[near] - q_new, axis=1)
        order = np.argsort([cost_to_come[near[k]] + dists[k]
                            for k in range(near.size)], kind="stable")
        parent, parent_dist = -1, 0.0
        for k in order:
            cand = int(near[k])
            if ctx.edge_valid(tree.nodes[cand], q_new):
                parent, parent_dist = cand, float(dists[k])
                break
        if parent < 0:
            trace.append(best_goal()[0])
            continue
        new_idx = tree.add(q_new, parent)
        cost_to_come.append(cost_to_come[parent] + parent_dist)
        children.append([])
        children[parent].append(new_idx)
        # rewire neighbors through the new node when it shortens their path
        for k in range(near.size):
            cand = int(near[k])
            alt = cost_to_come[new_idx] + float(dists[k])
            if alt + 1e-12 < cost_to_come[cand] and \
                    ctx.edge_valid(q_new, tree.nodes[cand]):
                children[tree.parents[cand]].remove(cand)
                tree.parents[cand] = new_idx
                children[new_idx].append(cand)
                cost_to_come[cand] = alt
                propagate(cand)
        goal_gap = float(np.linalg.norm(q_new - request.goal))
        if goal_gap <= radius and ctx.edge_valid(q_new, request.goal):
            goal_links.append((new_idx, goal_gap))
        trace.append(best_goal()[0])
    best_c, best_i = best_goal()
    if best_i < 0:
        raise PlannerTimeoutError(
            f"rrtstar: no path within {budget} iterations",
            stats=ctx.stats("rrtstar", False, budget, tree.size, None, trace))
    idxs = list(reversed(tree.path_to_root(best_i)))
    waypoints = np.vstack([tree.nodes[idxs], request.goal[None, :]])
    path = Path(waypoints)
    return PlanResult(path, ctx.stats("rrtstar", True, budget, tree.size, path, trace))


# ---------------------------------------------------------------------------
# PRM* (batch sampling, lazy edge validation)
# ---------------------------------------------------------------------------

def _lazy_shortest_path(nodes: np.ndarray, adjacency: list, ctx,
                        start_idx: int, goal_idx: int,
                        edge_cache: dict, on_no_path):
    """Dijkstra with on-demand edge validation.

    Runs shortest-path queries on the optimistic graph, validating edges along
    each candidate path and dropping the first invalid one, until a fully
    validated path survives.  Returns (cost, [node indices]).
    """
    n = len(nodes)
    while True:
        dist = np.full(n, np.inf)
        prev = np.full(n, -1, dtype=np.int64)
        dist[start_idx] = 0.0
        heap = [(0.0, start_idx)]
        seen = np.zeros(n, dtype=bool)
        while heap:
            d, u = heapq.heappop(heap)
            if seen[u]:
                continue
            seen[u] = True
            if u == goal_idx:
                break
            for v, w in adjacency[u]:
                if edge_cache.get((min(u, v), max(u, v))) is False:
                    continue
                nd = d + w
                if nd < dist[v] - 1e-15:
                    dist[v] = nd
                    prev[v] = u
                    heapq.heappush(heap, (nd, v))
        if not np.isfinite(dist[goal_idx]):
            on_no_path()
        chain_idx = [goal_idx]
        while chain_idx[-1] != start_idx:
            chain_idx.append(int(prev[chain_idx[-1]]))
        chain_idx.reverse()
        all_valid = True
        for u, v in zip(chain_idx, chain_idx[1:]):
            key = (min(u, v), max(u, v))
            state = edge_cache.get(key)
            if state is None:
                state = ctx.edge_valid(nodes[u], nodes[v])
                edge_cache[key] = state
            if state is False:
                all_valid = False
                break
        if all_valid:
            return float(dist[goal_idx]), chain_idx


def plan_prm_star(scene: Scene, chain: KinematicChain, request: PlanRequest,
                  motion: MotionCheckParams = MotionCheckParams()) -> PlanResult:
    """PRM*: batch-sample the free space, connect k nearest neighbors with
    k = ceil(e * (1 + 1/6) * log n), and extract the shortest valid path."""
    ctx = _QueryContext(scene, chain, request, motion)
    trivial = _trivial_result(ctx, "prmstar")
    if trivial:
        return trivial
    budget = request.iterations()
    samples = _sample(ctx.rng, np.broadcast_to(ctx.lo, (budget, 6)),
                      np.broadcast_to(ctx.hi, (budget, 6)))
    free = ~ctx.checker.check_configs(samples)
    nodes = np.vstack([request.start[None, :], request.goal[None, :], samples[free]])
    n = len(nodes)
    k = int(math.ceil(math.e * (1.0 + 1.0 / 6.0) * math.log(max(n, 2))))
    k = min(k, n - 1)
    tree = cKDTree(nodes)
    dists, idxs = tree.query(nodes, k=k + 1)
    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    seen_edges = set()
    for u in range(n):
        for j in range(1, k + 1):
            v = int(idxs[u, j])
            key = (min(u, v), max(u, v))
            if key in seen_edges or u == v:
                continue
            seen_edges.add(key)
            w = float(dists[u, j])
            adjacency[u].append((v, w))
            adjacency[v].append((u, w))

    def no_path():
        raise DisconnectedError(
            "prmstar: start and goal lie in different roadmap components",
            stats=ctx.stats("prmstar", False, budget, n, None))

    _, chain_idx = _lazy_shortest_path(nodes, adjacency, ctx, 0, 1, {}, no_path)
    path = Path(nodes[chain_idx])
    return PlanResult(path, ctx.stats("prmstar", True, budget, n, path))


# ---------------------------------------------------------------------------
# lower-bound tree RRT
# ---------------------------------------------------------------------------

def plan_lbt_rrt(scene: Scene, chain: KinematicChain, request: PlanRequest,
                 eps: float = 0.4, gamma: float = 2.0,
                 motion: MotionCheckParams = MotionCheckParams()) -> PlanResult:
    """RRT that tracks an optimistic lower-bound graph alongside the validated
    tree and stops validating once the tree path is within (1 + eps) of the
    lower bound to the goal.

    The lower-bound graph connects every inserted node to its neighbors inside
    the rewiring radius without collision checks; edges are validated lazily
    only while the guarantee ``tree cost <= (1 + eps) * lower bound`` has not
    been met.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    ctx = _QueryContext(scene, chain, request, motion)
    trivial = _trivial_result(ctx, "lbtrrt")
    if trivial:
        return trivial
    nodes = [request.start.copy(), request.goal.copy()]
    adjacency: list[list[tuple[int, float]]] = [[], []]
    tree_parent = {0: -1}
    tree_cost = {0: 0.0}
    edge_cache: dict = {}
    budget = request.iterations()

    def add_lb_edges(new_idx: int, near_idxs, arr):
        for v in near_idxs:
            w = float(np.linalg.norm(arr[v] - arr[new_idx]))
            adjacency[new_idx].append((int(v), w))
            adjacency[int(v)].append((new_idx, w))

    for it in range(1, budget + 1):
        if ctx.rng.random() < request.goal_bias:
            q_rand = request.goal.copy()
        else:
            q_rand = _sample(ctx.rng, ctx.lo, ctx.hi)
        arr = np.asarray(nodes)
        grown = [i for i in tree_parent]  # only validated-tree nodes can extend
        grown_arr = arr[grown]
        near_i = grown[int(np.argmin(np.linalg.norm(grown_arr - q_rand, axis=1)))]
        q_new, _ = _steer(arr[near_i], q_rand, request.step)
        if not ctx.edge_valid(arr[near_i], q_new):
            continue
        new_idx = len(nodes)
        nodes.append(q_new)
        adjacency.append([])
        arr = np.asarray(nodes)
        radius = _rewire_radius(gamma, len(nodes), request.step)
        d_all = np.linalg.norm(arr[:-1] - q_new, axis=1)
        near = np.nonzero(d_all <= radius)[0]
        if near.size == 0:
            near = np.array([near_i])
        add_lb_edges(new_idx, near, arr)
        edge_cache[(min(near_i, new_idx), max(near_i, new_idx))] = True
        # validated tree: cheapest already-validated parent, then the RRT edge
        tree_parent[new_idx] = near_i
        tree_cost[new_idx] = tree_cost[near_i] + float(np.linalg.norm(q_new - arr[near_i]))
        goal_gap = float(np.linalg.norm(q_new - request.goal))
        if goal_gap <= radius and 1 not in tree_parent and \
                ctx.edge_valid(q_new, request.goal):
            tree_parent[1] = new_idx
            tree_cost[1] = tree_cost[new_idx] + goal_gap
            edge_cache[(1, new_idx)] = True

    arr = np.asarray(nodes)

    def no_path():
        raise PlannerTimeoutError(
            f"lbtrrt: no path within {budget} iterations",
            stats=ctx.stats("lbtrrt", False, budget, len(nodes), None))

    if 1 not in tree_parent:
        # no validated tree path; fall back to full lazy repair of the graph
        _, chain_idx = _lazy_shortest_path(arr, adjacency, ctx, 0, 1,
                                           edge_cache, no_path)
        path = Path(arr[chain_idx])
        return PlanResult(path, ctx.stats("lbtrrt", True, budget, len(nodes), path))

    def tree_path() -> list:
        out = [1]
        while out[-1] != 0:
            out.append(tree_parent[out[-1]])
        out.reverse()
        return out

    # tighten with lazy validation until within (1 + eps) of the lower bound
    while True:
        lb_cost, chain_idx = _lazy_lower_bound(arr, adjacency, edge_cache, 0, 1)
        if chain_idx is None:
            break  # lower-bound graph exhausted; keep the tree path
        if tree_cost[1] <= (1.0 + eps) * lb_cost + 1e-9:
            break
        improved = True
        for u, v in zip(chain_idx, chain_idx[1:]):
            key = (min(u, v), max(u, v))
            if edge_cache.get(key) is None:
                edge_cache[key] = ctx.edge_valid(arr[u], arr[v])
            if edge_cache[key] is False:
                improved = False
                break
        if improved:
            # fully validated shortest path; adopt it as the tree path
            for u, v in zip(chain_idx, chain_idx[1:]):
                tree_parent[v] = u
            tree_cost[1] = lb_cost
            break
    idxs = tree_path()
    path = Path(arr[idxs])
    return PlanResult(path, ctx.stats("lbtrrt", True, budget, len(nodes), path))


def _lazy_lower_bound(nodes: np.ndarray, adjacency: list, edge_cache: dict,
                      start_idx: int, goal_idx: int):
    """Shortest path over edges not yet proven invalid (no new validation)."""
    n = len(nodes)
    dist = np.full(n, np.inf)
    prev = np.full(n, -1, dtype=np.int64)
    dist[start_idx] = 0.0
    heap = [(0.0, start_idx)]
    seen = np.zeros(n, dtype=bool)
    while heap:
        d, u = heapq.heappop(heap)
        if seen[u]:
            continue
        seen[u] = True
        if u == goal_idx:
            break
        for v, w in adjacency[u]:
            if edge_cache.get((min(u, v), max(u, v))) is False:
                continue
            nd = d + w
            if nd < dist[v] - 1e-15:
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    if not np.isfinite(dist[goal_idx]):
        return math.inf, None
    chain_idx = [goal_idx]
    while chain_idx[-1] != start_idx:
        chain_idx.append(int(prev[chain_idx[-1]]))
    chain_idx.reverse()
    return float(dist[goal_idx]), chain_idx


# ---------------------------------------------------------------------------
# dispatch and validation helpers
# ---------------------------------------------------------------------------

def plan(name: str, scene: Scene, chain: KinematicChain, request: PlanRequest,
         motion: MotionCheckParams = MotionCheckParams(),
         transition_params: Optional[TransitionParams] = None,
         lbt_eps: float = 0.4, gamma: float = 2.0) -> PlanResult:
    if name == "bitrrt":
        return plan_bitrrt(scene, chain, request, transition_params, motion)
    if name == "rrtconnect":
        return plan_rrt_connect(scene, chain, request, motion)
    if name == "rrtstar":
        return plan_rrt_star(scene, chain, request, gamma, motion)
    if name == "prmstar":
        return plan_prm_star(scene, chain, request, motion)
    if name == "lbtrrt":
        return plan_lbt_rrt(scene, chain, request, lbt_eps, gamma, motion)
    raise ValueError(f"unknown planner {name!r}")


def validate_path(scene: Scene, chain: KinematicChain, path: Path,
                  request: PlanRequest,
                  motion: MotionCheckParams = MotionCheckParams()) -> bool:
    """Independent re-check of the Path contract: endpoints match the request
    and every consecutive segment is collision-free at the given resolution."""
    wp = path.waypoints
    if not np.allclose(wp[0], request.start, atol=1e-9) or \
            not np.allclose(wp[-1], request.goal, atol=1e-9):
        return False
    checker = CollisionChecker(scene, chain)
    for a, b in zip(wp, wp[1:]):
        qs = interpolate_configs(a, b, motion.resolution)
        if bool(checker.check_configs(qs).any()):
            return False
    if len(wp) == 1 and bool(checker.check_configs(wp).any()):
        return False
    return True
