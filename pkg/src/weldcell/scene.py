"""Workcell model and collision queries.

Obstacles are geometric primitives with exact distance formulas; robot links
are approximated by spheres and capsules attached to the kinematic frames.
Everything is evaluated in batch over configurations so planners can validate
whole joint-space segments with a handful of vectorized operations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .errors import ConfigError
from .geometry import RigidTransform
from .kinematics import KinematicChain, fk_frames_batch

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# primitives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sphere:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius <= 0:
            raise ValueError("sphere radius must be positive")


@dataclass(frozen=True)
class Capsule:
    a: np.ndarray
    b: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))
        if self.radius <= 0:
            raise ValueError("capsule radius must be positive")


@dataclass(frozen=True)
class Box:
    pose: RigidTransform
    half_extents: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "half_extents",
                           np.asarray(self.half_extents, dtype=float))
        if np.any(self.half_extents <= 0):
            raise ValueError("box half extents must be positive")


@dataclass(frozen=True)
class Cylinder:
    """Solid finite cylinder along the local z axis of its pose."""

    pose: RigidTransform
    radius: float
    half_length: float

    def __post_init__(self):
        if self.radius <= 0 or self.half_length <= 0:
            raise ValueError("cylinder radius and half length must be positive")


Primitive = Union[Sphere, Capsule, Box, Cylinder]


def transform_primitive(prim: Primitive, t: RigidTransform) -> Primitive:
    if isinstance(prim, Sphere):
        return Sphere(t.transform_points(prim.center), prim.radius)
    if isinstance(prim, Capsule):
        return Capsule(t.transform_points(prim.a), t.transform_points(prim.b),
                       prim.radius)
    if isinstance(prim, Box):
        return Box(t.compose(prim.pose), prim.half_extents)
    if isinstance(prim, Cylinder):
        return Cylinder(t.compose(prim.pose), prim.radius, prim.half_length)
    raise TypeError(f"unknown primitive {type(prim)!r}")


def bounding_radius(prim: Primitive) -> float:
    if isinstance(prim, Sphere):
        return prim.radius
    if isinstance(prim, Capsule):
        return 0.5 * float(np.linalg.norm(prim.b - prim.a)) + prim.radius
    if isinstance(prim, Box):
        return float(np.linalg.norm(prim.half_extents))
    return math.hypot(prim.radius, prim.half_length)


def primitive_center(prim: Primitive) -> np.ndarray:
    if isinstance(prim, Sphere):
        return prim.center
    if isinstance(prim, Capsule):
        return 0.5 * (prim.a + prim.b)
    return prim.pose.translation


# ---------------------------------------------------------------------------
# vectorized distance kernels (all return (S,) arrays)
# ---------------------------------------------------------------------------

def point_segment_distance(p, a, b) -> np.ndarray:
    """Distance from points ``p`` (S,3) to segments ``a``-``b`` (each (S,3))."""
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    t = np.where(denom > 0, np.einsum("ij,ij->i", p - a, ab) / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[:, None] * ab
    return np.linalg.norm(p - closest, axis=1)


def segment_segment_distance(p1, q1, p2, q2) -> np.ndarray:
    """Minimum distance between segment stacks (each argument (S,3))."""
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = np.einsum("ij,ij->i", d1, d1)
    e = np.einsum("ij,ij->i", d2, d2)
    f = np.einsum("ij,ij->i", d2, r)
    c = np.einsum("ij,ij->i", d1, r)
    b = np.einsum("ij,ij->i", d1, d2)
    denom = a * e - b * b
    s = np.where(denom > 1e-12, (b * f - c * e) / np.where(denom > 1e-12, denom, 1.0), 0.0)
    s = np.clip(s, 0.0, 1.0)
    t = np.where(e > 1e-12, (b * s + f) / np.where(e > 1e-12, e, 1.0), 0.0)
    t_clamped = np.clip(t, 0.0, 1.0)
    # re-project s where t was clamped
    s = np.where(t != t_clamped,
                 np.clip(np.where(a > 1e-12, (t_clamped * b - c) / np.where(a > 1e-12, a, 1.0), 0.0), 0.0, 1.0),
                 s)
    c1 = p1 + s[:, None] * d1
    c2 = p2 + t_clamped[:, None] * d2
    return np.linalg.norm(c1 - c2, axis=1)


def _box_exterior_distance(points, rot_t, center, half_extents) -> np.ndarray:
    """Distance from points to a box surface; zero anywhere inside."""
    local = (points - center) @ rot_t.T
    q = np.abs(local) - half_extents
    return np.linalg.norm(np.maximum(q, 0.0), axis=1)


def _cylinder_exterior_distance(points, rot_t, center, radius, half_length) -> np.ndarray:
    local = (points - center) @ rot_t.T
    rho = np.hypot(local[:, 0], local[:, 1])
    dr = np.maximum(rho - radius, 0.0)
    dz = np.maximum(np.abs(local[:, 2]) - half_length, 0.0)
    return np.hypot(dr, dz)


def _golden_min_on_segments(fn, a, b, iters: int = 48) -> np.ndarray:
    """Minimize a convex function along segments ``a``-``b`` (vectorized).

    ``fn(points)`` maps (S,3) points to (S,) values; distance-to-convex-set
    functions are convex along a line, so golden-section search is exact to
    the bracket width (~1e-10 of the segment after 48 iterations).
    """
    lo = np.zeros(a.shape[0])
    hi = np.ones(a.shape[0])
    seg = b - a

    def at(t):
        return fn(a + t[:, None] * seg)

    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc = at(c)
    fd = at(d)
    for _ in range(iters):
        left = fc < fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        c_old, d_old, fc_old, fd_old = c, d, fc, fd
        # one interior probe survives the shrink; only its sibling is fresh
        fresh = np.where(left, hi - GOLDEN * (hi - lo), lo + GOLDEN * (hi - lo))
        f_fresh = at(fresh)
        c = np.where(left, fresh, d_old)
        d = np.where(left, c_old, fresh)
        fc = np.where(left, f_fresh, fd_old)
        fd = np.where(left, fc_old, f_fresh)
    t_best = 0.5 * (lo + hi)
    return np.minimum(np.minimum(fc, fd), at(t_best))


# ---------------------------------------------------------------------------
# link-proxy vs obstacle separation
# ---------------------------------------------------------------------------

def _obstacle_cache(prim: Primitive) -> dict:
    """Precompute frame data reused across every batched query."""
    cache = {"prim": prim, "bound": bounding_radius(prim),
             "center": primitive_center(prim)}
    if isinstance(prim, (Box, Cylinder)):
        from .geometry import rotation_matrix_from_quat
        cache["rot_t"] = rotation_matrix_from_quat(prim.pose.rotation).T
    return cache


def _surface_distance_to_points(cache: dict, points: np.ndarray) -> np.ndarray:
    """Exterior distance from points to the obstacle surface (clamped at 0
    inside boxes/cylinders; signed for spheres and capsules)."""
    prim = cache["prim"]
    if isinstance(prim, Sphere):
        return np.linalg.norm(points - prim.center, axis=1) - prim.radius
    if isinstance(prim, Capsule):
        a = np.broadcast_to(prim.a, points.shape)
        b = np.broadcast_to(prim.b, points.shape)
        return point_segment_distance(points, a, b) - prim.radius
    if isinstance(prim, Box):
        return _box_exterior_distance(points, cache["rot_t"],
                                      prim.pose.translation, prim.half_extents)
    return _cylinder_exterior_distance(points, cache["rot_t"],
                                       prim.pose.translation,
                                       prim.radius, prim.half_length)


def _separation_sphere_link(cache: dict, centers: np.ndarray, link_radius: float) -> np.ndarray:
    return _surface_distance_to_points(cache, centers) - link_radius


def _separation_capsule_link(cache: dict, a: np.ndarray, b: np.ndarray,
                             link_radius: float, threshold: float) -> np.ndarray:
    """Separation between moving link capsules and one static obstacle.

    Cheap center/midpoint bounds resolve most rows; golden-section search runs
    only where the verdict against ``threshold`` is still ambiguous.
    """
    prim = cache["prim"]
    if isinstance(prim, Sphere):
        c = np.broadcast_to(prim.center, a.shape)
        return point_segment_distance(c, a, b) - prim.radius - link_radius
    if isinstance(prim, Capsule):
        pa = np.broadcast_to(prim.a, a.shape)
        pb = np.broadcast_to(prim.b, a.shape)
        return segment_segment_distance(a, b, pa, pb) - prim.radius - link_radius
    mid = 0.5 * (a + b)
    half = 0.5 * np.linalg.norm(b - a, axis=1)
    center_dist = np.linalg.norm(mid - cache["center"], axis=1)
    lower = center_dist - half - cache["bound"] - link_radius
    upper = _surface_distance_to_points(cache, mid) - link_radius
    sep = np.where(upper <= threshold, upper, lower)
    ambiguous = (lower <= threshold) & (upper > threshold)
    if np.any(ambiguous):
        rows = np.nonzero(ambiguous)[0]
        dist = _golden_min_on_segments(
            lambda pts: _surface_distance_to_points(cache, pts),
            a[rows], b[rows])
        sep[rows] = dist - link_radius
    return sep


# ---------------------------------------------------------------------------
# scene
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MotionCheckParams:
    """Maximum per-joint step (rad) between collision-checked waypoints."""

    resolution: float = 0.03

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")


@dataclass(frozen=True)
class LinkProxy:
    """Collision stand-in attached to a kinematic frame (1..6; 0 is the base)."""

    frame: int
    prim: Primitive  # Sphere or Capsule, coordinates in the frame

    def __post_init__(self):
        if not isinstance(self.prim, (Sphere, Capsule)):
            raise ConfigError("link proxies must be spheres or capsules")
        if not (0 <= self.frame <= 6):
            raise ConfigError("link proxy frame must be in 0..6")


@dataclass(frozen=True)
class Scene:
    """Named obstacles plus robot link proxies and a safety margin (mm).

    Workpiece obstacles are stored at their nominal pose and move rigidly with
    ``workpiece_offset``; the offset is always interpreted relative to nominal,
    so consecutive updates do not accumulate.
    """

    static_obstacles: tuple = ()
    workpiece_obstacles: tuple = ()
    link_proxies: tuple = ()
    margin: float = 10.0
    workpiece_offset: RigidTransform = field(default_factory=RigidTransform.identity)

    def __post_init__(self):
        names = [n for n, _ in self.static_obstacles] + \
                [n for n, _ in self.workpiece_obstacles]
        if len(names) != len(set(names)):
            raise ConfigError("obstacle names must be unique")

    def obstacles(self) -> list:
        """All obstacles at their current world pose."""
        moved = [(n, transform_primitive(p, self.workpiece_offset))
                 for n, p in self.workpiece_obstacles]
        return list(self.static_obstacles) + moved


def update_workpiece(scene: Scene, t: RigidTransform) -> Scene:
    """Re-pose the workpiece group by ``t`` relative to its nominal pose."""
    return replace(scene, workpiece_offset=t)


class CollisionChecker:
    """Batched collision queries for one (scene, chain) pair.

    Build once per scene; obstacle frame data is cached so per-query work is
    a fixed set of vectorized kernels over the configuration batch.
    """

    def __init__(self, scene: Scene, chain: KinematicChain):
        self.scene = scene
        self.chain = chain
        self._obstacles = [(name, _obstacle_cache(prim))
                           for name, prim in scene.obstacles()]
        self._proxies = list(scene.link_proxies)
        # self-collision pairs: frames at least 2 apart
        self._self_pairs = [
            (i, j) for i in range(len(self._proxies))
            for j in range(i + 1, len(self._proxies))
            if abs(self._proxies[i].frame - self._proxies[j].frame) >= 2
        ]

    def _world_proxies(self, frames: np.ndarray) -> list:
        """Per proxy: ('sphere', centers, r) or ('capsule', a, b, r) stacks."""
        out = []
        for proxy in self._proxies:
            m = frames[:, proxy.frame]
            rot = m[:, :3, :3]
            trans = m[:, :3, 3]
            if isinstance(proxy.prim, Sphere):
                c = np.einsum("sij,j->si", rot, proxy.prim.center) + trans
                out.append(("sphere", c, None, proxy.prim.radius))
            else:
                a = np.einsum("sij,j->si", rot, proxy.prim.a) + trans
                b = np.einsum("sij,j->si", rot, proxy.prim.b) + trans
                out.append(("capsule", a, b, proxy.prim.radius))
        return out

    def check_configs(self, qs: np.ndarray,
                      collect_pairs: bool = False):
        """Collision flags for a batch of configurations (S,).

        With ``collect_pairs`` a list of offending (proxy, obstacle) name pairs
        is returned for the first configuration as well.
        """
        qs = np.atleast_2d(np.asarray(qs, dtype=float))
        s = qs.shape[0]
        frames = fk_frames_batch(self.chain, qs)
        world = self._world_proxies(frames)
        margin = self.scene.margin
        hit = np.zeros(s, dtype=bool)
        pairs = []
        for pi, (kind, a, b, radius) in enumerate(world):
            for name, cache in self._obstacles:
                if kind == "sphere":
                    sep = _separation_sphere_link(cache, a, radius)
                else:
                    sep = _separation_capsule_link(cache, a, b, radius, margin)
                colliding = sep <= margin
                hit |= colliding
                if collect_pairs and colliding[0]:
                    pairs.append((f"link{self._proxies[pi].frame}", name))
        for i, j in self._self_pairs:
            ki, ai, bi, ri = world[i]
            kj, aj, bj, rj = world[j]
            if ki == "sphere" and kj == "sphere":
                sep = np.linalg.norm(ai - aj, axis=1) - ri - rj
            elif ki == "sphere":
                sep = point_segment_distance(ai, aj, bj) - ri - rj
            elif kj == "sphere":
                sep = point_segment_distance(aj, ai, bi) - ri - rj
            else:
                sep = segment_segment_distance(ai, bi, aj, bj) - ri - rj
            colliding = sep <= margin
            hit |= colliding
            if collect_pairs and colliding[0]:
                pairs.append((f"link{self._proxies[i].frame}",
                              f"link{self._proxies[j].frame}"))
        if collect_pairs:
            return hit, pairs
        return hit


def in_collision(scene: Scene, chain: KinematicChain, q,
                 checker: Optional[CollisionChecker] = None):
    """Check one configuration; returns (bool, colliding name pairs)."""
    checker = checker or CollisionChecker(scene, chain)
    hit, pairs = checker.check_configs(np.asarray(q, dtype=float)[None, :],
                                       collect_pairs=True)
    return bool(hit[0]), pairs


def interpolate_configs(q_a, q_b, resolution: float) -> np.ndarray:
    """Straight joint-space segment sampled so consecutive configurations
    differ by at most ``resolution`` per joint; includes both endpoints."""
    q_a = np.asarray(q_a, dtype=float)
    q_b = np.asarray(q_b, dtype=float)
    steps = max(1, int(math.ceil(float(np.abs(q_b - q_a).max()) / resolution)))
    ts = np.linspace(0.0, 1.0, steps + 1)
    return q_a[None, :] + ts[:, None] * (q_b - q_a)[None, :]


def motion_valid(scene: Scene, chain: KinematicChain, q_a, q_b,
                 params: MotionCheckParams = MotionCheckParams(),
                 checker: Optional[CollisionChecker] = None) -> bool:
    """True when the straight joint-space segment is collision-free at the
    requested interpolation resolution."""
    checker = checker or CollisionChecker(scene, chain)
    qs = interpolate_configs(q_a, q_b, params.resolution)
    return not bool(checker.check_configs(qs).any())
