"""Cloud synthesis from CAD meshes, multi-scale normal filtering, and ICP.

The pipeline mirrors a depth-sensor workflow: render dense clouds from meshes
with virtual cameras, crop to the working volume, reject noise by comparing
surface normals at two support radii, then register sensed against reference
clouds with point-to-point ICP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptyCloudError, NoCorrespondencesError
from .geometry import (Aabb, PointCloud, RigidTransform, TriangleMesh, apply,
                       cast_rays, quat_from_rotation_matrix)


# ---------------------------------------------------------------------------
# virtual camera rigs
# ---------------------------------------------------------------------------

def truncated_icosahedron_directions() -> np.ndarray:
    """The 60 unit directions toward the vertices of a truncated icosahedron."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    bases = [
        (0.0, 1.0, 3.0 * phi),
        (1.0, 2.0 + phi, 2.0 * phi),
        (phi, 2.0, 2.0 * phi + 1.0),
    ]
    seen = set()
    dirs = []
    for base in bases:
        for cyc in range(3):
            trip = base[cyc:] + base[:cyc]
            for sx in (1.0, -1.0):
                for sy in (1.0, -1.0):
                    for sz in (1.0, -1.0):
                        v = (sx * trip[0], sy * trip[1], sz * trip[2])
                        key = tuple(round(c, 9) for c in v)
                        if key in seen:
                            continue
                        seen.add(key)
                        dirs.append(v)
    dirs = np.array(dirs)
    assert dirs.shape == (60, 3)
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def look_at_origin(position) -> RigidTransform:
    """Camera pose at ``position`` with its +z (optical) axis through the origin."""
    position = np.asarray(position, dtype=float)
    forward = -position / np.linalg.norm(position)
    up_hint = np.array([0.0, 0.0, 1.0])
    if abs(float(np.dot(forward, up_hint))) > 0.97:
        up_hint = np.array([1.0, 0.0, 0.0])
    right = np.cross(up_hint, forward)
    right /= np.linalg.norm(right)
    down = np.cross(forward, right)
    rot = np.column_stack([right, down, forward])
    return RigidTransform(quat_from_rotation_matrix(rot), position)


@dataclass
class VirtualCameraRig:
    """A set of inward-looking virtual pinhole cameras on a sphere."""

    viewpoints: list  # list[RigidTransform], camera-to-world, +z toward origin
    width: int = 128
    height: int = 128
    hfov: float = math.radians(60.0)
    radius: float = 1000.0

    def validate(self):
        if not self.viewpoints:
            raise ValueError("rig needs at least one viewpoint")
        for pose in self.viewpoints:
            fwd = pose.transform_directions(np.array([0.0, 0.0, 1.0]))
            to_origin = -pose.translation / np.linalg.norm(pose.translation)
            angle = math.acos(min(1.0, float(np.dot(fwd, to_origin))))
            if angle > 1e-6:
                raise ValueError("viewpoint does not look at the origin")


def icosahedron_rig(radius: float, width: int = 128, height: int = 128,
                    hfov: float = math.radians(60.0)) -> VirtualCameraRig:
    """Full-coverage rig: one camera at each of the 60 icosahedron vertices."""
    views = [look_at_origin(d * radius) for d in truncated_icosahedron_directions()]
    return VirtualCameraRig(views, width, height, hfov, radius)


def ring_rig(radius: float, azimuths, elevation: float,
             width: int = 128, height: int = 128,
             hfov: float = math.radians(60.0)) -> VirtualCameraRig:
    """Sensor-style rig: a few cameras on a ring, e.g. two perpendicular ones."""
    views = []
    for az in azimuths:
        d = np.array([math.cos(elevation) * math.cos(az),
                      math.cos(elevation) * math.sin(az),
                      math.sin(elevation)])
        views.append(look_at_origin(d * radius))
    return VirtualCameraRig(views, width, height, hfov, radius)


def camera_rays(pose: RigidTransform, width: int, height: int, hfov: float):
    """World-frame origins and directions through every pixel center."""
    tan_h = math.tan(0.5 * hfov)
    tan_v = tan_h * height / width
    xs = (2.0 * (np.arange(width) + 0.5) / width - 1.0) * tan_h
    ys = (2.0 * (np.arange(height) + 0.5) / height - 1.0) * tan_v
    gx, gy = np.meshgrid(xs, ys)
    dirs = np.column_stack([gx.ravel(), gy.ravel(), np.ones(width * height)])
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    world_dirs = pose.transform_directions(dirs)
    origins = np.broadcast_to(pose.translation, world_dirs.shape).copy()
    return origins, world_dirs


def raytrace_cloud(mesh: TriangleMesh, rig: VirtualCameraRig) -> PointCloud:
    """Union of the per-view depth images of ``mesh`` rendered from ``rig``.

    Views are processed in rig order and pixels row-major, so the output is
    deterministic.  Raises EmptyCloudError when no ray hits the mesh.
    """
    rig.validate()
    if mesh.bounding_radius() >= rig.radius:
        raise ValueError("mesh does not fit inside the rig sphere")
    chunks = []
    for pose in rig.viewpoints:
        origins, dirs = camera_rays(pose, rig.width, rig.height, rig.hfov)
        hit, points, _, _ = cast_rays(mesh, origins, dirs)
        if np.any(hit):
            chunks.append(points[hit])
    if not chunks:
        raise EmptyCloudError("no ray hit the mesh from any viewpoint")
    return PointCloud(np.vstack(chunks))


# ---------------------------------------------------------------------------
# cropping, downsampling, noise
# ---------------------------------------------------------------------------

def segment_box(cloud: PointCloud, bounds: Aabb) -> PointCloud:
    """Keep exactly the points inside the closed box, carrying normals along."""
    return cloud.select(bounds.contains(cloud.points))


def downsample_voxel(cloud: PointCloud, cell: float) -> PointCloud:
    """Average points per voxel of size ``cell``; output sorted by voxel key."""
    if cell <= 0:
        raise ValueError("voxel cell must be positive")
    if len(cloud) == 0:
        return PointCloud(np.zeros((0, 3)))
    keys = np.floor((cloud.points - cloud.points.min(axis=0)) / cell).astype(np.int64)
    _, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    n_cells = counts.shape[0]
    sums = np.zeros((n_cells, 3))
    for k in range(3):
        sums[:, k] = np.bincount(inverse, weights=cloud.points[:, k], minlength=n_cells)
    centroids = sums / counts[:, None]
    normals = None
    if cloud.normals is not None:
        nsum = np.zeros((n_cells, 3))
        for k in range(3):
            nsum[:, k] = np.bincount(inverse, weights=cloud.normals[:, k], minlength=n_cells)
        norm = np.linalg.norm(nsum, axis=1)
        ok = norm > 1e-9
        if np.all(ok):
            normals = nsum / norm[:, None]
    return PointCloud(centroids, normals)


def add_noise(cloud: PointCloud, sigma: float, rng: np.random.Generator) -> PointCloud:
    """Add isotropic Gaussian position noise; normals are dropped."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    return PointCloud(cloud.points + rng.normal(0.0, sigma, cloud.points.shape))


# ---------------------------------------------------------------------------
# nearest-neighbor index
# ---------------------------------------------------------------------------

class KdTree:
    """Exact nearest-neighbor index over a cloud with lowest-index tie-breaking."""

    def __init__(self, cloud_or_points):
        pts = cloud_or_points.points if isinstance(cloud_or_points, PointCloud) \
            else np.atleast_2d(np.asarray(cloud_or_points, dtype=float))
        if len(pts) == 0:
            raise EmptyCloudError("cannot index an empty cloud")
        self.points = pts
        self._tree = cKDTree(pts)

    def __len__(self):
        return len(self.points)

    def nearest(self, query) -> tuple[int, float]:
        """Exact nearest point; equal distances resolve to the lowest index."""
        query = np.asarray(query, dtype=float)
        d0, _ = self._tree.query(query)
        radius = d0 * (1.0 + 1e-9) + 1e-9
        cand = np.array(self._tree.query_ball_point(query, radius), dtype=np.int64)
        cand.sort()
        dists = np.linalg.norm(self.points[cand] - query, axis=1)
        best = dists.min()
        idx = int(cand[int(np.argmax(dists == best))])
        return idx, float(best)

    def query(self, points):
        """Batch nearest lookup (scipy tie-breaking); fast path for ICP."""
        d, i = self._tree.query(np.atleast_2d(points))
        return d, i

    def query_ball(self, points, radius):
        return self._tree.query_ball_point(np.atleast_2d(points), radius)


# ---------------------------------------------------------------------------
# normal estimation and the two-scale normal-difference filter
# ---------------------------------------------------------------------------

def estimate_normals(cloud: PointCloud, radius: float,
                     orient_toward=None, chunk: int = 2048):
    """Per-point surface normals from the covariance of the neighborhood.

    The normal is the eigenvector of the smallest covariance eigenvalue over
    all neighbors within ``radius``.  Points with fewer than 3 neighbors
    (including themselves) are flagged invalid and get NaN normals.

    Signs: when ``orient_toward`` is given, normals are flipped to point at
    that exterior reference; otherwise the largest-magnitude component is made
    positive so results are deterministic.

    Returns ``(normals, valid)``.
    """
    if radius <= 0:
        raise ValueError("support radius must be positive")
    pts = cloud.points
    n = len(pts)
    if n == 0:
        return np.zeros((0, 3)), np.zeros(0, dtype=bool)
    tree = cKDTree(pts)
    normals = np.full((n, 3), np.nan)
    valid = np.zeros(n, dtype=bool)
    for start in range(0, n, chunk):
        rows = np.arange(start, min(start + chunk, n))
        lists = tree.query_ball_point(pts[rows], radius)
        lens = np.array([len(v) for v in lists])
        ok = lens >= 3
        if not np.any(ok):
            continue
        flat = np.concatenate([np.asarray(lists[k], dtype=np.int64)
                               for k in range(len(lists)) if ok[k]])
        seg = np.repeat(np.arange(int(ok.sum())), lens[ok])
        m = int(ok.sum())
        neigh = pts[flat]
        sums = np.zeros((m, 3))
        sq = np.zeros((m, 3, 3))
        for a in range(3):
            sums[:, a] = np.bincount(seg, weights=neigh[:, a], minlength=m)
            for b in range(a, 3):
                sq[:, a, b] = np.bincount(seg, weights=neigh[:, a] * neigh[:, b],
                                          minlength=m)
                sq[:, b, a] = sq[:, a, b]
        cnt = lens[ok].astype(float)
        mean = sums / cnt[:, None]
        cov = sq / cnt[:, None, None] - mean[:, :, None] * mean[:, None, :]
        _, vecs = np.linalg.eigh(cov)
        nrm = vecs[:, :, 0]
        nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
        idx = rows[ok]
        normals[idx] = nrm
        valid[idx] = True
    if orient_toward is not None:
        ref = np.asarray(orient_toward, dtype=float)
        flip = np.einsum("ij,ij->i", normals[valid], ref[None, :] - pts[valid]) < 0
        sel = np.nonzero(valid)[0][flip]
        normals[sel] = -normals[sel]
    else:
        rows = np.nonzero(valid)[0]
        dominant = np.abs(normals[rows]).argmax(axis=1)
        sign = np.sign(normals[rows, dominant])
        sign[sign == 0] = 1.0
        normals[rows] *= sign[:, None]
    return normals, valid


@dataclass(frozen=True)
class DonParams:
    """Two support radii (mm) and the keep threshold on the normal difference."""

    r1: float
    r2: float
    threshold: float

    def __post_init__(self):
        if not (0 < self.r1 < self.r2):
            raise ValueError("need 0 < r1 < r2")
        if not (0.0 <= self.threshold <= 1.0):
            raise ValueError("threshold must lie in [0, 1]")


@dataclass
class DonResult:
    cloud: PointCloud
    kept_indices: np.ndarray
    magnitudes: np.ndarray  # per input point, NaN where the neighborhood degenerated
    degenerate_count: int
    removed_count: int


def don_filter(cloud: PointCloud, params: DonParams) -> DonResult:
    """Keep points whose normals agree across the two support radii.

    The per-point magnitude is half the norm of the difference between the
    small- and large-radius normals, with signs aligned so the two normals
    have non-negative dot product; it always lies in [0, 1].  Points whose
    magnitude exceeds the threshold are removed; degenerate neighborhoods are
    dropped and counted separately.
    """
    if len(cloud) == 0:
        raise EmptyCloudError("cannot filter an empty cloud")
    n1, v1 = estimate_normals(cloud, params.r1)
    n2, v2 = estimate_normals(cloud, params.r2)
    valid = v1 & v2
    mags = np.full(len(cloud), np.nan)
    if np.any(valid):
        a = n1[valid]
        b = n2[valid]
        dots = np.einsum("ij,ij->i", a, b)
        a = np.where(dots[:, None] < 0, -a, a)
        mags[valid] = 0.5 * np.linalg.norm(a - b, axis=1)
    keep = valid & (mags <= params.threshold)
    kept_indices = np.nonzero(keep)[0]
    return DonResult(
        cloud=cloud.select(kept_indices),
        kept_indices=kept_indices,
        magnitudes=mags,
        degenerate_count=int((~valid).sum()),
        removed_count=int(len(cloud) - kept_indices.size),
    )


# ---------------------------------------------------------------------------
# iterative closest point
# ---------------------------------------------------------------------------

def solve_rigid_alignment(a: np.ndarray, b: np.ndarray) -> RigidTransform:
    """Least-squares rigid transform mapping points ``a`` onto ``b``.

    Cross-covariance SVD with a determinant guard against reflections.
    """
    ca = a.mean(axis=0)
    cb = b.mean(axis=0)
    h = (a - ca).T @ (b - cb)
    u, _, vt = np.linalg.svd(h)
    v = vt.T
    d = np.sign(np.linalg.det(v @ u.T))
    r = v @ np.diag([1.0, 1.0, d]) @ u.T
    t = cb - r @ ca
    return RigidTransform(quat_from_rotation_matrix(r), t)


@dataclass
class IcpResult:
    """Registration outcome: transform maps the source onto the target."""

    transform: RigidTransform
    convergence_score: float  # mean squared matched distance, mm^2
    iterations_run: int
    converged: bool
    scores: list = field(default_factory=list)
    matched_pairs: int = 0


def icp(source: PointCloud, target: PointCloud, max_iterations: int = 60,
        correspondence_cutoff: float = 100.0, epsilon: float = 1e-4,
        allow_bootstrap: bool = True, min_pairs: int = 3) -> IcpResult:
    """Point-to-point ICP: match every source point to its nearest target
    neighbor, solve the least-squares rigid transform, repeat.

    Matches farther than ``correspondence_cutoff`` are rejected.  When fewer
    than 5% of points survive the cutoff and ``allow_bootstrap`` is set, one
    unrestricted round is used instead, which lets grossly offset clouds fall
    into the capture range before strict rejection takes over.  Stops early
    once the score improves by less than ``epsilon`` (mm^2).
    """
    if len(source) < min_pairs or len(target) < min_pairs:
        raise NoCorrespondencesError("clouds must contain at least 3 points")
    tree = cKDTree(target.points)
    current = source.points.copy()
    transform = RigidTransform.identity()
    scores: list[float] = []
    converged = False
    iterations = 0
    matched = 0
    prev_score = None
    for it in range(1, max_iterations + 1):
        d, idx = tree.query(current)
        inliers = d <= correspondence_cutoff
        needed = max(min_pairs, int(math.ceil(0.05 * len(current))))
        if int(inliers.sum()) >= needed:
            used = inliers
        elif allow_bootstrap:
            used = np.ones(len(current), dtype=bool)
        elif int(inliers.sum()) >= min_pairs:
            used = inliers
        else:
            raise NoCorrespondencesError(
                f"only {int(inliers.sum())} correspondences within "
                f"{correspondence_cutoff} mm", iteration=it)
        a = current[used]
        b = target.points[idx[used]]
        step = solve_rigid_alignment(a, b)
        transform = step.compose(transform)
        current = step.transform_points(current)
        score = float(np.mean(np.sum((step.transform_points(a) - b) ** 2, axis=1)))
        scores.append(score)
        iterations = it
        matched = int(used.sum())
        if prev_score is not None and abs(prev_score - score) < epsilon:
            converged = True
            break
        prev_score = score
    # post-refinement score from a fresh matching round
    d, _ = tree.query(current)
    inl = d <= correspondence_cutoff
    final = float(np.mean(d[inl] ** 2)) if np.any(inl) else float(np.mean(d ** 2))
    return IcpResult(transform, final, iterations, converged, scores, matched)


# ---------------------------------------------------------------------------
# registration robustness sweep
# ---------------------------------------------------------------------------

@dataclass
class SweepEntry:
    offset: float
    score: float  # NaN when the run failed
    converged: bool
    iterations: int
    failed: bool = False


def offset_transform(axis: str, offset: float, about=None) -> RigidTransform:
    """Translation along x/y/z (mm) or yaw (rad) about a vertical axis.

    Yaw rotates about the vertical line through ``about`` (default origin) so
    a workpiece far from the world origin spins in place.
    """
    if axis in ("x", "y", "z"):
        t = np.zeros(3)
        t["xyz".index(axis)] = offset
        return RigidTransform.from_translation(t)
    if axis == "yaw":
        rot = RigidTransform.from_axis_angle([0, 0, 1], offset)
        if about is None:
            return rot
        center = RigidTransform.from_translation(about)
        return center.compose(rot).compose(center.inverse())
    raise ValueError(f"unknown sweep axis {axis!r}")


def robustness_sweep(source: PointCloud, target: PointCloud, axis: str,
                     offsets, yaw_about=None, **icp_kwargs) -> list[SweepEntry]:
    """Run one ICP registration per offset applied to the source cloud."""
    offsets = list(offsets)
    if any(b < a for a, b in zip(offsets, offsets[1:])):
        raise ValueError("offsets must be sorted ascending")
    entries = []
    for off in offsets:
        t = offset_transform(axis, off, about=yaw_about)
        shifted = apply(t, source)
        try:
            res = icp(shifted, target, **icp_kwargs)
            entries.append(SweepEntry(off, res.convergence_score,
                                      res.converged, res.iterations_run))
        except NoCorrespondencesError:
            entries.append(SweepEntry(off, float("nan"), False, 0, failed=True))
    return entries
