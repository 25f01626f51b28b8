"""Core 3-D math: quaternions, rigid transforms, meshes, point clouds, ray casting.

Conventions used throughout the package:

- lengths are millimetres, angles are radians (degrees only at the CLI boundary)
- quaternions are numpy arrays ``[w, x, y, z]`` with unit norm
- Euler angles are intrinsic Z-Y-X (yaw, pitch, roll)
- points are numpy arrays of shape ``(3,)`` or ``(N, 3)``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import MeshFormatError

QUAT_NORM_TOL = 1e-9
NORMAL_NORM_TOL = 1e-6
DEGENERATE_TRIANGLE_AREA = 1e-9
RAY_TIE_TOL = 1e-9


# ---------------------------------------------------------------------------
# quaternions
# ---------------------------------------------------------------------------

def quat_identity() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 0.0])


def quat_normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if n == 0.0 or not np.isfinite(n):
        raise ValueError("cannot normalize zero or non-finite quaternion")
    return q / n


def quat_multiply(a, b) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_conjugate(q) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_from_axis_angle(axis, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n == 0.0:
        raise ValueError("rotation axis must be non-zero")
    half = 0.5 * angle
    return np.concatenate(([math.cos(half)], math.sin(half) * axis / n))


def rotation_matrix_from_quat(q) -> np.ndarray:
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def quat_from_rotation_matrix(m) -> np.ndarray:
    """Convert a proper rotation matrix to a unit quaternion (Shepperd's method)."""
    m = np.asarray(m, dtype=float)
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    if tr > 0.0:
        s = math.sqrt(tr + 1.0) * 2.0
        q = np.array([0.25 * s,
                      (m[2, 1] - m[1, 2]) / s,
                      (m[0, 2] - m[2, 0]) / s,
                      (m[1, 0] - m[0, 1]) / s])
    elif m[0, 0] >= m[1, 1] and m[0, 0] >= m[2, 2]:
        s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        q = np.array([(m[2, 1] - m[1, 2]) / s,
                      0.25 * s,
                      (m[0, 1] + m[1, 0]) / s,
                      (m[0, 2] + m[2, 0]) / s])
    elif m[1, 1] >= m[2, 2]:
        s = math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        q = np.array([(m[0, 2] - m[2, 0]) / s,
                      (m[0, 1] + m[1, 0]) / s,
                      0.25 * s,
                      (m[1, 2] + m[2, 1]) / s])
    else:
        s = math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
        q = np.array([(m[1, 0] - m[0, 1]) / s,
                      (m[0, 2] + m[2, 0]) / s,
                      (m[1, 2] + m[2, 1]) / s,
                      0.25 * s])
    return quat_normalize(q)


def quat_rotate(q, points) -> np.ndarray:
    """Rotate one point or an ``(N, 3)`` stack of points by a unit quaternion."""
    points = np.asarray(points, dtype=float)
    r = rotation_matrix_from_quat(q)
    return points @ r.T


def quat_angular_distance(a, b) -> float:
    """Rotation angle (rad) between two unit quaternions, double-cover aware."""
    d = min(1.0, abs(float(np.dot(a, b))))
    return 2.0 * math.acos(d)


def euler_zyx_from_quat(q) -> tuple[np.ndarray, bool]:
    """Intrinsic Z-Y-X (yaw, pitch, roll) angles of a unit quaternion.

    Returns ``(angles, gimbal_locked)``.  At pitch = +/- pi/2 the yaw/roll split
    is not unique; roll is pinned to zero and the flag is set.
    """
    w, x, y, z = q
    sin_pitch = 2.0 * (w * y - z * x)
    if abs(sin_pitch) >= 1.0 - 1e-9:
        pitch = math.copysign(math.pi / 2.0, sin_pitch)
        yaw = 2.0 * math.atan2(z, w) if sin_pitch > 0 else -2.0 * math.atan2(z, w)
        return np.array([yaw, pitch, 0.0]), True
    pitch = math.asin(sin_pitch)
    yaw = math.atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z))
    roll = math.atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y))
    return np.array([yaw, pitch, roll]), False


def quat_from_euler_zyx(angles) -> np.ndarray:
    yaw, pitch, roll = angles
    qz = quat_from_axis_angle([0, 0, 1], yaw)
    qy = quat_from_axis_angle([0, 1, 0], pitch)
    qx = quat_from_axis_angle([1, 0, 0], roll)
    return quat_multiply(quat_multiply(qz, qy), qx)


# ---------------------------------------------------------------------------
# rigid transforms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RigidTransform:
    """SE(3) pose stored as unit quaternion plus translation in mm."""

    rotation: np.ndarray = field(default_factory=quat_identity)
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=float))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float))
        if self.rotation.shape != (4,) or self.translation.shape != (3,):
            raise ValueError("rotation must be (4,) quaternion, translation (3,)")
        n = np.linalg.norm(self.rotation)
        if not np.isfinite(n) or abs(n - 1.0) > 1e-6:
            raise ValueError(f"quaternion norm {n} too far from 1")
        if abs(n - 1.0) > QUAT_NORM_TOL:
            object.__setattr__(self, "rotation", self.rotation / n)

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform()

    @staticmethod
    def from_translation(t) -> "RigidTransform":
        return RigidTransform(quat_identity(), np.asarray(t, dtype=float))

    @staticmethod
    def from_axis_angle(axis, angle, translation=(0.0, 0.0, 0.0)) -> "RigidTransform":
        return RigidTransform(quat_from_axis_angle(axis, angle), np.asarray(translation, dtype=float))

    @staticmethod
    def from_euler_zyx(angles, translation=(0.0, 0.0, 0.0)) -> "RigidTransform":
        return RigidTransform(quat_from_euler_zyx(angles), np.asarray(translation, dtype=float))

    @staticmethod
    def from_matrix(m) -> "RigidTransform":
        m = np.asarray(m, dtype=float)
        return RigidTransform(quat_from_rotation_matrix(m[:3, :3]), m[:3, 3].copy())

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = rotation_matrix_from_quat(self.rotation)
        m[:3, 3] = self.translation
        return m

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """Return self o other, the transform applying ``other`` first."""
        q = quat_normalize(quat_multiply(self.rotation, other.rotation))
        t = quat_rotate(self.rotation, other.translation) + self.translation
        return RigidTransform(q, t)

    def inverse(self) -> "RigidTransform":
        q_inv = quat_conjugate(self.rotation)
        return RigidTransform(q_inv, -quat_rotate(q_inv, self.translation))

    def transform_points(self, points) -> np.ndarray:
        return quat_rotate(self.rotation, points) + self.translation

    def transform_directions(self, dirs) -> np.ndarray:
        return quat_rotate(self.rotation, dirs)

    def rotation_angle(self) -> float:
        return quat_angular_distance(self.rotation, quat_identity())


def compose(a: RigidTransform, b: RigidTransform) -> RigidTransform:
    return a.compose(b)


# ---------------------------------------------------------------------------
# point clouds, meshes, boxes
# ---------------------------------------------------------------------------

@dataclass
class PointCloud:
    """Ordered 3-D points in mm with optional per-point unit normals."""

    points: np.ndarray
    normals: Optional[np.ndarray] = None

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.size == 0:
            self.points = self.points.reshape(0, 3)
        if self.points.shape[1] != 3:
            raise ValueError("points must have shape (N, 3)")
        if self.normals is not None:
            self.normals = np.atleast_2d(np.asarray(self.normals, dtype=float))
            if self.normals.shape != self.points.shape:
                raise ValueError("normals must match points in shape")

    def __len__(self) -> int:
        return self.points.shape[0]

    def validate(self):
        if not np.all(np.isfinite(self.points)):
            raise ValueError("cloud contains non-finite points")
        if self.normals is not None:
            norms = np.linalg.norm(self.normals, axis=1)
            if not np.all(np.abs(norms - 1.0) <= NORMAL_NORM_TOL):
                raise ValueError("normals must be unit length")

    def select(self, mask_or_indices) -> "PointCloud":
        n = self.normals[mask_or_indices] if self.normals is not None else None
        return PointCloud(self.points[mask_or_indices], n)

    def centroid(self) -> np.ndarray:
        return self.points.mean(axis=0)


def apply(t: RigidTransform, cloud: PointCloud) -> PointCloud:
    """Rigidly move a cloud: points rotate and translate, normals rotate only."""
    pts = t.transform_points(cloud.points)
    nrm = t.transform_directions(cloud.normals) if cloud.normals is not None else None
    return PointCloud(pts, nrm)


@dataclass
class TriangleMesh:
    """Indexed triangle soup in mm."""

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        self.vertices = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        self.triangles = np.atleast_2d(np.asarray(self.triangles, dtype=np.int64))
        if self.vertices.shape[1] != 3 or self.triangles.shape[1] != 3:
            raise ValueError("vertices must be (V, 3), triangles (T, 3)")

    def validate(self):
        if self.triangles.size and self.triangles.max() >= len(self.vertices):
            raise ValueError("triangle index out of range")
        if self.triangles.min(initial=0) < 0:
            raise ValueError("negative triangle index")
        if np.any(self.triangle_areas() <= DEGENERATE_TRIANGLE_AREA):
            raise ValueError("mesh contains degenerate triangles")

    def triangle_areas(self) -> np.ndarray:
        v = self.vertices[self.triangles]
        cross = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
        return 0.5 * np.linalg.norm(cross, axis=1)

    def aabb(self) -> "Aabb":
        return Aabb(self.vertices.min(axis=0), self.vertices.max(axis=0))

    def bounding_radius(self, center=None) -> float:
        c = np.zeros(3) if center is None else np.asarray(center, dtype=float)
        return float(np.linalg.norm(self.vertices - c, axis=1).max())

    def transformed(self, t: RigidTransform) -> "TriangleMesh":
        return TriangleMesh(t.transform_points(self.vertices), self.triangles.copy())


def merge_meshes(meshes) -> TriangleMesh:
    verts, tris, offset = [], [], 0
    for m in meshes:
        verts.append(m.vertices)
        tris.append(m.triangles + offset)
        offset += len(m.vertices)
    return TriangleMesh(np.vstack(verts), np.vstack(tris))


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned box used for Cartesian segmentation, closed on all faces."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", np.asarray(self.lo, dtype=float))
        object.__setattr__(self, "hi", np.asarray(self.hi, dtype=float))
        if np.any(self.lo > self.hi):
            raise ValueError("Aabb lo must be <= hi componentwise")

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=1)


# ---------------------------------------------------------------------------
# ray casting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RayHit:
    point: np.ndarray
    distance: float
    triangle: int


def _moller_trumbore(origins, directions, v0, e1, e2):
    """Ray/triangle distances for every (ray, triangle) pair.

    origins/directions: (R, 3); v0/e1/e2: (T, 3).  Returns (R, T) distances,
    inf where there is no forward intersection.  Edges are inclusive so a ray
    grazing a shared edge reports hits on every adjacent triangle.
    """
    o = origins[:, None, :]
    d = directions[:, None, :]
    p = np.cross(d, e2[None, :, :])
    det = np.einsum("rtk,tk->rt", p, e1)
    near_parallel = np.abs(det) < 1e-12
    det = np.where(near_parallel, 1.0, det)
    inv = 1.0 / det
    s = o - v0[None, :, :]
    u = np.einsum("rtk,rtk->rt", s, p) * inv
    q = np.cross(s, e1[None, :, :])
    v = np.einsum("rtk,rtk->rt", q, np.broadcast_to(d, q.shape)) * inv
    t = np.einsum("rtk,tk->rt", q, e2) * inv
    eps = 1e-12
    ok = (~near_parallel) & (u >= -eps) & (v >= -eps) & (u + v <= 1.0 + eps) & (t > 1e-9)
    return np.where(ok, t, np.inf)


def _nearest_with_tiebreak(distances):
    """Per-row nearest distance with ties (within RAY_TIE_TOL) going to the
    lowest column index.  Returns (distance, column)."""
    best = distances.min(axis=1)
    tied = distances <= (best[:, None] + RAY_TIE_TOL)
    col = tied.argmax(axis=1)
    return best, col


def ray_cast(mesh: TriangleMesh, origin, direction) -> Optional[RayHit]:
    """Nearest intersection of one ray with a mesh, or None on a miss.

    Ties at equal distance go to the lowest triangle index.
    """
    origin = np.asarray(origin, dtype=float)
    direction = np.asarray(direction, dtype=float)
    n = np.linalg.norm(direction)
    if abs(n - 1.0) > 1e-6:
        raise ValueError("ray direction must be normalized")
    tri = mesh.vertices[mesh.triangles]
    v0 = tri[:, 0]
    dist = _moller_trumbore(origin[None, :], direction[None, :], v0,
                            tri[:, 1] - v0, tri[:, 2] - v0)
    best, idx = _nearest_with_tiebreak(dist)
    if not np.isfinite(best[0]):
        return None
    d = float(best[0])
    return RayHit(origin + d * direction, d, int(idx[0]))


def _ray_aabb_mask(origins, directions, lo, hi):
    """Slab test: which rays can intersect the box [lo, hi]."""
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / directions
    t1 = (lo[None, :] - origins) * inv
    t2 = (hi[None, :] - origins) * inv
    # rays parallel to a slab: inside iff origin within slab bounds
    parallel = directions == 0.0
    t_lo = np.where(parallel, -np.inf, np.minimum(t1, t2))
    t_hi = np.where(parallel, np.inf, np.maximum(t1, t2))
    inside_slab = (origins >= lo[None, :]) & (origins <= hi[None, :])
    t_lo = np.where(parallel & ~inside_slab, np.inf, t_lo)
    tmin = t_lo.max(axis=1)
    tmax = t_hi.min(axis=1)
    return (tmax >= np.maximum(tmin, 0.0)) & np.isfinite(tmin)


def cast_rays(mesh: TriangleMesh, origins, directions,
              group_size: int = 64, chunk: int = 16384):
    """Batch ray cast used by cloud synthesis.

    Triangles are processed in index-contiguous groups pruned by a per-group
    AABB slab test, so the result is identical to testing every pair but much
    cheaper on meshes whose parts are spatially coherent.

    Returns ``(hit_mask, points, distances, triangle_indices)`` with one entry
    per input ray; points are zero where ``hit_mask`` is False.
    """
    origins = np.asarray(origins, dtype=float)
    directions = np.asarray(directions, dtype=float)
    n_rays = origins.shape[0]
    best = np.full(n_rays, np.inf)
    best_tri = np.full(n_rays, -1, dtype=np.int64)

    tri = mesh.vertices[mesh.triangles]
    for start in range(0, len(tri), group_size):
        sub = tri[start:start + group_size]
        lo = sub.reshape(-1, 3).min(axis=0)
        hi = sub.reshape(-1, 3).max(axis=0)
        cand = np.nonzero(_ray_aabb_mask(origins, directions, lo, hi))[0]
        if cand.size == 0:
            continue
        v0 = sub[:, 0]
        e1 = sub[:, 1] - v0
        e2 = sub[:, 2] - v0
        for cs in range(0, cand.size, chunk):
            rows = cand[cs:cs + chunk]
            dist = _moller_trumbore(origins[rows], directions[rows], v0, e1, e2)
            d, col = _nearest_with_tiebreak(dist)
            # keep the globally nearest hit; equal distances keep the lower
            # triangle index, matching single-ray tie-breaking
            finite = np.isfinite(d)
            with np.errstate(invalid="ignore"):
                better = finite & (d < best[rows] - RAY_TIE_TOL)
                gap = np.where(finite & np.isfinite(best[rows]),
                               d - best[rows], np.inf)
            tie = np.abs(gap) <= RAY_TIE_TOL
            take = better | (tie & (start + col < best_tri[rows]))
            upd = rows[take]
            best[upd] = d[take]
            best_tri[upd] = start + col[take]

    hit = np.isfinite(best)
    points = np.zeros((n_rays, 3))
    points[hit] = origins[hit] + best[hit, None] * directions[hit]
    return hit, points, best, best_tri


# ---------------------------------------------------------------------------
# mesh and cloud file io (ASCII STL, ASCII PLY 1.0)
# ---------------------------------------------------------------------------

def _parse_ply_header(lines):
    """Parse an ASCII PLY header, returning (elements, body_start_index).

    elements is a list of (name, count, [property names]) in file order; list
    properties are recorded as a single name prefixed with ``list:``.
    """
    if not lines or lines[0].strip() != "ply":
        raise MeshFormatError("not a PLY file (missing 'ply' magic)")
    elements = []
    i = 1
    saw_format = False
    while i < len(lines):
        tokens = lines[i].split()
        i += 1
        if not tokens or tokens[0] == "comment":
            continue
        if tokens[0] == "format":
            if tokens[1] != "ascii":
                raise MeshFormatError("only ASCII PLY is supported")
            saw_format = True
        elif tokens[0] == "element":
            elements.append((tokens[1], int(tokens[2]), []))
        elif tokens[0] == "property":
            if not elements:
                raise MeshFormatError("property before any element")
            if tokens[1] == "list":
                elements[-1][2].append("list:" + tokens[-1])
            else:
                elements[-1][2].append(tokens[-1])
        elif tokens[0] == "end_header":
            if not saw_format:
                raise MeshFormatError("PLY header missing format line")
            return elements, i
        else:
            raise MeshFormatError(f"unrecognized PLY header line: {lines[i - 1]!r}")
    raise MeshFormatError("PLY header not terminated by end_header")


def _read_ply(path):
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    elements, body = _parse_ply_header(lines)
    data = {}
    idx = body
    for name, count, props in elements:
        rows = lines[idx:idx + count]
        if len(rows) < count:
            raise MeshFormatError(f"PLY element {name}: expected {count} rows")
        idx += count
        data[name] = (props, rows)
    return data


def read_ply_cloud(path) -> PointCloud:
    """Read an ASCII PLY vertex cloud; picks up nx/ny/nz normals when present."""
    data = _read_ply(path)
    if "vertex" not in data:
        raise MeshFormatError("PLY has no vertex element")
    props, rows = data["vertex"]
    try:
        cols = {p: k for k, p in enumerate(props)}
        values = np.array([[float(v) for v in r.split()] for r in rows]) \
            if rows else np.zeros((0, len(props)))
        points = values[:, [cols["x"], cols["y"], cols["z"]]] if rows else np.zeros((0, 3))
        normals = None
        if all(k in cols for k in ("nx", "ny", "nz")):
            normals = values[:, [cols["nx"], cols["ny"], cols["nz"]]]
    except (KeyError, ValueError, IndexError) as e:
        raise MeshFormatError(f"bad PLY vertex data: {e}") from e
    return PointCloud(points, normals)


def read_ply_mesh(path) -> TriangleMesh:
    """Read an ASCII PLY mesh (vertex + face elements); polygons are fanned."""
    data = _read_ply(path)
    if "vertex" not in data or "face" not in data:
        raise MeshFormatError("PLY mesh needs vertex and face elements")
    vprops, vrows = data["vertex"]
    cols = {p: k for k, p in enumerate(vprops)}
    try:
        values = np.array([[float(v) for v in r.split()] for r in vrows])
        vertices = values[:, [cols["x"], cols["y"], cols["z"]]]
        tris = []
        for r in data["face"][1]:
            t = [int(v) for v in r.split()]
            if t[0] != len(t) - 1 or t[0] < 3:
                raise MeshFormatError(f"bad face row: {r!r}")
            for k in range(1, t[0] - 1):
                tris.append((t[1], t[1 + k], t[2 + k]))
    except (KeyError, ValueError, IndexError) as e:
        raise MeshFormatError(f"bad PLY mesh data: {e}") from e
    return TriangleMesh(vertices, np.array(tris, dtype=np.int64))


def write_ply_cloud(path, cloud: PointCloud):
    """Write an ASCII PLY 1.0 cloud with LF line endings (deterministic bytes)."""
    has_n = cloud.normals is not None
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("ply\nformat ascii 1.0\n")
        f.write(f"element vertex {len(cloud)}\n")
        f.write("property float x\nproperty float y\nproperty float z\n")
        if has_n:
            f.write("property float nx\nproperty float ny\nproperty float nz\n")
        f.write("end_header\n")
        for i in range(len(cloud)):
            p = cloud.points[i]
            row = f"{p[0]:.6f} {p[1]:.6f} {p[2]:.6f}"
            if has_n:
                n = cloud.normals[i]
                row += f" {n[0]:.6f} {n[1]:.6f} {n[2]:.6f}"
            f.write(row + "\n")


def read_stl_ascii(path) -> TriangleMesh:
    """Read an ASCII STL solid into an indexed mesh (exact-duplicate welding)."""
    verts = []
    vert_index = {}
    tris = []
    pending = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            tokens = line.split()
            if not tokens:
                continue
            if tokens[0] == "vertex":
                if len(tokens) != 4:
                    raise MeshFormatError(f"bad STL vertex line: {line!r}")
                try:
                    key = (float(tokens[1]), float(tokens[2]), float(tokens[3]))
                except ValueError as e:
                    raise MeshFormatError(f"bad STL vertex line: {line!r}") from e
                if key not in vert_index:
                    vert_index[key] = len(verts)
                    verts.append(key)
                pending.append(vert_index[key])
            elif tokens[0] == "endfacet":
                if len(pending) != 3:
                    raise MeshFormatError("STL facet without exactly 3 vertices")
                tris.append(tuple(pending))
                pending = []
    if not tris:
        raise MeshFormatError("STL file contains no facets")
    return TriangleMesh(np.array(verts), np.array(tris, dtype=np.int64))


def load_mesh(path) -> TriangleMesh:
    p = str(path).lower()
    if p.endswith(".stl"):
        return read_stl_ascii(path)
    if p.endswith(".ply"):
        return read_ply_mesh(path)
    raise MeshFormatError(f"unsupported mesh format: {path}")
