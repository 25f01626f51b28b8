"""Procedural triangle meshes: primitive solids and the tubular-joint workpiece."""

from __future__ import annotations

import math

import numpy as np

from .geometry import RigidTransform, TriangleMesh, merge_meshes


def cylinder_mesh(radius: float, length: float, segments: int = 48,
                  pose: RigidTransform | None = None, capped: bool = True) -> TriangleMesh:
    """Closed cylinder along local z, centered at the local origin."""
    if radius <= 0 or length <= 0 or segments < 3:
        raise ValueError("cylinder needs radius > 0, length > 0, segments >= 3")
    ang = 2.0 * math.pi * np.arange(segments) / segments
    ring = np.column_stack([radius * np.cos(ang), radius * np.sin(ang)])
    h = 0.5 * length
    bottom = np.column_stack([ring, np.full(segments, -h)])
    top = np.column_stack([ring, np.full(segments, h)])
    verts = [bottom, top]
    tris = []
    for i in range(segments):
        j = (i + 1) % segments
        tris.append((i, j, segments + i))
        tris.append((j, segments + j, segments + i))
    if capped:
        verts.append(np.array([[0.0, 0.0, -h], [0.0, 0.0, h]]))
        cb, ct = 2 * segments, 2 * segments + 1
        for i in range(segments):
            j = (i + 1) % segments
            tris.append((cb, j, i))
            tris.append((ct, segments + i, segments + j))
    mesh = TriangleMesh(np.vstack(verts), np.array(tris, dtype=np.int64))
    return mesh.transformed(pose) if pose is not None else mesh


def box_mesh(half_extents, pose: RigidTransform | None = None) -> TriangleMesh:
    hx, hy, hz = np.asarray(half_extents, dtype=float)
    if min(hx, hy, hz) <= 0:
        raise ValueError("box half extents must be positive")
    corners = np.array([[sx * hx, sy * hy, sz * hz]
                        for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)])
    faces = [
        (0, 1, 3), (0, 3, 2),  # -x
        (4, 6, 7), (4, 7, 5),  # +x
        (0, 4, 5), (0, 5, 1),  # -y
        (2, 3, 7), (2, 7, 6),  # +y
        (0, 2, 6), (0, 6, 4),  # -z
        (1, 5, 7), (1, 7, 3),  # +z
    ]
    mesh = TriangleMesh(corners, np.array(faces, dtype=np.int64))
    return mesh.transformed(pose) if pose is not None else mesh


def icosphere_mesh(radius: float, subdivisions: int = 2) -> TriangleMesh:
    """Icosahedron subdivided and projected onto a sphere of the given radius."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=float)
    tris = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [v / np.linalg.norm(v) for v in verts]
    for _ in range(subdivisions):
        cache = {}
        new_tris = []

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        for a, b, c in tris:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_tris += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        tris = new_tris
    return TriangleMesh(radius * np.array(verts), np.array(tris, dtype=np.int64))


def brace_pose(elevation: float, azimuth: float, z_offset: float, length: float) -> RigidTransform:
    """Pose of a brace cylinder whose axis leaves the chord axis at ``z_offset``
    in the direction given by elevation above the x-y plane and azimuth about z."""
    direction = np.array([
        math.cos(elevation) * math.cos(azimuth),
        math.cos(elevation) * math.sin(azimuth),
        math.sin(elevation),
    ])
    # rotate local +z onto the brace direction
    z = np.array([0.0, 0.0, 1.0])
    v = np.cross(z, direction)
    s = np.linalg.norm(v)
    if s < 1e-12:
        rot = RigidTransform.identity().rotation if direction[2] > 0 else \
            RigidTransform.from_axis_angle([1, 0, 0], math.pi).rotation
    else:
        angle = math.atan2(s, float(np.dot(z, direction)))
        rot = RigidTransform.from_axis_angle(v / s, angle).rotation
    center = np.array([0.0, 0.0, z_offset]) + direction * (0.5 * length)
    return RigidTransform(rot, center)


def tubular_joint_mesh(chord_radius: float, chord_length: float, braces,
                       segments: int = 48) -> TriangleMesh:
    """Tubular joint: one vertical chord pipe plus brace pipes rooted on its axis.

    ``braces`` is an iterable of dicts with keys radius, length, elevation,
    azimuth, z_offset (angles in rad, lengths in mm).  Brace cylinders start on
    the chord axis so the overlap region is hidden inside the chord, which is
    how the visible saddle geometry arises from simple cylinders.
    """
    parts = [cylinder_mesh(chord_radius, chord_length, segments)]
    for b in braces:
        pose = brace_pose(b["elevation"], b["azimuth"], b["z_offset"], b["length"])
        parts.append(cylinder_mesh(b["radius"], b["length"], segments, pose))
    return merge_meshes(parts)
