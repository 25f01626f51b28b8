"""Assemble the benchmark workcell from a configuration: chain, meshes,
synthetic clouds, collision scene, and goal configurations."""

from __future__ import annotations

import math

import numpy as np

from .config import WorkcellConfig
from .cost import GoalSpec, make_goal_divergence_cost
from .errors import ConfigError
from .geometry import (Aabb, PointCloud, RigidTransform, TriangleMesh, apply,
                       merge_meshes)
from .kinematics import IkParams, KinematicChain, ik
from .meshes import box_mesh, brace_pose, cylinder_mesh, tubular_joint_mesh
from .perception import (VirtualCameraRig, add_noise, downsample_voxel,
                         icosahedron_rig, raytrace_cloud, ring_rig,
                         segment_box)
from .planners import MotionCheckParams, PlanRequest, TransitionParams
from .scene import Box, Capsule, Cylinder, LinkProxy, Scene


# ---------------------------------------------------------------------------
# robot
# ---------------------------------------------------------------------------

def build_chain(cfg: WorkcellConfig) -> KinematicChain:
    rows = np.asarray(cfg.chain.dh_rows, dtype=float)
    rows = rows.copy()
    rows[:, 1] = np.radians(rows[:, 1])
    rows[:, 3] = np.radians(rows[:, 3])
    limits = np.radians(np.asarray(cfg.chain.limits_deg, dtype=float))
    tool = RigidTransform.from_euler_zyx(
        np.radians(cfg.chain.tool_euler_zyx_deg), cfg.chain.tool_translation)
    return KinematicChain.from_rows(rows, limits, tool)


def home_config(cfg: WorkcellConfig) -> np.ndarray:
    return np.radians(np.asarray(cfg.chain.home_deg, dtype=float))


def link_proxies(cfg: WorkcellConfig, chain: KinematicChain) -> list:
    """Capsules spanning each link body between consecutive joint origins.

    In frame i the previous origin sits at (-a, -d sin(alpha), -d cos(alpha)),
    independent of the joint angle, so one capsule per frame covers the link;
    ends are trimmed so neighboring guards do not graze at shared origins.
    The torch gets its own slim capsule out to the tool tip.
    """
    proxies = []
    trim = cfg.chain.link_trim
    for i in range(6):
        r = float(cfg.chain.link_radii[i])
        if r <= 0:
            continue
        back = -np.array([chain.a[i],
                          chain.d[i] * math.sin(chain.alpha[i]),
                          chain.d[i] * math.cos(chain.alpha[i])])
        if np.linalg.norm(back) < 1e-9:
            continue
        a = trim * back
        b = (1.0 - trim) * back
        proxies.append(LinkProxy(i + 1, Capsule(a, b, r)))
    tip = chain.tool.translation
    if np.linalg.norm(tip) > 1e-9 and cfg.chain.torch_radius > 0:
        proxies.append(LinkProxy(6, Capsule(np.zeros(3), tip, cfg.chain.torch_radius)))
    return proxies


# ---------------------------------------------------------------------------
# workpiece and fixtures
# ---------------------------------------------------------------------------

def workpiece_pose(cfg: WorkcellConfig) -> RigidTransform:
    return RigidTransform.from_euler_zyx(
        np.radians(cfg.workpiece.euler_zyx_deg), cfg.workpiece.translation)


def _brace_dicts(cfg: WorkcellConfig) -> list:
    return [{
        "radius": b.radius, "length": b.length,
        "elevation": math.radians(b.elevation_deg),
        "azimuth": math.radians(b.azimuth_deg),
        "z_offset": b.z_offset,
    } for b in cfg.workpiece.braces]


def joint_mesh_local(cfg: WorkcellConfig) -> TriangleMesh:
    """The tubular joint in its own frame (chord axis = z, centered)."""
    return tubular_joint_mesh(cfg.workpiece.chord_radius,
                              cfg.workpiece.chord_length,
                              _brace_dicts(cfg), cfg.workpiece.segments)


def fixture_meshes_local(cfg: WorkcellConfig) -> list:
    out = []
    for fx in cfg.fixtures:
        pose = RigidTransform.from_translation(fx.center)
        out.append(box_mesh(fx.half_extents, pose))
    return out


def sensor_mesh_local(cfg: WorkcellConfig) -> TriangleMesh:
    """What the depth sensors see: the joint plus its clamping fixtures."""
    return merge_meshes([joint_mesh_local(cfg)] + fixture_meshes_local(cfg))


# ---------------------------------------------------------------------------
# synthetic clouds
# ---------------------------------------------------------------------------

def _rig_for(cfg_rig, mesh: TriangleMesh) -> VirtualCameraRig:
    radius = cfg_rig.radius_scale * mesh.bounding_radius()
    fov = math.radians(cfg_rig.fov_deg)
    if cfg_rig.views == 60:
        return icosahedron_rig(radius, cfg_rig.width, cfg_rig.height, fov)
    azimuths = [k * 2.0 * math.pi / cfg_rig.views for k in range(cfg_rig.views)]
    # perpendicular pair for the two-sensor setup, evenly spread otherwise
    if cfg_rig.views == 2:
        azimuths = [math.pi, math.pi / 2.0]
    return ring_rig(radius, azimuths, math.radians(cfg_rig.elevation_deg),
                    cfg_rig.width, cfg_rig.height, fov)


def cad_cloud(cfg: WorkcellConfig) -> PointCloud:
    """Reference cloud of the joint at its nominal pose (fixture-free)."""
    mesh = joint_mesh_local(cfg)
    rig = _rig_for(cfg.perception.cad_rig, mesh)
    cloud = raytrace_cloud(mesh, rig)
    cloud = downsample_voxel(cloud, cfg.perception.cad_voxel)
    return apply(workpiece_pose(cfg), cloud)


def sensor_cloud(cfg: WorkcellConfig, rng: np.random.Generator,
                 offset: RigidTransform | None = None,
                 noise_sigma: float | None = None) -> PointCloud:
    """Sensor-style cloud: joint plus fixtures, posed, offset, and noisy.

    ``offset`` displaces the workpiece in the world frame relative to nominal,
    standing in for the real workpiece misplacement the registration stage
    must recover.
    """
    mesh = sensor_mesh_local(cfg)
    rig = _rig_for(cfg.perception.sensor_rig, mesh)
    cloud = raytrace_cloud(mesh, rig)
    world = apply(workpiece_pose(cfg), cloud)
    if offset is not None:
        world = apply(offset, world)
    sigma = cfg.perception.noise_sigma if noise_sigma is None else noise_sigma
    if sigma > 0:
        world = add_noise(world, sigma, rng)
    return world


def segmentation_box(cfg: WorkcellConfig) -> Aabb:
    """Cartesian crop retaining the joint: nominal extent plus margin, floored
    just above the workbench top (benches are pre-aligned)."""
    mesh = joint_mesh_local(cfg).transformed(workpiece_pose(cfg))
    box = mesh.aabb()
    m = cfg.perception.segmentation_margin
    lo = box.lo - m
    hi = box.hi + m
    bench_top = cfg.bench.center[2] + cfg.bench.half_extents[2]
    lo[2] = max(lo[2], bench_top + 10.0)
    return Aabb(lo, hi)


# ---------------------------------------------------------------------------
# collision scene
# ---------------------------------------------------------------------------

def build_scene(cfg: WorkcellConfig, chain: KinematicChain) -> Scene:
    bench = Box(RigidTransform.from_translation(cfg.bench.center),
                cfg.bench.half_extents)
    pose = workpiece_pose(cfg)
    wp = [("chord", Cylinder(pose, cfg.workpiece.chord_radius,
                             0.5 * cfg.workpiece.chord_length))]
    for k, b in enumerate(_brace_dicts(cfg)):
        local = brace_pose(b["elevation"], b["azimuth"], b["z_offset"], b["length"])
        wp.append((f"brace{k + 1}", Cylinder(pose.compose(local),
                                             b["radius"], 0.5 * b["length"])))
    for k, fx in enumerate(cfg.fixtures):
        local = RigidTransform.from_translation(fx.center)
        wp.append((f"fixture{k + 1}", Box(pose.compose(local), fx.half_extents)))
    return Scene(
        static_obstacles=(("bench", bench),),
        workpiece_obstacles=tuple(wp),
        link_proxies=tuple(link_proxies(cfg, chain)),
        margin=cfg.margin,
    )


# ---------------------------------------------------------------------------
# goals and plan requests
# ---------------------------------------------------------------------------

def goal_specs(cfg: WorkcellConfig) -> dict:
    out = {}
    for name, g in cfg.goals.items():
        pose = RigidTransform.from_euler_zyx(np.radians(g.euler_zyx_deg),
                                             g.translation)
        out[name] = GoalSpec.from_pose(pose)
    return out


def goal_configs(cfg: WorkcellConfig, chain: KinematicChain,
                 scene: Scene) -> dict:
    """One collision-free joint configuration per goal pose, solved by IK
    seeded from the home configuration."""
    from .scene import in_collision
    home = home_config(cfg)
    specs = goal_specs(cfg)
    out = {}
    for name in sorted(specs):
        g = specs[name]
        pose = RigidTransform(g.orientation, g.position)
        sol = ik(chain, pose, home, IkParams())
        hit, pairs = in_collision(scene, chain, sol.q)
        if hit:
            raise ConfigError(f"goal {name}: IK solution collides: {pairs}")
        out[name] = sol.q
    return out


def plan_endpoints(cfg: WorkcellConfig, chain: KinematicChain, scene: Scene,
                   goal_name: str):
    """Start/goal configurations for a goal: the first goal starts at home,
    each later goal starts at the previous goal's configuration."""
    configs = goal_configs(cfg, chain, scene)
    names = sorted(configs)
    if goal_name not in configs:
        raise ConfigError(f"unknown goal {goal_name!r}; have {names}")
    pos = names.index(goal_name)
    start = home_config(cfg) if pos == 0 else configs[names[pos - 1]]
    return start, configs[goal_name], goal_specs(cfg)[goal_name]


def make_request(cfg: WorkcellConfig, chain: KinematicChain, start, goal,
                 goal_spec: GoalSpec, seed: int) -> PlanRequest:
    cost_fn = None if cfg.planner.constant_cost else \
        make_goal_divergence_cost(chain, goal_spec, cfg.planner.orient_weight)
    return PlanRequest(start=start, goal=goal, cost_fn=cost_fn,
                       budget_s=cfg.planner.budget_s, seed=seed,
                       step=cfg.planner.step, goal_bias=cfg.planner.goal_bias,
                       iteration_rate=cfg.planner.iteration_rate)


def motion_params(cfg: WorkcellConfig) -> MotionCheckParams:
    return MotionCheckParams(cfg.planner.resolution)


def transition_params(cfg: WorkcellConfig) -> TransitionParams:
    return TransitionParams(t_rate=cfg.planner.t_rate,
                            nfail_max=cfg.planner.nfail_max,
                            t_init_factor=cfg.planner.t_init_factor)
