"""Path-quality evaluation: goal-divergence cost functions and integral cost.

The quality of a joint-space path is judged by how far the torch tip strays
from the goal pose along the way: a position divergence in mm, an orientation
divergence as a quaternion-difference norm, and the integral of either cost
over the path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import RigidTransform, euler_zyx_from_quat, quat_identity
from .kinematics import KinematicChain, fk
from .planners import Path


@dataclass(frozen=True)
class GoalSpec:
    """Torch-tip goal: position (mm) and orientation (unit quaternion)."""

    position: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "orientation",
                           np.asarray(self.orientation, dtype=float))
        n = np.linalg.norm(self.orientation)
        if abs(n - 1.0) > 1e-6:
            raise ValueError("goal orientation must be a unit quaternion")

    @staticmethod
    def from_pose(pose: RigidTransform) -> "GoalSpec":
        return GoalSpec(pose.translation.copy(), pose.rotation.copy())


def quaternion_divergence(q_a, q_b) -> float:
    """min(|q_a - q_b|, |q_a + q_b|): the sign-ambiguity-free 4-vector gap."""
    q_a = np.asarray(q_a, dtype=float)
    q_b = np.asarray(q_b, dtype=float)
    return float(min(np.linalg.norm(q_a - q_b), np.linalg.norm(q_a + q_b)))


def c_pos(chain: KinematicChain, q, goal: GoalSpec) -> float:
    """Distance (mm) from the torch tip at ``q`` to the goal position."""
    return float(np.linalg.norm(fk(chain, q).translation - goal.position))


def c_orient(chain: KinematicChain, q, goal: GoalSpec,
             euler_variant: bool = False) -> float:
    """Orientation divergence of the torch tip at ``q`` from the goal.

    Default is the quaternion 4-vector form, which is convention-free and
    bounded by sqrt(2).  ``euler_variant`` switches to the norm of the Z-Y-X
    Euler angle difference for comparison studies.
    """
    pose = fk(chain, q)
    if euler_variant:
        e_cur, _ = euler_zyx_from_quat(pose.rotation)
        e_goal, _ = euler_zyx_from_quat(goal.orientation)
        return float(np.linalg.norm(e_cur - e_goal))
    return quaternion_divergence(pose.rotation, goal.orientation)


def make_goal_divergence_cost(chain: KinematicChain, goal: GoalSpec,
                              orient_weight: float = 100.0):
    """Configuration cost c(q) = c_pos + w * c_orient used to drive planners."""
    def cost(q) -> float:
        pose = fk(chain, q)
        pos = float(np.linalg.norm(pose.translation - goal.position))
        ori = quaternion_divergence(pose.rotation, goal.orientation)
        return pos + orient_weight * ori
    return cost


def path_length(path: Path) -> float:
    """Joint-space arc length (rad): sum of segment norms."""
    return path.length()


def sample_path(path: Path, n: int) -> np.ndarray:
    """Configurations at arc-length fractions k/n for k = 1..n.

    Piecewise-linear interpolation in joint space; for a zero-length path all
    samples coincide with the single configuration.
    """
    if n < 1:
        raise ValueError("need at least one subdivision")
    wp = path.waypoints
    if len(wp) == 1:
        return np.repeat(wp, n, axis=0)
    seg = np.linalg.norm(np.diff(wp, axis=0), axis=1)
    total = float(seg.sum())
    if total == 0.0:
        return np.repeat(wp[:1], n, axis=0)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = total * np.arange(1, n + 1) / n
    out = np.empty((n, wp.shape[1]))
    for i, s in enumerate(targets):
        j = int(np.searchsorted(cum, s, side="left"))
        j = min(max(j, 1), len(wp) - 1)
        denom = seg[j - 1]
        t = (s - cum[j - 1]) / denom if denom > 0 else 0.0
        out[i] = wp[j - 1] + t * (wp[j] - wp[j - 1])
    return out


def integral_cost(chain: KinematicChain, path: Path, cost_fn, n: int = 100) -> float:
    """Discrete integral of a configuration cost along a path:
    (L / n) * sum of the cost at the n arc-length samples.

    A zero-length path integrates to zero.
    """
    length = path.length()
    if length == 0.0:
        return 0.0
    samples = sample_path(path, n)
    return length / n * float(sum(cost_fn(samples[i]) for i in range(n)))


@dataclass
class CostReport:
    """Per-path evaluation: waypoint costs, sample traces, and both integrals."""

    waypoint_c_pos: np.ndarray
    waypoint_c_orient: np.ndarray
    length: float
    subdivisions: int
    ic_pos: float
    ic_orient: float
    trace_params: np.ndarray  # arc-length fractions k/n
    trace_c_pos: np.ndarray
    trace_c_orient: np.ndarray


def evaluate_path(chain: KinematicChain, path: Path, goal: GoalSpec,
                  n: int = 100) -> CostReport:
    """Both integral costs plus the cost-versus-path-parameter traces."""
    wp = path.waypoints
    wp_pos = np.array([c_pos(chain, q, goal) for q in wp])
    wp_ori = np.array([c_orient(chain, q, goal) for q in wp])
    ic_p = integral_cost(chain, path, lambda q: c_pos(chain, q, goal), n)
    ic_o = integral_cost(chain, path, lambda q: c_orient(chain, q, goal), n)
    samples = sample_path(path, n)
    tr_pos = np.array([c_pos(chain, q, goal) for q in samples])
    tr_ori = np.array([c_orient(chain, q, goal) for q in samples])
    return CostReport(
        waypoint_c_pos=wp_pos, waypoint_c_orient=wp_ori,
        length=path.length(), subdivisions=n, ic_pos=ic_p, ic_orient=ic_o,
        trace_params=np.arange(1, n + 1) / n,
        trace_c_pos=tr_pos, trace_c_orient=tr_ori)
