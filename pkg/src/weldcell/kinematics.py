"""Forward/inverse kinematics for a 6-DOF serial arm with a torch tool offset.

The chain is described by classic Denavit-Hartenberg rows; joint angles are
radians and the tool transform maps the flange to the torch tip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import JointLimitStuckError, NoConvergenceError
from .geometry import RigidTransform, quat_conjugate, quat_multiply

N_JOINTS = 6


@dataclass(frozen=True)
class KinematicChain:
    """Six DH rows (a, alpha, d, theta_offset), joint limits, tool transform."""

    a: np.ndarray
    alpha: np.ndarray
    d: np.ndarray
    theta_offset: np.ndarray
    limits_lo: np.ndarray
    limits_hi: np.ndarray
    tool: RigidTransform = field(default_factory=RigidTransform.identity)

    def __post_init__(self):
        for name in ("a", "alpha", "d", "theta_offset", "limits_lo", "limits_hi"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (N_JOINTS,):
                raise ValueError(f"{name} must have shape ({N_JOINTS},)")
            object.__setattr__(self, name, arr)
        if np.any(self.limits_lo >= self.limits_hi):
            raise ValueError("every joint needs lo < hi")

    @staticmethod
    def from_rows(rows, limits, tool=None) -> "KinematicChain":
        """Build from six (a, alpha, d, theta_offset) rows and (lo, hi) limits."""
        rows = np.asarray(rows, dtype=float)
        limits = np.asarray(limits, dtype=float)
        if rows.shape != (N_JOINTS, 4) or limits.shape != (N_JOINTS, 2):
            raise ValueError("expected 6x4 DH rows and 6x2 limits")
        return KinematicChain(rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3],
                              limits[:, 0], limits[:, 1],
                              tool if tool is not None else RigidTransform.identity())

    def clamp(self, q) -> np.ndarray:
        return np.clip(q, self.limits_lo, self.limits_hi)

    def within_limits(self, q, tol: float = 1e-9) -> bool:
        q = np.asarray(q, dtype=float)
        return bool(np.all(q >= self.limits_lo - tol) and np.all(q <= self.limits_hi + tol))


def example_chain() -> KinematicChain:
    """A documented industrial-scale 6R arm with a welding-torch tool.

    Link proportions (450/600/620 mm majors) match a mid-size manipulator;
    the torch tip sits 160 mm out of the flange, pitched 30 degrees so the
    wire points ahead of the wrist.
    """
    rows = [
        (150.0, -math.pi / 2, 450.0, 0.0),
        (600.0, 0.0, 0.0, -math.pi / 2),
        (120.0, -math.pi / 2, 0.0, 0.0),
        (0.0, math.pi / 2, 620.0, 0.0),
        (0.0, -math.pi / 2, 0.0, 0.0),
        (0.0, 0.0, 90.0, 0.0),
    ]
    limits = np.radians([
        (-165.0, 165.0),
        (-110.0, 110.0),
        (-110.0, 70.0),
        (-160.0, 160.0),
        (-120.0, 120.0),
        (-360.0, 360.0),
    ])
    tool = RigidTransform.from_euler_zyx((0.0, math.radians(30.0), 0.0),
                                         (25.0, 0.0, 150.0))
    return KinematicChain.from_rows(rows, limits, tool)


def dh_matrix(a: float, alpha: float, d: float, theta: float) -> np.ndarray:
    ct, st = math.cos(theta), math.sin(theta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return np.array([
        [ct, -st * ca, st * sa, a * ct],
        [st, ct * ca, -ct * sa, a * st],
        [0.0, sa, ca, d],
        [0.0, 0.0, 0.0, 1.0],
    ])


def fk_frames(chain: KinematicChain, q) -> np.ndarray:
    """Cumulative joint frames: (7, 4, 4) array, frame 0 is the base."""
    q = np.asarray(q, dtype=float)
    frames = np.empty((N_JOINTS + 1, 4, 4))
    frames[0] = np.eye(4)
    for i in range(N_JOINTS):
        a_i = dh_matrix(chain.a[i], chain.alpha[i], chain.d[i],
                        q[i] + chain.theta_offset[i])
        frames[i + 1] = frames[i] @ a_i
    return frames


def fk(chain: KinematicChain, q) -> RigidTransform:
    """Base-to-torch-tip pose for a joint configuration."""
    m = fk_frames(chain, q)[-1] @ chain.tool.matrix()
    return RigidTransform.from_matrix(m)


def fk_frames_batch(chain: KinematicChain, qs: np.ndarray) -> np.ndarray:
    """Vectorized cumulative frames for many configurations: (S, 7, 4, 4)."""
    qs = np.atleast_2d(np.asarray(qs, dtype=float))
    s = qs.shape[0]
    frames = np.empty((s, N_JOINTS + 1, 4, 4))
    frames[:, 0] = np.eye(4)
    for i in range(N_JOINTS):
        theta = qs[:, i] + chain.theta_offset[i]
        ct, st = np.cos(theta), np.sin(theta)
        ca, sa = math.cos(chain.alpha[i]), math.sin(chain.alpha[i])
        a_i = np.zeros((s, 4, 4))
        a_i[:, 0, 0] = ct
        a_i[:, 0, 1] = -st * ca
        a_i[:, 0, 2] = st * sa
        a_i[:, 0, 3] = chain.a[i] * ct
        a_i[:, 1, 0] = st
        a_i[:, 1, 1] = ct * ca
        a_i[:, 1, 2] = -ct * sa
        a_i[:, 1, 3] = chain.a[i] * st
        a_i[:, 2, 1] = sa
        a_i[:, 2, 2] = ca
        a_i[:, 2, 3] = chain.d[i]
        a_i[:, 3, 3] = 1.0
        frames[:, i + 1] = frames[:, i] @ a_i
    return frames


def jacobian(chain: KinematicChain, q) -> np.ndarray:
    """Geometric Jacobian at the torch tip: rows 0-2 linear (mm/rad),
    rows 3-5 angular (rad/rad); column i is the twist of joint i."""
    frames = fk_frames(chain, q)
    tip = (frames[-1] @ chain.tool.matrix())[:3, 3]
    jac = np.empty((6, N_JOINTS))
    for i in range(N_JOINTS):
        z = frames[i][:3, 2]
        o = frames[i][:3, 3]
        jac[:3, i] = np.cross(z, tip - o)
        jac[3:, i] = z
    return jac


def pose_error(current: RigidTransform, target: RigidTransform) -> np.ndarray:
    """6-vector pose error: translation difference (mm) stacked with the
    axis-angle of the rotation taking current to target (rad)."""
    dp = target.translation - current.translation
    q_err = quat_multiply(target.rotation, quat_conjugate(current.rotation))
    if q_err[0] < 0:
        q_err = -q_err
    w = min(1.0, q_err[0])
    angle = 2.0 * math.acos(w)
    s = math.sqrt(max(0.0, 1.0 - w * w))
    axis = q_err[1:] / s if s > 1e-12 else np.zeros(3)
    return np.concatenate([dp, axis * angle])


@dataclass(frozen=True)
class IkParams:
    """Iterative IK settings; method is 'pseudo_inverse' or 'dls'."""

    method: str = "dls"
    damping: float = 0.05
    max_iterations: int = 200
    pos_tol: float = 0.5
    rot_tol: float = 1e-3
    step_clamp: float = 0.2

    def __post_init__(self):
        if self.method not in ("pseudo_inverse", "dls"):
            raise ValueError("method must be 'pseudo_inverse' or 'dls'")
        if self.method == "dls" and self.damping <= 0:
            raise ValueError("DLS damping must be positive")
        if self.pos_tol <= 0 or self.rot_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class IkSolution:
    q: np.ndarray
    iterations: int
    position_error: float
    orientation_error: float
    # one (error_norm, raw_step_norm) pair per iteration, before clamping
    steps: list = field(default_factory=list)


def ik(chain: KinematicChain, target: RigidTransform, seed,
       params: IkParams = IkParams()) -> IkSolution:
    """Iterative inverse kinematics from a seed configuration.

    Raises NoConvergenceError with the best residual when the iteration budget
    runs out, and JointLimitStuckError when limit clamping freezes progress.
    """
    q = chain.clamp(np.asarray(seed, dtype=float))
    steps: list[tuple[float, float]] = []
    best = (math.inf, math.inf)
    stalled = 0
    for it in range(params.max_iterations + 1):
        pose = fk(chain, q)
        err = pose_error(pose, target)
        pos_err = float(np.linalg.norm(err[:3]))
        rot_err = float(np.linalg.norm(err[3:]))
        best = min(best, (pos_err, rot_err))
        if pos_err <= params.pos_tol and rot_err <= params.rot_tol:
            return IkSolution(q, it, pos_err, rot_err, steps)
        if it == params.max_iterations:
            break
        jac = jacobian(chain, q)
        if params.method == "pseudo_inverse":
            dq = np.linalg.pinv(jac) @ err
        else:
            lam2 = params.damping ** 2
            dq = jac.T @ np.linalg.solve(jac @ jac.T + lam2 * np.eye(6), err)
        raw_norm = float(np.linalg.norm(dq))
        steps.append((float(np.linalg.norm(err)), raw_norm))
        peak = float(np.abs(dq).max())
        if peak > params.step_clamp:
            dq = dq * (params.step_clamp / peak)
        q_next = chain.clamp(q + dq)
        if float(np.abs(q_next - q).max()) < 1e-12:
            at_limit = (np.isclose(q, chain.limits_lo) | np.isclose(q, chain.limits_hi))
            stalled += 1
            if stalled >= 3 and bool(at_limit.any()):
                raise JointLimitStuckError(
                    f"IK pinned at joint limits with residual {pos_err:.3f} mm")
        else:
            stalled = 0
        q = q_next
    raise NoConvergenceError(
        f"IK did not converge within {params.max_iterations} iterations "
        f"(best residual {best[0]:.4f} mm / {best[1]:.6f} rad)",
        best_position_error=best[0], best_orientation_error=best[1])
