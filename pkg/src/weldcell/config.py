"""Workcell configuration: defaults, YAML loading, validation.

The built-in defaults describe the benchmark workcell used throughout the
test suite; a YAML file with the same section names can override any subset.
Angles are degrees and lengths millimetres in the file, converted to radians
and millimetres here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path as FilePath

import numpy as np
import yaml

from .errors import ConfigError


def _deg(x):
    return math.radians(float(x))


@dataclass
class ChainConfig:
    # a (mm), alpha (deg), d (mm), theta_offset (deg)
    dh_rows: list = field(default_factory=lambda: [
        [150.0, -90.0, 450.0, 0.0],
        [600.0, 0.0, 0.0, -90.0],
        [120.0, -90.0, 0.0, 0.0],
        [0.0, 90.0, 620.0, 0.0],
        [0.0, -90.0, 0.0, 0.0],
        [0.0, 0.0, 90.0, 0.0],
    ])
    limits_deg: list = field(default_factory=lambda: [
        [-165.0, 165.0], [-110.0, 110.0], [-110.0, 70.0],
        [-160.0, 160.0], [-120.0, 120.0], [-360.0, 360.0],
    ])
    tool_translation: list = field(default_factory=lambda: [25.0, 0.0, 150.0])
    tool_euler_zyx_deg: list = field(default_factory=lambda: [0.0, 30.0, 0.0])
    home_deg: list = field(default_factory=lambda: [0.0, -30.0, 25.0, 0.0, 50.0, 0.0])
    link_radii: list = field(default_factory=lambda: [110.0, 90.0, 75.0, 65.0, 0.0, 45.0])
    link_trim: float = 0.12
    torch_radius: float = 22.0


@dataclass
class BraceConfig:
    radius: float = 45.0
    length: float = 340.0
    elevation_deg: float = 26.0
    azimuth_deg: float = 180.0
    z_offset: float = 150.0


@dataclass
class WorkpieceConfig:
    chord_radius: float = 80.0
    chord_length: float = 600.0
    segments: int = 48
    braces: list = field(default_factory=lambda: [
        BraceConfig(45.0, 340.0, 26.0, 180.0, 150.0),
        BraceConfig(45.0, 340.0, -20.0, 180.0, -100.0),
    ])
    translation: list = field(default_factory=lambda: [950.0, 0.0, 700.0])
    euler_zyx_deg: list = field(default_factory=lambda: [0.0, 0.0, 0.0])


@dataclass
class FixtureConfig:
    # box clamps in the workpiece frame
    center: list = field(default_factory=lambda: [0.0, 170.0, -220.0])
    half_extents: list = field(default_factory=lambda: [30.0, 25.0, 45.0])


@dataclass
class BenchConfig:
    center: list = field(default_factory=lambda: [950.0, 0.0, 200.0])
    half_extents: list = field(default_factory=lambda: [350.0, 450.0, 200.0])


@dataclass
class RigConfig:
    views: int = 60
    width: int = 160
    height: int = 160
    fov_deg: float = 60.0
    radius_scale: float = 3.0
    elevation_deg: float = 35.0  # ring rigs only


@dataclass
class PerceptionConfig:
    cad_rig: RigConfig = field(default_factory=lambda: RigConfig(views=60, width=160, height=160))
    sensor_rig: RigConfig = field(default_factory=lambda: RigConfig(views=2, width=512, height=512))
    cad_voxel: float = 5.0
    noise_sigma: float = 2.0
    segmentation_margin: float = 150.0
    don_r1: float = 12.0
    don_r2: float = 50.0
    don_threshold: float = 0.1
    icp_max_iterations: int = 60
    icp_cutoff: float = 100.0
    icp_epsilon: float = 1e-4
    icp_bootstrap: bool = True
    sweep_max_iterations: int = 10
    sweep_bootstrap: bool = False
    sweep_steps: int = 7
    sweep_max_translation: float = 600.0
    sweep_max_yaw_deg: float = 18.0


@dataclass
class PlannerConfig:
    step: float = 0.1
    goal_bias: float = 0.05
    budget_s: float = 2.0
    iteration_rate: float = 1500.0
    resolution: float = 0.03
    orient_weight: float = 100.0
    constant_cost: bool = False  # True reduces the transition test to always-accept
    t_rate: float = 2.0
    nfail_max: int = 10
    t_init_factor: float = 1e-4
    rrt_gamma: float = 2.0
    lbt_eps: float = 0.4


@dataclass
class CostConfig:
    subdivisions: int = 100
    consistency_bound: float = 0.3  # bench IC coefficient-of-variation bound


@dataclass
class GoalConfig:
    translation: list = field(default_factory=lambda: [820.0, -60.0, 890.0])
    euler_zyx_deg: list = field(default_factory=lambda: [0.0, 120.0, 0.0])


@dataclass
class WorkcellConfig:
    seed: int = 20260811
    trials: int = 15
    chain: ChainConfig = field(default_factory=ChainConfig)
    workpiece: WorkpieceConfig = field(default_factory=WorkpieceConfig)
    fixtures: list = field(default_factory=lambda: [
        FixtureConfig([0.0, 170.0, -220.0], [30.0, 25.0, 45.0]),
        FixtureConfig([0.0, -170.0, -220.0], [30.0, 25.0, 45.0]),
    ])
    bench: BenchConfig = field(default_factory=BenchConfig)
    perception: PerceptionConfig = field(default_factory=PerceptionConfig)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    cost: CostConfig = field(default_factory=CostConfig)
    margin: float = 10.0
    goals: dict = field(default_factory=lambda: {
        "goal1": GoalConfig([820.0, -60.0, 890.0], [0.0, 120.0, 0.0]),
        "goal2": GoalConfig([820.0, 60.0, 560.0], [0.0, 60.0, 0.0]),
    })

    def validate(self):
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if len(self.goals) < 1:
            raise ConfigError("at least one goal pose is required")
        rows = np.asarray(self.chain.dh_rows, dtype=float)
        lims = np.asarray(self.chain.limits_deg, dtype=float)
        if rows.shape != (6, 4) or lims.shape != (6, 2):
            raise ConfigError("chain needs 6 DH rows and 6 limit pairs")
        if np.any(lims[:, 0] >= lims[:, 1]):
            raise ConfigError("joint limits need lo < hi")
        p = self.perception
        if not (0 < p.don_r1 < p.don_r2):
            raise ConfigError("DoN radii need 0 < r1 < r2")
        if not (0 <= p.don_threshold <= 1):
            raise ConfigError("DoN threshold must lie in [0, 1]")
        if self.workpiece.chord_radius <= 0 or self.workpiece.chord_length <= 0:
            raise ConfigError("workpiece dimensions must be positive")
        if self.planner.budget_s <= 0 or self.planner.step <= 0:
            raise ConfigError("planner budget and step must be positive")
        if self.margin < 0:
            raise ConfigError("safety margin cannot be negative")
        return self


def default_config() -> WorkcellConfig:
    return WorkcellConfig().validate()


def _update_dataclass(obj, data: dict, context: str):
    for key, value in data.items():
        if not hasattr(obj, key):
            raise ConfigError(f"unknown key {key!r} in {context}")
        current = getattr(obj, key)
        if isinstance(current, (ChainConfig, WorkpieceConfig, BenchConfig,
                                PerceptionConfig, PlannerConfig, CostConfig,
                                RigConfig)):
            if not isinstance(value, dict):
                raise ConfigError(f"{context}.{key} must be a mapping")
            _update_dataclass(current, value, f"{context}.{key}")
        else:
            setattr(obj, key, value)


def _parse_braces(items):
    braces = []
    for it in items:
        b = BraceConfig()
        _update_dataclass(b, it, "workpiece.braces[]")
        braces.append(b)
    return braces


def load_config(path) -> WorkcellConfig:
    """Load a YAML workcell file, overriding the built-in defaults."""
    path = FilePath(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML in {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    cfg = WorkcellConfig()
    braces = data.get("workpiece", {}).pop("braces", None) if isinstance(
        data.get("workpiece"), dict) else None
    fixtures = data.pop("fixtures", None)
    goals = data.pop("goals", None)
    _update_dataclass(cfg, data, "config")
    if braces is not None:
        cfg.workpiece.braces = _parse_braces(braces)
    if fixtures is not None:
        parsed = []
        for it in fixtures:
            fx = FixtureConfig()
            _update_dataclass(fx, it, "fixtures[]")
            parsed.append(fx)
        cfg.fixtures = parsed
    if goals is not None:
        parsed_goals = {}
        for name, it in goals.items():
            g = GoalConfig()
            _update_dataclass(g, it, f"goals.{name}")
            parsed_goals[name] = g
        cfg.goals = parsed_goals
    return cfg.validate()
