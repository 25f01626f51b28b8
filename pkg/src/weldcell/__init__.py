"""Workcell perception and motion planning for robotic welding of tubular joints.

A library plus CLI covering the desk-scale pipeline: CAD-mesh-to-cloud
synthesis, two-scale normal filtering, ICP registration with robustness
sweeps, 6-DOF kinematics, primitive-based collision checking, five
sampling-based planners, and integral-of-cost path benchmarking.
"""

__version__ = "0.1.0"
