"""Exception hierarchy shared across the package."""


class WeldcellError(Exception):
    """Base class for all package errors."""


class MeshFormatError(WeldcellError):
    """A mesh or cloud file could not be parsed."""


class EmptyCloudError(WeldcellError):
    """An operation produced or received a cloud with no usable points."""


class NoCorrespondencesError(WeldcellError):
    """An ICP round matched fewer point pairs than the minimum required."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class IkError(WeldcellError):
    """Base class for inverse-kinematics failures."""


class NoConvergenceError(IkError):
    """IK ran out of iterations; carries the best residual seen."""

    def __init__(self, message, best_position_error, best_orientation_error):
        super().__init__(message)
        self.best_position_error = best_position_error
        self.best_orientation_error = best_orientation_error


class JointLimitStuckError(IkError):
    """IK stalled with one or more joints pinned at their limits."""


class PlanningError(WeldcellError):
    """Base class for planner failures."""


class InvalidEndpointError(PlanningError):
    """A plan request's start or goal configuration is not collision-free."""


class PlannerTimeoutError(PlanningError):
    """The iteration budget ran out before a path was found."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats


class DisconnectedError(PlanningError):
    """Roadmap start and goal ended up in different graph components."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats


class ConfigError(WeldcellError):
    """The workcell configuration file is missing, malformed, or inconsistent."""
