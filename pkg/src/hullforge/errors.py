"""Exception types raised across the package."""


class HullforgeError(Exception):
    """Base class for all package errors."""


class PointInsideBody(HullforgeError):
    pass


class NonConvergence(HullforgeError):
    pass


class Unbounded(HullforgeError):
    """The linear program has no finite optimum in the requested direction."""


class Infeasible(HullforgeError):
    pass


class Unsupported(HullforgeError):
    pass


class DegenerateHull(HullforgeError):
    """Vertex set does not contain the origin in the interior of its hull."""


class FormatError(HullforgeError):
    pass


class InvalidRegime(HullforgeError):
    """Bound requested outside the hypothesis under which it holds."""


class NetTooCoarse(HullforgeError):
    pass


class BodyNotInUnitBall(HullforgeError):
    pass


class DegenerateFit(HullforgeError):
    pass
