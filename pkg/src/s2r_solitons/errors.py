"""Exception hierarchy shared by all modules."""


class SolitonError(Exception):
    """Base class for errors raised by this package."""


class UsageError(SolitonError, ValueError):
    """Invalid arguments or inconsistent inputs."""


class RegularityError(SolitonError, ValueError):
    """A chart or state left the regular domain |u| < pi/2."""


class PoleError(SolitonError, ValueError):
    """Stereographic projection evaluated at (or too close to) the pole z = 1."""


class IntegrationError(SolitonError, RuntimeError):
    """The ODE solver failed for a reason other than reaching the domain boundary."""


class ExportError(SolitonError, OSError):
    """Writing or reading an output file failed."""
