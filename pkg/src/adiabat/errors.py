"""Exception taxonomy shared by all adiabat modules."""


class AdiabatError(Exception):
    """Base class for errors raised by this package."""


class ExprSyntaxError(AdiabatError):
    """Malformed expression text. Carries the byte offset of the failure."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnknownFunctionError(ExprSyntaxError):
    """A name other than exp/ln was used as a function."""


class MissingBindingError(AdiabatError):
    """Expression evaluation hit a free name with no bound value."""


class DomainError(AdiabatError):
    """Evaluation outside the mathematical or declared domain."""


class OutOfRangeError(AdiabatError):
    """A root-finding target lies outside its bracketing interval."""


class QuadratureFailureError(AdiabatError):
    """Adaptive quadrature could not reach the requested tolerance."""


class SingularIntegrandError(AdiabatError):
    """The temperature integrand's denominator was non-positive."""


class LeftDomainError(AdiabatError):
    """An integrated curve exited the declared domain. Carries exit coords."""

    def __init__(self, message: str, coords: tuple):
        super().__init__(f"{message} at {coords}")
        self.coords = coords


class StiffnessFailureError(AdiabatError):
    """The ODE integrator failed to advance the adiabat."""


class SignatureMismatchError(AdiabatError):
    """Compound states with different per-space matter content were compared."""


class UnreachableTemperatureError(AdiabatError):
    """A component's adiabat exits its domain before reaching the target temperature."""


class ReferenceNotStrictError(AdiabatError):
    """Reconstruction reference states are not strictly ordered."""


class NonConvergenceError(AdiabatError):
    """Bisection exceeded its iteration cap."""


class NoBracketError(AdiabatError):
    """A 1-parameter search never crossed the equivalence it was bracketing."""


class DisconnectedGraphError(AdiabatError):
    """The calibration quad graph does not span all requested spaces."""


class InconsistentQuadsError(AdiabatError):
    """Redundant calibration quads disagree beyond tolerance. Names the cycle."""

    def __init__(self, message: str, cycle: tuple):
        super().__init__(f"{message}; cycle {' -> '.join(cycle)}")
        self.cycle = cycle


class InfeasibleError(AdiabatError):
    """The additive-constant difference system has a negative cycle."""

    def __init__(self, message: str, cycle: tuple):
        super().__init__(f"{message}; cycle {' -> '.join(cycle)}")
        self.cycle = cycle


class NegativeCycleWarning(UserWarning):
    """A process graph contains a cycle with negative total entropy jump."""
