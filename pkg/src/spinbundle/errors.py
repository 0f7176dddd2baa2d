"""Exception and warning types shared across the library."""


class SpinBundleError(Exception):
    """Base class for all library-specific errors."""


class GradientError(SpinBundleError):
    """A gradient evaluation produced a non-finite entry."""

    def __init__(self, label, value):
        self.label = label
        self.value = value
        super().__init__(
            f"non-finite gradient component {value!r} for coordinate {label!r}"
        )


class DomainError(SpinBundleError):
    """Input lies outside the domain of an operation (singular evaluation)."""


class DegenerateConstraintError(SpinBundleError):
    """A second-class bracket matrix is singular or ill-conditioned."""

    def __init__(self, condition_number, message=None):
        self.condition_number = float(condition_number)
        if message is None:
            message = (
                "degenerate constraint bracket matrix, condition number "
                f"{self.condition_number:.3e}"
            )
        super().__init__(message)


class ProjectionError(SpinBundleError):
    """Newton projection onto the constraint surface failed to converge."""

    def __init__(self, residuals, iterations):
        self.residuals = residuals
        self.iterations = int(iterations)
        super().__init__(
            f"projection did not converge after {self.iterations} iterations; "
            f"final residuals {residuals}"
        )


class SuperluminalError(SpinBundleError):
    """Boost velocity at or above the speed of light."""


class SurfaceError(SpinBundleError):
    """A point violates a required constraint-surface membership."""

    def __init__(self, residuals, message="point is off the constraint surface"):
        self.residuals = residuals
        super().__init__(f"{message}: residuals {residuals}")


class ChartDomainError(SpinBundleError):
    """A point lies outside the domain of the requested coordinate chart."""


class GaugeError(SpinBundleError):
    """The gauge function vanishes (or nearly vanishes) where it must not."""


class IntegrationError(SpinBundleError):
    """Adaptive integration failed (step-size underflow or step budget)."""


class OffSurfaceWarning(UserWarning):
    """Emitted when an operation expecting on-surface input gets a point
    with visible constraint residuals."""
