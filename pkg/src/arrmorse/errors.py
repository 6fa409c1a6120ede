"""Exception types raised across the package."""


class ArrangementError(ValueError):
    """Invalid arrangement or weight data."""


class MalformedInput(ArrangementError):
    pass


class ZeroLinearPart(ArrangementError):
    pass


class DuplicateHyperplane(ArrangementError):
    pass


class LengthMismatch(ArrangementError):
    pass


class PointOnArrangement(ValueError):
    """Raised when a point lies (numerically) on one of the hyperplanes."""

    def __init__(self, index: int, value: float):
        super().__init__(f"point lies on hyperplane {index} (|xi| = {value:.3g})")
        self.index = index
        self.value = value


class NotCritical(ValueError):
    """certify_morse was handed a point whose residual is above tolerance."""


class DegenerateCritical(ValueError):
    def __init__(self, min_abs: float, max_abs: float):
        super().__init__(
            f"degenerate critical point: min |eig| = {min_abs:.3g}, max |eig| = {max_abs:.3g}"
        )
        self.min_abs = min_abs
        self.max_abs = max_abs


class BudgetExhausted(RuntimeError):
    """Fewer critical points were found than |chi(M)| predicts.

    Carries the points that were found so callers can keep them.
    """

    def __init__(self, found, target: int):
        super().__init__(
            f"found {len(found)} of {target} critical points: "
            "alpha possibly non-generic or budget too small"
        )
        self.found = list(found)
        self.target = target


class StepUnderflow(RuntimeError):
    def __init__(self, t: float, z, message: str = "step size underflow near the arrangement"):
        super().__init__(f"{message} at t={t:.6g}")
        self.t = t
        self.z = z


class NotRankOne(ValueError):
    pass


class NonCentral(ValueError):
    pass


class NonPositiveWeights(ValueError):
    pass
