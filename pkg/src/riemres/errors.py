"""Exception types shared across the package."""


class RiemresError(Exception):
    """Base class for numerical failures (CLI exit status 3)."""


class NotConverged(RiemresError):
    def __init__(self, max_iter, step=None):
        self.max_iter = max_iter
        self.step = step
        msg = f"fixed-point iteration did not converge in {max_iter} iterations"
        if step is not None:
            msg += f" (last step {step:.3e})"
        super().__init__(msg)


class InvalidEps(RiemresError, ValueError):
    pass


class NoContractionRadius(RiemresError):
    pass


class LevelSetNotBracketed(RiemresError):
    pass


class QuadratureBudgetExceeded(RiemresError):
    pass


class FitIllConditioned(RiemresError, ValueError):
    pass
