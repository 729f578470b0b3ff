from typing import Optional


class TomographyError(Exception):
    """Base class for all homodyne uncertainty errors"""
    pass


class InvalidStateError(TomographyError):
    """Raised when a state specification is malformed"""
    pass


class UnphysicalStateError(InvalidStateError):
    """Raised when a Gaussian covariance violates the physicality bound"""
    pass


class InvalidPlanError(TomographyError):
    """Raised when an acquisition plan violates its invariants"""
    pass


class GridError(TomographyError):
    """Raised when a tomogram or Wigner grid is structurally unusable"""
    pass


class NonNormalizedError(GridError):
    """Raised when a tomogram row does not integrate to one"""

    def __init__(self, theta: float, defect: float):
        self.theta = theta
        self.defect = defect
        super().__init__(f"Row at theta={theta:.6g} is not normalized (defect {defect:.3g})")


class NegativeDensityError(GridError):
    """Raised when a tomogram holds a negative density"""

    def __init__(self, theta: float, x: float, value: float):
        self.theta = theta
        self.x = x
        self.value = value
        super().__init__(f"Negative density {value:.3g} at theta={theta:.6g}, x={x:.6g}")


class SupportTruncatedError(GridError):
    """Raised when a Wigner grid does not cover the support of the function"""
    pass


class AngleNotCoveredError(TomographyError):
    """Raised when a phase cannot be reached from the grid rows"""

    def __init__(self, theta: float, detail: Optional[str] = None):
        self.theta = theta
        message = f"Angle theta={theta:.6g} is not covered by the grid"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class InsufficientAnglesError(TomographyError):
    """Raised when too few distinct phases are available for reconstruction"""

    def __init__(self, count: int, required: int):
        self.count = count
        self.required = required
        super().__init__(f"Only {count} distinct angles in [0, pi); at least {required} required")


class InsufficientSamplesError(TomographyError):
    """Raised when a phase has fewer records than required"""

    def __init__(self, theta: Optional[float], count: int, required: int):
        self.theta = theta
        self.count = count
        self.required = required
        where = "in sample set" if theta is None else f"at theta={theta:.6g}"
        super().__init__(f"Only {count} samples {where}; at least {required} required")


class DataFormatError(TomographyError):
    """Raised when an input file cannot be parsed"""
    pass
