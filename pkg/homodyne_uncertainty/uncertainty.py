"""
Heisenberg and Schroedinger-Robertson checks on tomographic data.

All quantities are built from quadrature variances at three phases,
theta, theta + pi/4 and theta + pi/2:

    product     = V(theta) V(theta + pi/2)
    covariance  = V(theta + pi/4) - (V(theta) + V(theta + pi/2)) / 2
    determinant = product - covariance^2
    F(theta)    = determinant - 1/4

Data are either an OpticalTomogramGrid (exact moments, zero standard error) or
a QuadratureSampleSet (sample moments, bootstrap standard errors).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from homodyne_uncertainty.config import (
    BOOTSTRAP_REPLICATES,
    DEFAULT_REPORT_SEED,
    DEFAULT_SCAN_STEP,
    DEFAULT_THETA_TOLERANCE,
    GRID_PASS_SLACK,
    MAX_INTERPOLATION_GAP,
    QUADRATURE_RULES,
    SAMPLE_PASS_STANDARD_ERRORS,
    UNCERTAINTY_BOUND,
)
from homodyne_uncertainty.exceptions import TomographyError
from homodyne_uncertainty.logger import get_logger
from homodyne_uncertainty.tomogram_model import OpticalTomogramGrid, QuadratureSampleSet, moment_from_grid

logger = get_logger(__name__)

TomographicData = Union[OpticalTomogramGrid, QuadratureSampleSet]

QUARTER_TURN = math.pi / 2
EIGHTH_TURN = math.pi / 4

# Stream tags for bootstrap substreams derived from the report seed.
_VARIANCE_STREAM = 0
_COVARIANCE_STREAM = 1
_HEISENBERG_STREAM = 2
_SR_STREAM = 3
_F_STREAM = 4


@dataclass(frozen=True)
class CheckConfig:
    """Settings shared by every uncertainty check"""

    bootstrap_replicates: int = BOOTSTRAP_REPLICATES
    grid_slack: float = GRID_PASS_SLACK
    sample_slack_se: float = SAMPLE_PASS_STANDARD_ERRORS
    theta_scan: Tuple[float, ...] = ()
    seed: int = DEFAULT_REPORT_SEED
    theta_tol: float = DEFAULT_THETA_TOLERANCE
    max_gap: float = MAX_INTERPOLATION_GAP
    rule: str = "trapezoid"
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta_scan", tuple(float(theta) for theta in self.theta_scan))
        if self.bootstrap_replicates < 0:
            raise ValueError("bootstrap_replicates must be non-negative")
        if self.grid_slack < 0 or self.sample_slack_se < 0:
            raise ValueError("Pass slacks must be non-negative")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.rule not in QUADRATURE_RULES:
            raise ValueError(f"Unknown quadrature rule {self.rule!r}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CheckConfig":
        known = {item.name for item in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"Unknown check settings: {', '.join(unknown)}")
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["theta_scan"] = list(self.theta_scan)
        return data

    def slack(self, standard_error: float, source: str) -> float:
        if source == "grid":
            return self.grid_slack
        return self.sample_slack_se * standard_error


@dataclass(frozen=True)
class VarianceEstimate:
    """A variance (or covariance) with its standard error; the raw value is never clamped"""

    value: float
    standard_error: float
    source: str
    theta: float

    @property
    def negative(self) -> bool:
        return self.value < 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "se": self.standard_error,
            "theta": self.theta,
            "source": self.source,
            "negative": self.negative,
        }


@dataclass(frozen=True)
class BoundCheck:
    """Comparison of a tomographic quantity with the bound 1/4"""

    value: float
    standard_error: float
    slack: float
    bound: float = UNCERTAINTY_BOUND

    @property
    def passed(self) -> bool:
        return self.value >= self.bound - self.slack

    @property
    def margin(self) -> float:
        return self.value - self.bound

    @property
    def significance(self) -> Optional[float]:
        """Margin in units of the standard error; None for exact data"""
        if self.standard_error > 0:
            return self.margin / self.standard_error
        return None

    def to_dict(self, name: str) -> Dict[str, Any]:
        return {
            name: self.value,
            "se": self.standard_error,
            "bound": self.bound,
            "slack": self.slack,
            "margin": self.margin,
            "significance": self.significance,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class FPoint:
    """One entry of the F(theta) scan; ``error`` is set when theta could not be evaluated"""

    theta: float
    f: Optional[float]
    standard_error: Optional[float]
    slack: Optional[float] = None
    error: Optional[str] = None

    @property
    def passed(self) -> Optional[bool]:
        if self.f is None:
            return None
        return self.f >= -self.slack

    def to_dict(self) -> Dict[str, Any]:
        data = {"theta": self.theta, "f": self.f, "se": self.standard_error}
        if self.error is not None:
            data["error"] = self.error
        return data


@dataclass
class UncertaintyReport:
    """Full outcome of an uncertainty check on one data set"""

    sigma_qq: VarianceEstimate
    sigma_pp: VarianceEstimate
    sigma_qp: VarianceEstimate
    heisenberg: BoundCheck
    sr: BoundCheck
    f_curve: List[FPoint]
    cross_check: Dict[str, Any]
    config: CheckConfig
    provenance: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def heisenberg_product(self) -> float:
        return self.heisenberg.value

    @property
    def sr_determinant(self) -> float:
        return self.sr.value

    @property
    def heisenberg_pass(self) -> bool:
        return self.heisenberg.passed

    @property
    def sr_pass(self) -> bool:
        return self.sr.passed

    @property
    def f_pass(self) -> bool:
        evaluated = [point for point in self.f_curve if point.f is not None]
        return bool(evaluated) and all(point.passed for point in evaluated)

    @property
    def all_passed(self) -> bool:
        return self.heisenberg_pass and self.sr_pass and self.f_pass

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sigma_qq": self.sigma_qq.to_dict(),
            "sigma_pp": self.sigma_pp.to_dict(),
            "sigma_qp": self.sigma_qp.to_dict(),
            "heisenberg": self.heisenberg.to_dict("product"),
            "sr": self.sr.to_dict("determinant"),
            "f_curve": [point.to_dict() for point in self.f_curve],
            "f_pass": self.f_pass,
            "cross_check": self.cross_check,
            "warnings": list(self.warnings),
            "config": self.config.to_dict(),
            "provenance": self.provenance,
        }


# ---------------------------------------------------------------------------
# Variance machinery
# ---------------------------------------------------------------------------

def _source(data: TomographicData) -> str:
    if isinstance(data, OpticalTomogramGrid):
        return "grid"
    if isinstance(data, QuadratureSampleSet):
        return "samples"
    raise TypeError(f"Unsupported tomographic data: {type(data).__name__}")


def _angle_key(theta: float) -> int:
    return int(round((theta % (2 * math.pi)) * 1e9))


def _stream(config: CheckConfig, *key: int) -> np.random.Generator:
    """Independent bootstrap stream for one quantity, reproducible in any evaluation order"""
    return np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=key))


def _bootstrap_variances(arrays: Sequence[np.ndarray], replicates: int, rng: np.random.Generator) -> np.ndarray:
    # Each replicate resamples every phase, so derived quantities share one replicate index.
    out = np.empty((replicates, len(arrays)))
    for replicate in range(replicates):
        for column, values in enumerate(arrays):
            out[replicate, column] = values[rng.integers(0, values.size, size=values.size)].var()
    return out


def _variances(
    data: TomographicData,
    angles: Sequence[float],
    config: CheckConfig,
    key: Tuple[int, ...],
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Point variances at each angle and, for samples, bootstrap replicates

    Returns:
        (values of shape (k,), replicates of shape (R, k) or None for grids)
    """
    if isinstance(data, OpticalTomogramGrid):
        values = []
        for angle in angles:
            first = moment_from_grid(data, angle, 1, config.rule, config.max_gap)
            second = moment_from_grid(data, angle, 2, config.rule, config.max_gap)
            values.append(second - first ** 2)
        return np.asarray(values), None

    if config.bootstrap_replicates < 2:
        raise ValueError("Sample-based checks need at least 2 bootstrap replicates")
    arrays = [data.require_phase(angle, config.theta_tol) for angle in angles]
    values = np.asarray([array.var() for array in arrays])
    replicates = _bootstrap_variances(arrays, config.bootstrap_replicates, _stream(config, *key))
    return values, replicates


def _spread(replicates: Optional[np.ndarray]) -> float:
    if replicates is None:
        return 0.0
    return float(np.std(replicates, ddof=1))


def sr_terms(v0, v1, v2):
    """
    Heisenberg product, covariance and SR determinant from variances at
    theta, theta + pi/4 and theta + pi/2 (works element-wise on arrays)
    """
    product = v0 * v2
    covariance = v1 - 0.5 * (v0 + v2)
    return product, covariance, product - covariance ** 2


def _triplet(theta: float) -> Tuple[float, float, float]:
    return theta, theta + EIGHTH_TURN, theta + QUARTER_TURN


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def variance_at(data: TomographicData, theta: float, config: Optional[CheckConfig] = None) -> VarianceEstimate:
    """
    Quadrature variance <X^2> - <X>^2 at phase theta

    Raises:
        AngleNotCoveredError: Grid does not cover theta
        InsufficientSamplesError: Too few records at theta
    """
    config = config or CheckConfig()
    values, replicates = _variances(data, [theta], config, (_VARIANCE_STREAM, _angle_key(theta)))
    estimate = VarianceEstimate(float(values[0]), _spread(replicates), _source(data), theta)
    if estimate.negative:
        logger.warning(f"Negative variance {estimate.value:.3g} at theta={theta:.6g}")
    return estimate


def covariance_qp(data: TomographicData, theta0: float = 0.0, config: Optional[CheckConfig] = None) -> VarianceEstimate:
    """
    Covariance of the frame rotated by theta0:
    V(theta0 + pi/4) - (V(theta0) + V(theta0 + pi/2)) / 2

    For theta0 = 0 this is sigma_QP.
    """
    config = config or CheckConfig()
    values, replicates = _variances(data, _triplet(theta0), config, (_COVARIANCE_STREAM, _angle_key(theta0)))
    _, covariance, _ = sr_terms(*values)
    spread = 0.0
    if replicates is not None:
        _, replicate_covariances, _ = sr_terms(replicates[:, 0], replicates[:, 1], replicates[:, 2])
        spread = _spread(replicate_covariances)
    return VarianceEstimate(float(covariance), spread, _source(data), theta0)


def heisenberg_check(data: TomographicData, config: Optional[CheckConfig] = None) -> BoundCheck:
    """Compare V(0) V(pi/2) = sigma_QQ sigma_PP with 1/4"""
    config = config or CheckConfig()
    values, replicates = _variances(data, (0.0, QUARTER_TURN), config, (_HEISENBERG_STREAM,))
    product = float(values[0] * values[1])
    spread = 0.0 if replicates is None else _spread(replicates[:, 0] * replicates[:, 1])
    check = BoundCheck(product, spread, config.slack(spread, _source(data)))
    logger.info(f"Heisenberg product {product:.6g} ({'pass' if check.passed else 'FAIL'})")
    return check


def sr_check(data: TomographicData, config: Optional[CheckConfig] = None) -> BoundCheck:
    """Compare sigma_QQ sigma_PP - sigma_QP^2 with 1/4"""
    config = config or CheckConfig()
    values, replicates = _variances(data, _triplet(0.0), config, (_SR_STREAM,))
    _, _, determinant = sr_terms(*values)
    spread = 0.0
    if replicates is not None:
        spread = _spread(sr_terms(replicates[:, 0], replicates[:, 1], replicates[:, 2])[2])
    check = BoundCheck(float(determinant), spread, config.slack(spread, _source(data)))
    logger.info(f"Schroedinger-Robertson determinant {check.value:.6g} ({'pass' if check.passed else 'FAIL'})")
    return check


def uncertainty_function(
    data: TomographicData,
    theta: float,
    config: Optional[CheckConfig] = None,
) -> Tuple[float, float]:
    """
    Tomographic uncertainty function F(theta), non-negative for every quantum state

    Returns:
        (F(theta), standard error)
    """
    config = config or CheckConfig()
    values, replicates = _variances(data, _triplet(theta), config, (_F_STREAM, _angle_key(theta)))
    _, _, determinant = sr_terms(*values)
    spread = 0.0
    if replicates is not None:
        spread = _spread(sr_terms(replicates[:, 0], replicates[:, 1], replicates[:, 2])[2])
    return float(determinant - UNCERTAINTY_BOUND), spread


def default_scan(step: float = DEFAULT_SCAN_STEP) -> List[float]:
    """Base angles k * step covering [0, pi)"""
    count = int(round(math.pi / step))
    return [index * math.pi / count for index in range(count)]


def covered_scan(data: TomographicData, config: Optional[CheckConfig] = None) -> List[float]:
    """
    Scan angles for a data set: the configured scan, else the default scan for
    grids, else every measured phase in [0, pi) whose pi/4 and pi/2 partners
    are sampled as well
    """
    config = config or CheckConfig()
    if config.theta_scan:
        return list(config.theta_scan)
    if isinstance(data, OpticalTomogramGrid):
        return default_scan()

    phases = data.distinct_phases(config.theta_tol)
    base = sorted({round(float(phase % math.pi), 12) for phase in phases})
    scan = []
    for theta in base:
        partners = _triplet(theta)
        if all(data.at_phase(angle, config.theta_tol).size >= data.min_samples_per_phase for angle in partners):
            scan.append(theta)
    return scan


def _scan_point(data: TomographicData, theta: float, config: CheckConfig) -> FPoint:
    try:
        value, spread = uncertainty_function(data, theta, config)
    except TomographyError as e:
        logger.warning(f"F(theta) not evaluated at theta={theta:.6g}: {str(e)}")
        return FPoint(theta, None, None, error=str(e))
    return FPoint(theta, value, spread, config.slack(spread, _source(data)))


def f_scan(
    data: TomographicData,
    thetas: Optional[Sequence[float]] = None,
    config: Optional[CheckConfig] = None,
    provenance: Optional[Dict[str, Any]] = None,
) -> UncertaintyReport:
    """
    Evaluate every check and F(theta) over a scan of base angles

    Args:
        data: Tomogram grid or sample set
        thetas: Base angles; defaults to covered_scan(data, config)
        config: Check settings
        provenance: Extra provenance entries for the report

    Returns:
        UncertaintyReport; scan angles that cannot be evaluated carry an error marker

    Raises:
        AngleNotCoveredError, InsufficientSamplesError: When the checks at
            theta = 0, pi/4, pi/2 or every scan angle cannot be evaluated
    """
    config = config or CheckConfig()
    thetas = list(thetas) if thetas is not None else covered_scan(data, config)
    source = _source(data)
    logger.info(f"Running uncertainty checks on {source} data over {len(thetas)} scan angles")

    sigma_qq = variance_at(data, 0.0, config)
    sigma_pp = variance_at(data, QUARTER_TURN, config)
    sigma_qp = covariance_qp(data, 0.0, config)
    heisenberg = heisenberg_check(data, config)
    sr = sr_check(data, config)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            curve = list(pool.map(lambda theta: _scan_point(data, theta, config), thetas))
    else:
        curve = [_scan_point(data, theta, config) for theta in thetas]

    evaluated = [point for point in curve if point.f is not None]
    if thetas and not evaluated:
        # Every angle failed: re-raise the first failure as a data error.
        uncertainty_function(data, thetas[0], config)

    f_zero, f_zero_se = uncertainty_function(data, 0.0, config)
    difference = f_zero - (sr.value - UNCERTAINTY_BOUND)
    cross_check = {
        "theta": 0.0,
        "f": f_zero,
        "se": f_zero_se,
        "sr_determinant_minus_bound": sr.value - UNCERTAINTY_BOUND,
        "difference": difference,
        "consistent": abs(difference) <= max(config.sample_slack_se * f_zero_se, 1e-12),
    }

    warnings = []
    for estimate in (sigma_qq, sigma_pp):
        if estimate.negative:
            warnings.append(f"negative variance {estimate.value:.6g} at theta={estimate.theta:.6g}")
    for point in evaluated:
        if not point.passed:
            warnings.append(f"F({point.theta:.6g}) = {point.f:.6g} below zero")

    report = UncertaintyReport(
        sigma_qq=sigma_qq,
        sigma_pp=sigma_pp,
        sigma_qp=sigma_qp,
        heisenberg=heisenberg,
        sr=sr,
        f_curve=curve,
        cross_check=cross_check,
        config=config,
        provenance={
            "source": source,
            "seed": config.seed,
            "input_metadata": dict(data.metadata),
            **dict(provenance or {}),
        },
        warnings=warnings,
    )
    logger.info(
        f"Checks done: heisenberg={'pass' if report.heisenberg_pass else 'FAIL'}, "
        f"sr={'pass' if report.sr_pass else 'FAIL'}, F={'pass' if report.f_pass else 'FAIL'}"
    )
    return report
