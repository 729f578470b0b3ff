"""
Gridded optical tomograms and raw quadrature samples.

Rows of a grid are indexed by the local oscillator phase theta, columns by the
quadrature X. Phases outside the grid are reached through the reflection
identity W(X, theta + pi) = W(-X, theta) and, between rows, by linear
interpolation over gaps no wider than ``max_gap``.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from homodyne_uncertainty.config import (
    ANGLE_MATCH_TOLERANCE,
    DEFAULT_THETA_TOLERANCE,
    EPS_NORM_MEASURED,
    MAX_INTERPOLATION_GAP,
    MIN_SAMPLES_PER_PHASE,
    QUADRATURE_RULES,
    UNIFORM_SPACING_RTOL,
)
from homodyne_uncertainty.exceptions import (
    AngleNotCoveredError,
    GridError,
    InsufficientSamplesError,
    NegativeDensityError,
    NonNormalizedError,
)
from homodyne_uncertainty.logger import get_logger
from homodyne_uncertainty.state_models import StateModel, tomogram_density

logger = get_logger(__name__)

TWO_PI = 2 * math.pi


def _frozen_array(values: Any, name: str, ndim: int) -> np.ndarray:
    array = np.array(values, dtype=float)
    if array.ndim != ndim:
        raise GridError(f"{name} must be {ndim}-dimensional, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise GridError(f"{name} contains non-finite values")
    array.setflags(write=False)
    return array


def check_uniform_axis(values: np.ndarray, name: str) -> float:
    """
    Check that an axis is strictly increasing with uniform spacing

    Returns:
        The grid step
    """
    if values.size < 2:
        raise GridError(f"{name} needs at least two points")
    steps = np.diff(values)
    if np.any(steps <= 0):
        raise GridError(f"{name} must be strictly increasing")
    step = (values[-1] - values[0]) / (values.size - 1)
    span = values[-1] - values[0]
    if np.max(np.abs(steps - step)) > UNIFORM_SPACING_RTOL * span:
        raise GridError(f"{name} must be uniformly spaced")
    return float(step)


def integrate_rows(values: np.ndarray, xs: np.ndarray, rule: str = "trapezoid") -> np.ndarray:
    """Integrate along the last axis with the trapezoid (default) or Simpson rule"""
    if rule == "trapezoid":
        return integrate.trapezoid(values, xs, axis=-1)
    if rule == "simpson":
        return integrate.simpson(values, x=xs, axis=-1)
    raise ValueError(f"Unknown quadrature rule {rule!r}; expected one of {QUADRATURE_RULES}")


@dataclass(frozen=True)
class SymplecticPoint:
    """Symplectic tomogram parameters (mu, nu), not both zero"""

    mu: float
    nu: float

    def __post_init__(self) -> None:
        if self.mu == 0 and self.nu == 0:
            raise ValueError("Symplectic parameters (mu, nu) must not both vanish")

    @property
    def radius(self) -> float:
        return math.hypot(self.mu, self.nu)

    @property
    def angle(self) -> float:
        """Local oscillator phase atan2(nu, mu) mapped into [0, 2 pi)"""
        return math.atan2(self.nu, self.mu) % TWO_PI


@dataclass(frozen=True, eq=False)
class OpticalTomogramGrid:
    """
    Optical tomogram W(X, theta) sampled on a rectangular (theta, X) grid.

    Attributes:
        thetas: Strictly increasing phases in [0, 2 pi)
        xs: Strictly increasing, uniformly spaced quadrature values
        w: Densities, one row per phase
        metadata: Provenance of the grid
    """

    thetas: np.ndarray
    xs: np.ndarray
    w: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        thetas = _frozen_array(self.thetas, "thetas", 1)
        xs = _frozen_array(self.xs, "xs", 1)
        w = _frozen_array(self.w, "w", 2)

        if thetas.size == 0:
            raise GridError("Grid needs at least one phase")
        if np.any(np.diff(thetas) <= 0):
            raise GridError("thetas must be strictly increasing")
        if thetas[0] < 0 or thetas[-1] >= TWO_PI:
            raise GridError("thetas must lie in [0, 2 pi)")
        check_uniform_axis(xs, "xs")
        if w.shape != (thetas.size, xs.size):
            raise GridError(f"w has shape {w.shape}, expected {(thetas.size, xs.size)}")

        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "w", w)

    @classmethod
    def from_state(
        cls,
        state: StateModel,
        thetas: Sequence[float],
        xs: Sequence[float],
        metadata: Optional[Dict[str, Any]] = None,
    ) -> "OpticalTomogramGrid":
        """Sample the exact tomogram of a state model on the grid"""
        thetas = np.asarray(thetas, dtype=float)
        xs = np.asarray(xs, dtype=float)
        w = tomogram_density(state, thetas[:, None], xs[None, :])
        logger.debug(f"Built exact {type(state).__name__} tomogram on {thetas.size}x{xs.size} grid")
        return cls(thetas, xs, w, dict(metadata or {}))

    @classmethod
    def from_moments(
        cls,
        thetas: Sequence[float],
        xs: Sequence[float],
        mean_q: float,
        mean_p: float,
        sigma_qq: float,
        sigma_pp: float,
        sigma_qp: float,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> "OpticalTomogramGrid":
        """
        Build Gaussian rows with quadrature variances
        sigma_qq cos^2 + sigma_pp sin^2 + 2 sigma_qp cos sin.

        No physicality check is applied; only positive variances at every phase
        are required. Used to construct grids that violate the uncertainty bounds.
        """
        if sigma_qq <= 0 or sigma_pp <= 0 or sigma_qq * sigma_pp - sigma_qp ** 2 <= 0:
            raise GridError("Moments must form a positive-definite covariance")
        thetas = np.asarray(thetas, dtype=float)
        xs = np.asarray(xs, dtype=float)
        cos, sin = np.cos(thetas)[:, None], np.sin(thetas)[:, None]
        mean = mean_q * cos + mean_p * sin
        variance = sigma_qq * cos ** 2 + sigma_pp * sin ** 2 + 2 * sigma_qp * cos * sin
        w = np.exp(-((xs[None, :] - mean) ** 2) / (2 * variance)) / np.sqrt(2 * np.pi * variance)
        return cls(thetas, xs, w, dict(metadata or {}))

    @property
    def dx(self) -> float:
        return float((self.xs[-1] - self.xs[0]) / (self.xs.size - 1))

    @cached_property
    def _symmetric_x(self) -> bool:
        return bool(np.allclose(self.xs[::-1], -self.xs, rtol=0, atol=UNIFORM_SPACING_RTOL * (self.xs[-1] - self.xs[0])))

    def mirrored(self, row: np.ndarray) -> np.ndarray:
        """Return the row evaluated at -X on the same X grid"""
        if self._symmetric_x:
            return row[::-1].copy()
        return np.interp(-self.xs, self.xs, row, left=0.0, right=0.0)

    @cached_property
    def _reachable_angles(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        # Real rows, then reflected rows theta + pi unless a real row already sits there.
        angles = list(self.thetas)
        indices = list(range(self.thetas.size))
        signs = [1] * self.thetas.size
        for index, theta in enumerate(self.thetas):
            reflected = (theta + math.pi) % TWO_PI
            distance = np.abs((self.thetas - reflected + math.pi) % TWO_PI - math.pi)
            if np.min(distance) > ANGLE_MATCH_TOLERANCE:
                angles.append(reflected)
                indices.append(index)
                signs.append(-1)

        order = np.argsort(angles)
        angles = np.asarray(angles)[order]
        indices = np.asarray(indices)[order]
        signs = np.asarray(signs)[order]

        # Periodic sentinels so every angle in [0, 2 pi) has a neighbour on each side.
        angles = np.concatenate(([angles[-1] - TWO_PI], angles, [angles[0] + TWO_PI]))
        indices = np.concatenate(([indices[-1]], indices, [indices[0]]))
        signs = np.concatenate(([signs[-1]], signs, [signs[0]]))
        return angles, indices, signs

    def _oriented_row(self, position: int) -> np.ndarray:
        _, indices, signs = self._reachable_angles
        row = self.w[indices[position]]
        return row.copy() if signs[position] > 0 else self.mirrored(row)

    def row_at(self, theta: float, max_gap: float = MAX_INTERPOLATION_GAP) -> np.ndarray:
        """
        Tomogram row at an arbitrary phase

        Args:
            theta: Phase in radians, any real value
            max_gap: Largest distance to each interpolation neighbour

        Returns:
            Densities on ``xs``

        Raises:
            AngleNotCoveredError: If the phase is neither on a row nor between
                rows closer than ``max_gap``
        """
        angle = theta % TWO_PI
        angles, _, _ = self._reachable_angles
        right = int(np.searchsorted(angles, angle))
        left = right - 1

        if abs(angles[right] - angle) <= ANGLE_MATCH_TOLERANCE:
            return self._oriented_row(right)
        if abs(angle - angles[left]) <= ANGLE_MATCH_TOLERANCE:
            return self._oriented_row(left)

        gap_left = angle - angles[left]
        gap_right = angles[right] - angle
        if gap_left > max_gap or gap_right > max_gap:
            raise AngleNotCoveredError(
                theta, f"nearest rows are {gap_left:.4g} and {gap_right:.4g} rad away (limit {max_gap:.4g})"
            )

        weight = gap_left / (gap_left + gap_right)
        return (1 - weight) * self._oriented_row(left) + weight * self._oriented_row(right)

    def density_at(self, theta: float, x: Union[float, np.ndarray], max_gap: float = MAX_INTERPOLATION_GAP):
        """Linear interpolation of W(X, theta) in X; zero outside the X grid"""
        values = np.interp(x, self.xs, self.row_at(theta, max_gap), left=0.0, right=0.0)
        return float(values) if np.ndim(values) == 0 else values


@dataclass
class ValidationReport:
    """Outcome of checking a grid against non-negativity and normalization"""

    eps_norm: float
    defects: np.ndarray
    errors: List[GridError] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.errors

    @property
    def max_defect(self) -> float:
        return float(np.max(self.defects)) if self.defects.size else 0.0

    def raise_if_failed(self) -> None:
        if self.errors:
            raise self.errors[0]


def validate(
    grid: OpticalTomogramGrid,
    eps_norm: float = EPS_NORM_MEASURED,
    rule: str = "trapezoid",
    negative_tolerance: float = 0.0,
) -> ValidationReport:
    """
    Check every row for negative densities and for unit normalization

    Args:
        grid: Tomogram grid
        eps_norm: Allowed deviation of each row integral from one
        rule: Quadrature rule for the row integrals
        negative_tolerance: Densities above -negative_tolerance count as non-negative

    Returns:
        ValidationReport listing a NonNormalizedError per defective row and a
        NegativeDensityError for the most negative entry of each offending row
    """
    norms = integrate_rows(grid.w, grid.xs, rule)
    defects = np.abs(norms - 1.0)
    report = ValidationReport(eps_norm=eps_norm, defects=defects)

    for index, theta in enumerate(grid.thetas):
        row = grid.w[index]
        worst = int(np.argmin(row))
        if row[worst] < -negative_tolerance:
            report.errors.append(NegativeDensityError(float(theta), float(grid.xs[worst]), float(row[worst])))
        if defects[index] > eps_norm:
            report.errors.append(NonNormalizedError(float(theta), float(defects[index])))

    if report.passed:
        logger.debug(f"Grid valid: max normalization defect {report.max_defect:.3g}")
    else:
        logger.warning(f"Grid failed validation with {len(report.errors)} issue(s); first: {report.errors[0]}")
    return report


def symplectic_density(
    grid: OpticalTomogramGrid,
    point: SymplecticPoint,
    x: Union[float, np.ndarray],
    max_gap: float = MAX_INTERPOLATION_GAP,
):
    """
    Symplectic tomogram W(X, mu, nu) = W(X / r, atan2(nu, mu)) / r with r = |(mu, nu)|

    Raises:
        AngleNotCoveredError: If the resolved phase is not covered
    """
    radius = point.radius
    return grid.density_at(point.angle, np.asarray(x, dtype=float) / radius, max_gap) / radius


def moment_from_grid(
    grid: OpticalTomogramGrid,
    theta: float,
    n: int,
    rule: str = "trapezoid",
    max_gap: float = MAX_INTERPOLATION_GAP,
) -> float:
    """
    Quadrature moment <X^n>(theta) = integral X^n W(X, theta) dX

    Raises:
        AngleNotCoveredError: If theta is not covered by the grid
    """
    if n < 1:
        raise ValueError(f"Moment order must be a positive integer, got {n}")
    row = grid.row_at(theta, max_gap)
    return float(integrate_rows(grid.xs ** n * row, grid.xs, rule))


def symplectic_moment(
    grid: OpticalTomogramGrid,
    point: SymplecticPoint,
    n: int,
    rule: str = "trapezoid",
    max_gap: float = MAX_INTERPOLATION_GAP,
) -> float:
    """Moment <X^n>(mu, nu) = r^n <X^n>(theta) of the symplectic tomogram"""
    return point.radius ** n * moment_from_grid(grid, point.angle, n, rule, max_gap)


@dataclass(frozen=True, eq=False)
class QuadratureSampleSet:
    """
    Raw homodyne records (theta_i, X_i).

    Attributes:
        thetas: Phase of each record
        xs: Measured quadrature of each record
        metadata: Source description, seeds and plan
        min_samples_per_phase: Records required at a phase before it is used
    """

    thetas: np.ndarray
    xs: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)
    min_samples_per_phase: int = MIN_SAMPLES_PER_PHASE

    def __post_init__(self) -> None:
        thetas = _frozen_array(self.thetas, "thetas", 1)
        xs = _frozen_array(self.xs, "xs", 1)
        if thetas.shape != xs.shape:
            raise GridError(f"Got {thetas.size} phases for {xs.size} quadrature values")
        if self.min_samples_per_phase < 1:
            raise ValueError("min_samples_per_phase must be at least 1")
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "xs", xs)

    def __len__(self) -> int:
        return int(self.xs.size)

    @property
    def records(self) -> np.ndarray:
        """Records as an (N, 2) array of (theta, x)"""
        return np.column_stack((self.thetas, self.xs))

    def distinct_phases(self, theta_tol: float = DEFAULT_THETA_TOLERANCE) -> np.ndarray:
        """Distinct phases in [0, 2 pi), merging values closer than theta_tol"""
        phases = np.unique(self.thetas % TWO_PI)
        if phases.size == 0:
            return phases
        keep = np.concatenate(([True], np.diff(phases) > theta_tol))
        return phases[keep]

    def at_phase(self, theta: float, theta_tol: float = DEFAULT_THETA_TOLERANCE) -> np.ndarray:
        """
        Quadrature values measured at theta, including records at theta + pi
        with the sign of X flipped
        """
        offset = (self.thetas - theta) % TWO_PI
        same = (offset <= theta_tol) | (offset >= TWO_PI - theta_tol)
        opposite = np.abs(offset - math.pi) <= theta_tol
        return np.concatenate((self.xs[same], -self.xs[opposite]))

    def require_phase(self, theta: float, theta_tol: float = DEFAULT_THETA_TOLERANCE) -> np.ndarray:
        """
        Like at_phase, but enforce min_samples_per_phase

        Raises:
            InsufficientSamplesError: If too few records match
        """
        values = self.at_phase(theta, theta_tol)
        if values.size < self.min_samples_per_phase:
            raise InsufficientSamplesError(theta, int(values.size), self.min_samples_per_phase)
        return values


def moment_from_samples(
    samples: QuadratureSampleSet,
    theta: float,
    n: int,
    theta_tol: float = DEFAULT_THETA_TOLERANCE,
) -> Tuple[float, float]:
    """
    Sample estimate of <X^n>(theta) with its standard error

    Returns:
        (mean of X^n, plug-in standard error of that mean)

    Raises:
        InsufficientSamplesError: If fewer than min_samples_per_phase records match
    """
    if n < 1:
        raise ValueError(f"Moment order must be a positive integer, got {n}")
    powers = samples.require_phase(theta, theta_tol) ** n
    estimate = float(np.mean(powers))
    standard_error = float(np.std(powers) / math.sqrt(powers.size))
    return estimate, standard_error


def histogram_tomogram(
    samples: QuadratureSampleSet,
    theta_bins: int,
    x_bins: int,
    x_range: Tuple[float, float],
) -> OpticalTomogramGrid:
    """
    Bin raw records into a normalized tomogram grid

    Phases are folded into [0, pi) through (theta - pi, -X) and grouped in bins
    of width pi / theta_bins centred on k pi / theta_bins. Each row is labelled
    with the mean phase of its records and scaled so its trapezoid integral is
    one. Bins with fewer than ``samples.min_samples_per_phase`` records are
    dropped; samples outside ``x_range`` are counted as clipped.

    Raises:
        InsufficientSamplesError: If no bin holds enough records
    """
    if theta_bins < 1 or x_bins < 2:
        raise ValueError("Need at least one theta bin and two x bins")
    low, high = float(x_range[0]), float(x_range[1])
    if not high > low:
        raise ValueError(f"Invalid x range [{low}, {high}]")
    if len(samples) == 0:
        raise InsufficientSamplesError(None, 0, samples.min_samples_per_phase)

    width = math.pi / theta_bins
    phases = samples.thetas % TWO_PI
    flip = phases >= math.pi
    phases = np.where(flip, phases - math.pi, phases)
    values = np.where(flip, -samples.xs, samples.xs)

    bins = np.floor(phases / width + 0.5).astype(int)
    wrapped = bins == theta_bins
    bins[wrapped] = 0
    phases = np.where(wrapped, phases - math.pi, phases)
    values = np.where(wrapped, -values, values)

    step = (high - low) / x_bins
    xs = np.linspace(low + step / 2, high - step / 2, x_bins)

    labels: List[float] = []
    rows: List[np.ndarray] = []
    counts: List[int] = []
    clipped = 0
    for index in range(theta_bins):
        members = bins == index
        count = int(np.count_nonzero(members))
        if count == 0:
            continue
        if count < samples.min_samples_per_phase:
            logger.warning(f"Dropping theta bin {index}: {count} samples < {samples.min_samples_per_phase}")
            continue

        histogram, _ = np.histogram(values[members], bins=x_bins, range=(low, high))
        clipped += count - int(histogram.sum())
        norm = float(integrate.trapezoid(histogram, xs))
        if norm <= 0:
            logger.warning(f"Dropping theta bin {index}: no samples inside the x range")
            continue

        label = float(np.mean(phases[members]))
        labels.append(label + TWO_PI if label < 0 else label)
        rows.append(histogram / norm)
        counts.append(count)

    if not rows:
        best = int(np.max(np.bincount(bins, minlength=theta_bins)))
        raise InsufficientSamplesError(None, best, samples.min_samples_per_phase)
    if clipped:
        logger.warning(f"{clipped} samples fell outside x range [{low}, {high}] and were clipped")

    order = np.argsort(labels)
    metadata = {
        "source": "histogram",
        "theta_bins": theta_bins,
        "x_bins": x_bins,
        "x_range": [low, high],
        "counts": [counts[i] for i in order],
        "clipped": clipped,
        "samples": dict(samples.metadata),
    }
    logger.info(f"Histogram tomogram built: {len(rows)} rows x {x_bins} bins from {len(samples)} samples")
    return OpticalTomogramGrid(np.asarray(labels)[order], xs, np.asarray(rows)[order], metadata)
