"""
Radon transforms between Wigner functions and optical tomograms.

forward_radon projects W(q, p) onto the lines X = q cos(theta) + p sin(theta)
with measure dq dp / 2 pi. inverse_radon reconstructs W(q, p) from tomogram
rows by filtered back-projection:

    W(q, p) = integral_0^pi Q_theta(q cos(theta) + p sin(theta)) d theta
    Q_theta = h * W(., theta),  h(s) = (1/2 pi) integral |k| e^{iks} dk

with h realized as the band-limited Ram-Lak kernel of the X grid and an
optional window applied in frequency space.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, interpolate

from homodyne_uncertainty.config import (
    ANGLE_MATCH_TOLERANCE,
    DEFAULT_FILTER_CUTOFF,
    DEFAULT_RECONSTRUCTION_RANGE,
    EPS_NORM_MEASURED,
    FILTER_WINDOWS,
    MAX_RECONSTRUCTION_GAP,
    MIN_RECONSTRUCTION_ANGLES,
    SUPPORT_TAIL_TOLERANCE,
)
from homodyne_uncertainty.exceptions import (
    AngleNotCoveredError,
    GridError,
    InsufficientAnglesError,
    SupportTruncatedError,
)
from homodyne_uncertainty.logger import get_logger
from homodyne_uncertainty.state_models import StateModel, exact_wigner
from homodyne_uncertainty.tomogram_model import OpticalTomogramGrid, check_uniform_axis

logger = get_logger(__name__)

NORMALIZATION = "integral_equals_2pi"


def default_axis() -> np.ndarray:
    low, high, count = DEFAULT_RECONSTRUCTION_RANGE
    return np.linspace(low, high, count)


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """
    Wigner function W(q, p) on a rectangular grid, normalized to 2 pi.

    Attributes:
        qs: Uniform, strictly increasing q axis
        ps: Uniform, strictly increasing p axis
        w: Values indexed (q, p); may be negative
        metadata: Provenance and reconstruction settings
    """

    qs: np.ndarray
    ps: np.ndarray
    w: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        qs = np.array(self.qs, dtype=float)
        ps = np.array(self.ps, dtype=float)
        w = np.array(self.w, dtype=float)
        if qs.ndim != 1 or ps.ndim != 1:
            raise GridError("qs and ps must be one-dimensional")
        check_uniform_axis(qs, "qs")
        check_uniform_axis(ps, "ps")
        if w.shape != (qs.size, ps.size):
            raise GridError(f"w has shape {w.shape}, expected {(qs.size, ps.size)}")
        if not np.all(np.isfinite(w)):
            raise GridError("w contains non-finite values")
        for array in (qs, ps, w):
            array.setflags(write=False)
        object.__setattr__(self, "qs", qs)
        object.__setattr__(self, "ps", ps)
        object.__setattr__(self, "w", w)

    @classmethod
    def from_state(cls, state: StateModel, qs: Sequence[float], ps: Sequence[float]) -> "WignerGrid":
        qs = np.asarray(qs, dtype=float)
        ps = np.asarray(ps, dtype=float)
        w = exact_wigner(state, qs[:, None], ps[None, :])
        return cls(qs, ps, w, {"source": "exact_wigner"})

    def integral(self) -> float:
        """Trapezoid estimate of the integral over the grid; 2 pi for a complete state"""
        return float(integrate.trapezoid(integrate.trapezoid(self.w, self.ps, axis=1), self.qs))

    def value_at(self, q: float, p: float) -> float:
        """Bilinear interpolation of W at (q, p)"""
        interpolator = interpolate.RegularGridInterpolator((self.qs, self.ps), self.w)
        return float(interpolator([[q, p]])[0])


def _boundary_max(w: np.ndarray) -> float:
    return float(max(np.abs(w[0]).max(), np.abs(w[-1]).max(), np.abs(w[:, 0]).max(), np.abs(w[:, -1]).max()))


def forward_radon(
    wigner: WignerGrid,
    thetas: Sequence[float],
    xs: Sequence[float],
    tail_tolerance: float = SUPPORT_TAIL_TOLERANCE,
) -> OpticalTomogramGrid:
    """
    Project a Wigner grid onto tomogram rows

    Each line X = q cos(theta) + p sin(theta) is walked with the grid step,
    W is evaluated by bicubic spline (zero outside the grid) and the trapezoid
    integral is divided by 2 pi. Rows are not renormalized; their defects are
    stored in the grid metadata.

    Args:
        wigner: Wigner function on a grid covering its support
        thetas: Strictly increasing phases in [0, 2 pi)
        xs: Uniform quadrature grid
        tail_tolerance: Largest boundary value allowed, relative to max |W|

    Raises:
        SupportTruncatedError: If W is not negligible on the grid boundary
    """
    thetas = np.asarray(thetas, dtype=float)
    xs = np.asarray(xs, dtype=float)

    scale = float(np.abs(wigner.w).max())
    boundary = _boundary_max(wigner.w)
    if scale > 0 and boundary > tail_tolerance * scale:
        raise SupportTruncatedError(
            f"Wigner grid boundary reaches {boundary / scale:.3g} of the peak (tolerance {tail_tolerance:.3g})"
        )

    spline = interpolate.RectBivariateSpline(wigner.qs, wigner.ps, wigner.w, kx=3, ky=3, s=0)
    step = min(wigner.qs[1] - wigner.qs[0], wigner.ps[1] - wigner.ps[0])
    reach = max(math.hypot(q, p) for q in wigner.qs[[0, -1]] for p in wigner.ps[[0, -1]])
    half = int(math.ceil(reach / step))
    ts = np.linspace(-half * step, half * step, 2 * half + 1)

    rows = np.empty((thetas.size, xs.size))
    for index, theta in enumerate(thetas):
        cos, sin = math.cos(theta), math.sin(theta)
        q = xs[:, None] * cos - ts[None, :] * sin
        p = xs[:, None] * sin + ts[None, :] * cos
        inside = (q >= wigner.qs[0]) & (q <= wigner.qs[-1]) & (p >= wigner.ps[0]) & (p <= wigner.ps[-1])
        values = np.where(inside, spline.ev(q, p), 0.0)
        rows[index] = integrate.trapezoid(values, ts, axis=1) / (2 * math.pi)

    defects = np.abs(integrate.trapezoid(rows, xs, axis=1) - 1.0)
    if np.any(defects > EPS_NORM_MEASURED):
        logger.warning(f"Forward projection rows deviate from unit norm by up to {defects.max():.3g}")
    logger.info(f"Forward Radon transform computed for {thetas.size} phases")

    metadata = {"source": "forward_radon", "normalization_defects": defects.tolist(), "wigner": dict(wigner.metadata)}
    return OpticalTomogramGrid(thetas, xs, rows, metadata)


def _fold_rows(grid: OpticalTomogramGrid) -> Tuple[np.ndarray, np.ndarray]:
    """Map every row into [0, pi) by reflection and average rows landing on one angle"""
    folded: List[Tuple[float, np.ndarray]] = []
    for theta, row in zip(grid.thetas, grid.w):
        if theta >= math.pi - ANGLE_MATCH_TOLERANCE:
            folded.append((max(theta - math.pi, 0.0), grid.mirrored(row)))
        else:
            folded.append((float(theta), row))
    folded.sort(key=lambda item: item[0])

    angles: List[float] = []
    groups: List[List[np.ndarray]] = []
    for angle, row in folded:
        if angles and angle - angles[-1] <= ANGLE_MATCH_TOLERANCE:
            groups[-1].append(row)
        else:
            angles.append(angle)
            groups.append([row])
    return np.asarray(angles), np.asarray([np.mean(group, axis=0) for group in groups])


def _angle_weights(angles: np.ndarray) -> np.ndarray:
    """
    Back-projection weights over the half circle: half the gap to each
    neighbour, which is pi / K for K equispaced angles

    Raises:
        AngleNotCoveredError: If any gap exceeds MAX_RECONSTRUCTION_GAP
    """
    gaps = np.diff(np.concatenate((angles, [angles[0] + math.pi])))
    widest = int(np.argmax(gaps))
    if gaps[widest] > MAX_RECONSTRUCTION_GAP + ANGLE_MATCH_TOLERANCE:
        middle = (angles[widest] + gaps[widest] / 2) % math.pi
        raise AngleNotCoveredError(middle, f"angular gap {gaps[widest]:.4g} rad exceeds {MAX_RECONSTRUCTION_GAP:.4g}")
    return 0.5 * (gaps + np.roll(gaps, 1))


def ramp_filter(size: int, dx: float, cutoff: float = DEFAULT_FILTER_CUTOFF, window: str = "ramp") -> np.ndarray:
    """
    Frequency response of the band-limited Ram-Lak kernel on a buffer of ``size``

    The spatial kernel is dx * h(n dx) with h(0) = pi / (2 dx^2),
    h(n dx) = -2 / (pi n^2 dx^2) for odd n and zero for even n; frequencies
    above ``cutoff`` times the Nyquist frequency are removed, and the cosine
    window additionally tapers the pass band.
    """
    if window not in FILTER_WINDOWS:
        raise ValueError(f"Unknown filter window {window!r}; expected one of {FILTER_WINDOWS}")
    if not 0 < cutoff <= 1:
        raise ValueError(f"Filter cutoff must lie in (0, 1], got {cutoff}")

    offsets = np.arange(size)
    offsets = np.where(offsets < size // 2, offsets, offsets - size)
    kernel = np.zeros(size)
    kernel[0] = math.pi / (2 * dx)
    odd = offsets % 2 == 1
    kernel[odd] = -2 / (math.pi * offsets[odd] ** 2 * dx)
    response = np.fft.fft(kernel).real

    frequencies = np.fft.fftfreq(size, d=dx)
    limit = cutoff / (2 * dx)
    response = np.where(np.abs(frequencies) <= limit, response, 0.0)
    if window == "cosine":
        response = response * np.cos(np.pi * np.clip(frequencies / limit, -1, 1) / 2)
    return response


def _filtered_rows(rows: np.ndarray, xs: np.ndarray, cutoff: float, window: str) -> Tuple[np.ndarray, np.ndarray]:
    """
    Ramp-filter every row with zero padding

    Returns:
        (positions, filtered rows); positions extend the X grid by its own
        length on each side, where the linear convolution is still exact
    """
    count = xs.size
    dx = float(xs[1] - xs[0])
    size = 64
    while size < 4 * count:
        size *= 2
    offset = (size - count) // 2

    padded = np.zeros((rows.shape[0], size))
    padded[:, offset:offset + count] = rows
    response = ramp_filter(size, dx, cutoff, window)
    filtered = np.fft.ifft(np.fft.fft(padded, axis=1) * response, axis=1).real

    start, stop = offset - count, offset + 2 * count
    positions = xs[0] + (np.arange(start, stop) - offset) * dx
    return positions, filtered[:, start:stop]


def inverse_radon(
    grid: OpticalTomogramGrid,
    qs: Optional[Sequence[float]] = None,
    ps: Optional[Sequence[float]] = None,
    filter_cutoff: float = DEFAULT_FILTER_CUTOFF,
    window: str = "ramp",
) -> WignerGrid:
    """
    Reconstruct the Wigner function from a tomogram by filtered back-projection

    Args:
        grid: Valid tomogram; rows in [pi, 2 pi) are folded back by reflection
        qs: Reconstruction q axis (default [-6, 6], 241 points)
        ps: Reconstruction p axis (default [-6, 6], 241 points)
        filter_cutoff: Fraction of the X-grid Nyquist frequency kept by the filter
        window: "ramp" (no apodization) or "cosine"

    Returns:
        WignerGrid normalized to 2 pi, with the filter and angular resolution
        recorded in its metadata

    Raises:
        InsufficientAnglesError: Fewer than 8 distinct angles in [0, pi)
        AngleNotCoveredError: The angles leave a gap wider than pi / 8
    """
    qs = default_axis() if qs is None else np.asarray(qs, dtype=float)
    ps = default_axis() if ps is None else np.asarray(ps, dtype=float)

    angles, rows = _fold_rows(grid)
    if angles.size < MIN_RECONSTRUCTION_ANGLES:
        raise InsufficientAnglesError(int(angles.size), MIN_RECONSTRUCTION_ANGLES)
    weights = _angle_weights(angles)

    positions, filtered = _filtered_rows(rows, grid.xs, filter_cutoff, window)

    q_mesh, p_mesh = np.meshgrid(qs, ps, indexing="ij")
    w = np.zeros_like(q_mesh)
    for angle, weight, projection in zip(angles, weights, filtered):
        s = q_mesh * math.cos(angle) + p_mesh * math.sin(angle)
        w += weight * np.interp(s, positions, projection, left=0.0, right=0.0)

    metadata = {
        "source": "inverse_radon",
        "normalization": NORMALIZATION,
        "angles": int(angles.size),
        "max_angle_gap": float(np.max(np.diff(np.concatenate((angles, [angles[0] + math.pi]))))),
        "filter_cutoff": filter_cutoff,
        "cutoff_frequency": filter_cutoff * math.pi / grid.dx,
        "window": window,
        "tomogram": dict(grid.metadata),
    }
    result = WignerGrid(qs, ps, w, metadata)
    logger.info(
        f"Reconstructed Wigner function on {qs.size}x{ps.size} grid from {angles.size} angles "
        f"(integral {result.integral():.6g})"
    )
    return result
