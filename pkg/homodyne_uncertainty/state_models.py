"""
Closed-form single-mode states: exact optical tomograms, covariances and
Wigner functions.

Every model is immutable. Wigner functions follow the normalization
``integral W(q, p) dq dp = 2 pi`` so that the Radon transform with measure
``dq dp / 2 pi`` yields a normalized tomogram.
"""

import math
from dataclasses import dataclass
from typing import Any, ClassVar, Dict, Tuple, Union

import numpy as np
from scipy import special, stats

from homodyne_uncertainty.config import PHYSICALITY_TOLERANCE, UNCERTAINTY_BOUND, VACUUM_VARIANCE
from homodyne_uncertainty.exceptions import InvalidStateError, UnphysicalStateError

ArrayLike = Union[float, np.ndarray]


def _require_finite(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
        raise InvalidStateError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise InvalidStateError(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class GaussianStateSpec:
    """
    Gaussian state given by its quadrature means and covariance matrix.

    Vacuum, coherent, squeezed and thermal states are all instances; see the
    constructors below.
    """

    mean_q: float = 0.0
    mean_p: float = 0.0
    sigma_qq: float = VACUUM_VARIANCE
    sigma_pp: float = VACUUM_VARIANCE
    sigma_qp: float = 0.0

    kind: ClassVar[str] = "gaussian"

    def __post_init__(self) -> None:
        for name in ("mean_q", "mean_p", "sigma_qq", "sigma_pp", "sigma_qp"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))

        if self.sigma_qq <= 0 or self.sigma_pp <= 0:
            raise InvalidStateError(
                f"Variances must be positive (sigma_qq={self.sigma_qq}, sigma_pp={self.sigma_pp})"
            )

        if self.determinant < UNCERTAINTY_BOUND - PHYSICALITY_TOLERANCE:
            raise UnphysicalStateError(
                "Covariance violates physicality: sigma_qq*sigma_pp - sigma_qp^2 = "
                f"{self.determinant:.6g} < 1/4"
            )

    @property
    def determinant(self) -> float:
        return self.sigma_qq * self.sigma_pp - self.sigma_qp ** 2

    def quadrature_mean(self, mu: ArrayLike, nu: ArrayLike) -> ArrayLike:
        """Mean of the symplectic quadrature mu*q + nu*p"""
        return mu * self.mean_q + nu * self.mean_p

    def quadrature_variance(self, mu: ArrayLike, nu: ArrayLike) -> ArrayLike:
        """Variance of the symplectic quadrature mu*q + nu*p"""
        return mu ** 2 * self.sigma_qq + nu ** 2 * self.sigma_pp + 2 * mu * nu * self.sigma_qp


@dataclass(frozen=True)
class FockStateSpec:
    """Photon number state |n>; its tomogram does not depend on the phase."""

    n: int

    kind: ClassVar[str] = "fock"

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise InvalidStateError(f"Photon number must be an integer, got {self.n!r}")
        if self.n < 0:
            raise InvalidStateError(f"Photon number must be non-negative, got {self.n}")
        object.__setattr__(self, "n", int(self.n))


StateModel = Union[GaussianStateSpec, FockStateSpec]


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def vacuum() -> GaussianStateSpec:
    return GaussianStateSpec()


def coherent(alpha: complex) -> GaussianStateSpec:
    """Coherent state |alpha>: displaced vacuum with means sqrt(2)*(Re alpha, Im alpha)"""
    alpha = complex(alpha)
    return GaussianStateSpec(
        mean_q=math.sqrt(2) * alpha.real,
        mean_p=math.sqrt(2) * alpha.imag,
    )


def squeezed_vacuum(r: float, phi: float = 0.0) -> GaussianStateSpec:
    """
    Squeezed vacuum S(r e^{i phi})|0>.

    The covariance diag(e^{-2r}/2, e^{2r}/2) is rotated by phi/2, so phi = 0
    squeezes the q quadrature.
    """
    small = math.exp(-2 * r) / 2
    large = math.exp(2 * r) / 2
    c, s = math.cos(phi / 2), math.sin(phi / 2)
    return GaussianStateSpec(
        sigma_qq=c * c * small + s * s * large,
        sigma_pp=s * s * small + c * c * large,
        sigma_qp=c * s * (small - large),
    )


def thermal(nbar: float) -> GaussianStateSpec:
    if nbar < 0:
        raise InvalidStateError(f"Mean photon number must be non-negative, got {nbar}")
    variance = (2 * nbar + 1) / 2
    return GaussianStateSpec(sigma_qq=variance, sigma_pp=variance)


def fock(n: int) -> FockStateSpec:
    return FockStateSpec(n=n)


# ---------------------------------------------------------------------------
# Exact quantities
# ---------------------------------------------------------------------------

def fock_wavefunction(n: int, x: ArrayLike) -> np.ndarray:
    """
    Hermite-Gaussian psi_n(x) with vacuum variance 1/2.

    Uses the normalized three-term recurrence
    psi_{k+1} = sqrt(2/(k+1)) x psi_k - sqrt(k/(k+1)) psi_{k-1},
    which stays finite for large n where explicit Hermite polynomials overflow.
    """
    x = np.asarray(x, dtype=float)
    previous = np.zeros_like(x)
    current = np.pi ** -0.25 * np.exp(-x ** 2 / 2)
    for k in range(n):
        previous, current = current, math.sqrt(2 / (k + 1)) * x * current - math.sqrt(k / (k + 1)) * previous
    return current


def tomogram_density(state: StateModel, theta: ArrayLike, x: ArrayLike) -> np.ndarray:
    """
    Exact optical tomogram W(X, theta) of the state.

    Args:
        state: Gaussian or Fock state model
        theta: Local oscillator phase in radians
        x: Quadrature value(s)

    Returns:
        Probability density, broadcast over theta and x
    """
    x = np.asarray(x, dtype=float)
    if isinstance(state, GaussianStateSpec):
        mu, nu = np.cos(theta), np.sin(theta)
        mean = state.quadrature_mean(mu, nu)
        variance = state.quadrature_variance(mu, nu)
        return stats.norm.pdf(x, loc=mean, scale=np.sqrt(variance))
    if isinstance(state, FockStateSpec):
        psi = fock_wavefunction(state.n, x)
        return np.broadcast_to(psi ** 2, np.broadcast(np.asarray(theta), x).shape).copy()
    raise InvalidStateError(f"Unsupported state model: {type(state).__name__}")


def symplectic_tomogram_density(state: StateModel, mu: float, nu: float, x: ArrayLike) -> np.ndarray:
    """Exact symplectic tomogram W(X, mu, nu) through the scaling relation to the optical one"""
    scale = math.hypot(mu, nu)
    if scale == 0:
        raise InvalidStateError("Symplectic parameters (mu, nu) must not both vanish")
    theta = math.atan2(nu, mu) % (2 * math.pi)
    return tomogram_density(state, theta, np.asarray(x, dtype=float) / scale) / scale


def exact_mean(state: StateModel) -> Tuple[float, float]:
    if isinstance(state, GaussianStateSpec):
        return state.mean_q, state.mean_p
    return 0.0, 0.0


def exact_covariance(state: StateModel) -> Tuple[float, float, float]:
    """Return (sigma_qq, sigma_pp, sigma_qp) of the state"""
    if isinstance(state, GaussianStateSpec):
        return state.sigma_qq, state.sigma_pp, state.sigma_qp
    if isinstance(state, FockStateSpec):
        variance = (2 * state.n + 1) / 2
        return variance, variance, 0.0
    raise InvalidStateError(f"Unsupported state model: {type(state).__name__}")


def exact_wigner(state: StateModel, q: ArrayLike, p: ArrayLike) -> np.ndarray:
    """
    Wigner function W(q, p) normalized to integrate to 2 pi over the plane.

    Gaussian: exp(-d^T S^{-1} d / 2) / sqrt(det S).
    Fock: 2 (-1)^n L_n(2(q^2 + p^2)) exp(-(q^2 + p^2)).
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if isinstance(state, GaussianStateSpec):
        dq = q - state.mean_q
        dp = p - state.mean_p
        det = state.determinant
        quadratic = (state.sigma_pp * dq ** 2 - 2 * state.sigma_qp * dq * dp + state.sigma_qq * dp ** 2) / det
        return np.exp(-0.5 * quadratic) / math.sqrt(det)
    if isinstance(state, FockStateSpec):
        radius2 = q ** 2 + p ** 2
        sign = -1.0 if state.n % 2 else 1.0
        return 2 * sign * special.eval_laguerre(state.n, 2 * radius2) * np.exp(-radius2)
    raise InvalidStateError(f"Unsupported state model: {type(state).__name__}")


# ---------------------------------------------------------------------------
# JSON objects
# ---------------------------------------------------------------------------

def state_to_dict(state: StateModel) -> Dict[str, Any]:
    if isinstance(state, GaussianStateSpec):
        return {
            "kind": state.kind,
            "mean_q": state.mean_q,
            "mean_p": state.mean_p,
            "sigma_qq": state.sigma_qq,
            "sigma_pp": state.sigma_pp,
            "sigma_qp": state.sigma_qp,
        }
    if isinstance(state, FockStateSpec):
        return {"kind": state.kind, "n": state.n}
    raise InvalidStateError(f"Unsupported state model: {type(state).__name__}")


def state_from_dict(data: Dict[str, Any]) -> StateModel:
    """
    Build a state model from its JSON object

    Raises:
        InvalidStateError: If the object is malformed
        UnphysicalStateError: If a Gaussian covariance violates physicality
    """
    if not isinstance(data, dict):
        raise InvalidStateError("State spec must be a JSON object")

    kind = data.get("kind")
    if kind == GaussianStateSpec.kind:
        fields = ("mean_q", "mean_p", "sigma_qq", "sigma_pp", "sigma_qp")
        missing = [name for name in fields if name not in data]
        if missing:
            raise InvalidStateError(f"Gaussian state spec is missing fields: {', '.join(missing)}")
        return GaussianStateSpec(**{name: data[name] for name in fields})
    if kind == FockStateSpec.kind:
        if "n" not in data:
            raise InvalidStateError("Fock state spec is missing field: n")
        return FockStateSpec(n=data["n"])
    raise InvalidStateError(f"Unknown state kind: {kind!r}")
