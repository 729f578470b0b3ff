"""
Simulated homodyne detection.

Every phase draws from its own PCG64 substream spawned from the plan seed,
with a second substream for detector noise, so records are reproducible and
noise never changes the ideal draws. Records are stored phase-major.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from homodyne_uncertainty import __version__
from homodyne_uncertainty.config import (
    FOCK_ENVELOPE_HALF_WIDTH,
    FOCK_ENVELOPE_MARGIN,
    FOCK_ENVELOPE_POINTS,
    FOCK_MIN_ACCEPTANCE,
    MIN_SAMPLES_PER_PHASE,
    RNG_ALGORITHM,
)
from homodyne_uncertainty.exceptions import InvalidPlanError, InvalidStateError
from homodyne_uncertainty.logger import get_logger
from homodyne_uncertainty.state_models import (
    FockStateSpec,
    GaussianStateSpec,
    StateModel,
    state_to_dict,
    tomogram_density,
)
from homodyne_uncertainty.tomogram_model import QuadratureSampleSet

logger = get_logger(__name__)

MAX_SEED = 2 ** 64 - 1


@dataclass(frozen=True)
class AcquisitionPlan:
    """
    Phases to measure, draws per phase, RNG seed and additive detector noise.

    Attributes:
        phases: Local oscillator phases in radians
        samples_per_phase: Draws at each phase
        seed: Unsigned 64-bit seed
        noise_sigma: Standard deviation of additive Gaussian noise (0 = ideal detector)
    """

    phases: Tuple[float, ...]
    samples_per_phase: int
    seed: int = 0
    noise_sigma: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "phases", tuple(float(phase) for phase in self.phases))
        if not self.phases:
            raise InvalidPlanError("Acquisition plan needs at least one phase")
        if not all(math.isfinite(phase) for phase in self.phases):
            raise InvalidPlanError("Phases must be finite")
        if isinstance(self.samples_per_phase, bool) or int(self.samples_per_phase) != self.samples_per_phase:
            raise InvalidPlanError(f"samples_per_phase must be an integer, got {self.samples_per_phase!r}")
        if self.samples_per_phase < 1:
            raise InvalidPlanError(f"samples_per_phase must be at least 1, got {self.samples_per_phase}")
        if not 0 <= self.seed <= MAX_SEED:
            raise InvalidPlanError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not (math.isfinite(self.noise_sigma) and self.noise_sigma >= 0):
            raise InvalidPlanError(f"noise_sigma must be non-negative, got {self.noise_sigma}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "phases": list(self.phases),
            "samples_per_phase": int(self.samples_per_phase),
            "seed": int(self.seed),
            "noise_sigma": self.noise_sigma,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AcquisitionPlan":
        try:
            return cls(
                phases=tuple(data["phases"]),
                samples_per_phase=data["samples_per_phase"],
                seed=data.get("seed", 0),
                noise_sigma=data.get("noise_sigma", 0.0),
            )
        except (KeyError, TypeError) as e:
            raise InvalidPlanError(f"Malformed acquisition plan: {str(e)}") from e


@dataclass(frozen=True)
class FockEnvelope:
    """Rejection envelope c * N(0, (2n + 1) / 2) for the number state n"""

    n: int
    variance: float
    scale: float

    @property
    def acceptance(self) -> float:
        return 1.0 / self.scale


def fock_envelope(n: int) -> FockEnvelope:
    """
    Envelope constant: 1.1 times the largest density ratio on a 2001-point grid

    The grid spans [-7, 7], widened to cover the classical turning points of
    large n.
    """
    variance = (2 * n + 1) / 2
    half_width = max(FOCK_ENVELOPE_HALF_WIDTH, math.sqrt(2 * n + 1) + 5)
    xs = np.linspace(-half_width, half_width, FOCK_ENVELOPE_POINTS)
    target = tomogram_density(FockStateSpec(n), 0.0, xs)
    proposal = np.exp(-xs ** 2 / (2 * variance)) / math.sqrt(2 * math.pi * variance)
    return FockEnvelope(n, variance, FOCK_ENVELOPE_MARGIN * float(np.max(target / proposal)))


def _sample_gaussian(state: GaussianStateSpec, theta: float, count: int, rng: np.random.Generator) -> np.ndarray:
    mu, nu = math.cos(theta), math.sin(theta)
    mean = state.quadrature_mean(mu, nu)
    spread = math.sqrt(state.quadrature_variance(mu, nu))
    return mean + spread * rng.standard_normal(count)


def _sample_fock(envelope: FockEnvelope, count: int, rng: np.random.Generator) -> Tuple[np.ndarray, int]:
    """
    Rejection sampling from |psi_n(x)|^2

    Returns:
        (accepted draws, number of proposals made)
    """
    state = FockStateSpec(envelope.n)
    spread = math.sqrt(envelope.variance)
    accepted = []
    remaining = count
    proposals = 0
    while remaining > 0:
        batch = int(math.ceil(remaining * envelope.scale * 1.2)) + 16
        candidates = spread * rng.standard_normal(batch)
        proposal = np.exp(-candidates ** 2 / (2 * envelope.variance)) / (spread * math.sqrt(2 * math.pi))
        keep = rng.uniform(size=batch) * envelope.scale * proposal <= tomogram_density(state, 0.0, candidates)
        chosen = np.flatnonzero(keep)[:remaining]
        accepted.append(candidates[chosen])
        # Proposals beyond the last draw used do not count against the acceptance rate.
        proposals += int(chosen[-1]) + 1 if chosen.size == remaining else batch
        remaining -= chosen.size
    return np.concatenate(accepted), proposals


def acquire(
    state: StateModel,
    plan: AcquisitionPlan,
    min_samples_per_phase: int = MIN_SAMPLES_PER_PHASE,
) -> QuadratureSampleSet:
    """
    Draw homodyne records from the exact tomogram of a state

    Args:
        state: Gaussian or Fock state model
        plan: Phases, draws per phase, seed and detector noise
        min_samples_per_phase: Threshold stored on the resulting sample set

    Returns:
        QuadratureSampleSet in phase-major order; deterministic given (state, plan)
    """
    if not isinstance(state, (GaussianStateSpec, FockStateSpec)):
        raise InvalidStateError(f"Unsupported state model: {type(state).__name__}")

    streams = np.random.SeedSequence(plan.seed).spawn(len(plan.phases))
    envelope = fock_envelope(state.n) if isinstance(state, FockStateSpec) else None
    proposals = 0

    blocks = []
    for phase, stream in zip(plan.phases, streams):
        draw_stream, noise_stream = stream.spawn(2)
        rng = np.random.Generator(np.random.PCG64(draw_stream))
        if envelope is None:
            values = _sample_gaussian(state, phase, plan.samples_per_phase, rng)
        else:
            values, made = _sample_fock(envelope, plan.samples_per_phase, rng)
            proposals += made
        if plan.noise_sigma > 0:
            noise_rng = np.random.Generator(np.random.PCG64(noise_stream))
            values = values + plan.noise_sigma * noise_rng.standard_normal(values.size)
        blocks.append(values)
        logger.debug(f"Acquired {values.size} samples at theta={phase:.6g}")

    metadata: Dict[str, Any] = {
        "source": "simulated homodyne detection",
        "state": state_to_dict(state),
        "plan": plan.to_dict(),
        "rng": {"algorithm": RNG_ALGORITHM, "numpy": np.__version__},
        "version": __version__,
    }
    if envelope is not None:
        acceptance = len(plan.phases) * plan.samples_per_phase / proposals
        metadata["rejection"] = {"envelope_scale": envelope.scale, "acceptance_rate": acceptance}
        if acceptance < FOCK_MIN_ACCEPTANCE:
            logger.warning(f"Rejection acceptance rate {acceptance:.3f} for n={state.n} is below {FOCK_MIN_ACCEPTANCE}")
        else:
            logger.debug(f"Rejection acceptance rate {acceptance:.3f} for n={state.n}")

    thetas = np.repeat(np.asarray(plan.phases), plan.samples_per_phase)
    logger.info(f"Acquired {thetas.size} samples over {len(plan.phases)} phases (seed {plan.seed})")
    return QuadratureSampleSet(thetas, np.concatenate(blocks), metadata, min_samples_per_phase)


def phases_from_text(text: str) -> Sequence[float]:
    """Parse a comma-separated list of phases in radians"""
    try:
        return tuple(float(item) for item in text.split(",") if item.strip())
    except ValueError as e:
        raise InvalidPlanError(f"Phases must be comma-separated numbers in radians: {str(e)}") from e
