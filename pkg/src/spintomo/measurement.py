"""Finite-shot simulation of the joint measurements and error propagation.

Multinomial sampling of the joint outcome distributions, plug-in moment
estimators with their sampling covariance, and propagation of that
covariance through the linear reconstruction.  Estimates are reported
as-is: an unphysical |rho| > 1 outcome is flagged, never silently
projected back onto the Bloch ball (project_to_ball is available as an
explicit opt-in).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coherent_assistant import ExpectationTriple, ReconstructionSystem, reconstruct_initial
from .spin_assistant import (
    ALPHA_LABELS,
    SpinScheme,
    forward_probabilities,
    moment_system,
    reconstruct_from_moments,
)

__all__ = [
    "ShotRecord",
    "ReconstructionReport",
    "sample",
    "spin_outcome_distribution",
    "estimate_moments",
    "distribution_moments",
    "estimate_triple",
    "reconstruct_from_shots",
    "project_to_ball",
]

NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class ShotRecord:
    """Counts of a repeated joint measurement.

    counts maps a joint outcome - (i, a) for the two-spin scheme or
    (i, n) for the spin-photon scheme - to the number of shots that
    produced it.  norm_deficit records how far the sampled distribution
    was from unit total before internal renormalization.
    """

    counts: dict[tuple[int, int], int]
    shots: int
    seed: int
    norm_deficit: float = 0.0

    def __post_init__(self):
        total = sum(self.counts.values())
        if total != self.shots:
            raise ValueError(f"counts sum to {total}, expected shots = {self.shots}")

    def frequencies(self) -> dict[tuple[int, int], float]:
        return {k: c / self.shots for k, c in self.counts.items()}


def sample(distribution: dict[tuple[int, int], float], shots: int, seed: int) -> ShotRecord:
    """Multinomial draw from a joint outcome distribution.

    The distribution must be normalized to within 1e-9; any tiny deficit
    (e.g. from Fock truncation) is renormalized away and recorded on the
    returned record.  Reproducible: a fixed seed gives identical counts.
    """
    if shots <= 0:
        raise ValueError("shots must be a positive integer")
    outcomes = list(distribution.keys())
    probs = np.array([distribution[k] for k in outcomes], dtype=float)
    if probs.min() < -1e-12:
        raise ValueError(f"negative probability {probs.min():.3e} in distribution")
    deficit = 1.0 - float(probs.sum())
    if abs(deficit) > NORMALIZATION_TOL:
        raise ValueError(f"distribution sums to {probs.sum()}, outside 1 +/- {NORMALIZATION_TOL:.0e}")
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    drawn = rng.multinomial(shots, probs)
    return ShotRecord(
        counts={k: int(c) for k, c in zip(outcomes, drawn)},
        shots=shots,
        seed=seed,
        norm_deficit=deficit,
    )


def spin_outcome_distribution(scheme: SpinScheme, bloch) -> dict[tuple[int, int], float]:
    """The four joint probabilities of a two-spin scheme keyed by (i, a)."""
    p = forward_probabilities(scheme, bloch)
    return {label: float(pi) for label, pi in zip(ALPHA_LABELS, p)}


def _weighted_moments(outcomes, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    features = np.array([[i, x, i * x] for (i, x) in outcomes], dtype=float)
    mean = weights @ features
    centered = features - mean
    single_shot_cov = (centered * weights[:, None]).T @ centered
    return mean, single_shot_cov


def estimate_moments(record: ShotRecord) -> tuple[np.ndarray, np.ndarray]:
    """Plug-in estimates of (first outcome, second outcome, product).

    For outcomes (i, x) the estimated moments are the empirical means of
    (i, x, i*x); the returned covariance is the empirical covariance of
    that vector divided by the shot count (the CLT covariance of the
    means).
    """
    if record.shots <= 0:
        raise ValueError("record holds no shots")
    weights = np.array(list(record.counts.values()), dtype=float) / record.shots
    mean, single_shot_cov = _weighted_moments(record.counts.keys(), weights)
    return mean, single_shot_cov / record.shots


def distribution_moments(distribution: dict[tuple[int, int], float]) -> tuple[np.ndarray, np.ndarray]:
    """Exact moments (i, x, i*x) of a joint outcome distribution and their
    single-shot covariance (divide by the shot count for the CLT covariance
    of a finite average)."""
    weights = np.array(list(distribution.values()), dtype=float)
    weights = weights / weights.sum()
    return _weighted_moments(distribution.keys(), weights)


def estimate_triple(record: ShotRecord) -> tuple[ExpectationTriple, np.ndarray]:
    """Moment estimates of (sigma_x, photon number, product) from (i, n) counts.

    Returns the triple together with its 3x3 sampling covariance; standard
    errors are the square roots of its diagonal.
    """
    mean, cov = estimate_moments(record)
    return ExpectationTriple(sx=mean[0], n_phot=mean[1], nsx=mean[2]), cov


@dataclass(frozen=True)
class ReconstructionReport:
    """Point estimate of the initial Bloch vector with its error budget.

    residual is the fourth-probability consistency check of the two-spin
    scheme (None for the coherent scheme); physical flags whether the
    unprojected estimate lies inside the Bloch ball.
    """

    estimate: np.ndarray
    covariance: np.ndarray
    condition_number: float
    determinant: float
    shots: int
    residual: float | None = None
    physical: bool = True


def reconstruct_from_shots(record: ShotRecord,
                           system: SpinScheme | ReconstructionSystem,
                           det_floor: float = 1e-6) -> ReconstructionReport:
    """Invert estimated moments through the scheme's linear system.

    The estimator covariance S_y propagates to the estimate as
    W S_y W^T with W the inverse system matrix; the condition number of
    the system matrix is reported alongside.  Ill-conditioned systems
    (|determinant| <= det_floor) are refused upstream.
    """
    mean, cov_y = estimate_moments(record)
    if isinstance(system, SpinScheme):
        estimate = reconstruct_from_moments(system, mean, det_floor=det_floor)
        t_mat, _ = moment_system(system)
        w = np.linalg.inv(t_mat)
        cond = float(np.linalg.cond(t_mat))
        determinant = float(system.determinant)
        freqs = record.frequencies()
        p_obs = np.array([freqs.get(label, 0.0) for label in ALPHA_LABELS])
        coeffs = system.coefficients
        residual = float(p_obs[3] - (coeffs.u[3] + coeffs.v[3] @ estimate))
    elif isinstance(system, ReconstructionSystem):
        triple = ExpectationTriple(sx=mean[0], n_phot=mean[1], nsx=mean[2])
        estimate, cond = reconstruct_initial(triple, system, det_floor=det_floor)
        w = np.linalg.inv(system.matrix)
        determinant = float(system.determinant)
        residual = None
    else:
        raise TypeError(f"unsupported system type {type(system).__name__}")
    covariance = w @ cov_y @ w.T
    covariance = 0.5 * (covariance + covariance.T)
    return ReconstructionReport(
        estimate=estimate,
        covariance=covariance,
        condition_number=cond,
        determinant=determinant,
        shots=record.shots,
        residual=residual,
        physical=bool(estimate @ estimate <= 1.0 + 1e-12),
    )


def project_to_ball(bloch) -> np.ndarray:
    """Radially shrink a Bloch vector onto the unit ball (explicit opt-in)."""
    bloch = np.asarray(bloch, dtype=float)
    norm = np.linalg.norm(bloch)
    return bloch / norm if norm > 1.0 else bloch.copy()
