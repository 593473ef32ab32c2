"""Brute-force ground truth for the coherent-assistant scheme.

Builds the full spin-plus-mode Hamiltonian on a (padded) truncated Fock
space, evolves exactly by eigendecomposition of the Hermitian generator,
and computes any probability or expectation value directly from the
evolved joint density matrix.  Every closed form in coherent_assistant is
validated against this path, and sampling distributions are generated
from it.

Joint-space layout everywhere: spin index slow, photon index fast, so a
joint operator is tensor_product(spin_op, mode_op).
"""

from __future__ import annotations

import numpy as np

from .core import (
    FockSpace,
    IDENTITY_2,
    SIGMA_MINUS,
    SIGMA_PLUS,
    annihilation,
    bloch_to_density,
    coherent_amplitudes,
    creation,
    hermitian_expm,
    number_operator,
    pauli,
    tensor_product,
)
from .coherent_assistant import ExpectationTriple, JCParams

__all__ = [
    "jc_hamiltonian",
    "interaction_operator",
    "excitation_number",
    "evolve",
    "JCOracle",
    "oracle_expectations",
    "joint_distribution",
    "expectation_map",
]

DEFAULT_PADDING = 12


def interaction_operator(space: FockSpace) -> np.ndarray:
    """V = sigma_+ a + sigma_- a^dag, the excitation-conserving coupling."""
    return tensor_product(SIGMA_PLUS, annihilation(space)) \
        + tensor_product(SIGMA_MINUS, creation(space))


def excitation_number(space: FockSpace) -> np.ndarray:
    """N = a^dag a + sigma_+ sigma_-, the total excitation number.

    Commutes with the Hamiltonian, and V^2 = N away from the top truncated
    level.
    """
    return tensor_product(IDENTITY_2, number_operator(space)) \
        + tensor_product(SIGMA_PLUS @ SIGMA_MINUS, np.eye(space.dim))


def jc_hamiltonian(space: FockSpace, gamma: float, omega: float) -> np.ndarray:
    """H = omega a^dag a + (omega/2) sigma_z + gamma (sigma_+ a + sigma_- a^dag)."""
    return omega * tensor_product(IDENTITY_2, number_operator(space)) \
        + 0.5 * omega * tensor_product(pauli("z"), np.eye(space.dim)) \
        + gamma * interaction_operator(space)


def evolve(state: np.ndarray, hamiltonian: np.ndarray, t: float) -> np.ndarray:
    """U rho U^dag with U = exp(-i H t); trace and spectrum are preserved."""
    u = hermitian_expm(hamiltonian, t)
    return u @ np.asarray(state, dtype=complex) @ u.conj().T


class JCOracle:
    """Exact-evolution engine for fixed model parameters.

    The Fock space is padded beyond params.n_max so that truncation
    artifacts at the top level stay far below the comparison tolerances;
    the Hamiltonian is diagonalized once and reused across times.
    """

    def __init__(self, params: JCParams, padding: int = DEFAULT_PADDING):
        self.params = params
        self.space = FockSpace(params.n_max + padding)
        dim_f = self.space.dim
        self.hamiltonian = jc_hamiltonian(self.space, params.gamma, params.omega)
        self._eigvals, self._eigvecs = np.linalg.eigh(self.hamiltonian)
        amps, self.field_deficit = coherent_amplitudes(params.alpha, self.space)
        amps = amps / np.linalg.norm(amps)
        self._field_state = np.outer(amps, amps.conj())
        eye_f = np.eye(dim_f)
        self._observables = {
            "x": (tensor_product(pauli("x"), eye_f),
                  tensor_product(IDENTITY_2, number_operator(self.space)),
                  tensor_product(pauli("x"), number_operator(self.space))),
            "z": (tensor_product(pauli("z"), eye_f),
                  tensor_product(IDENTITY_2, number_operator(self.space)),
                  tensor_product(pauli("z"), number_operator(self.space))),
        }

    def propagator(self, t: float) -> np.ndarray:
        return (self._eigvecs * np.exp(-1j * self._eigvals * t)) @ self._eigvecs.conj().T

    def initial_state(self, rho0) -> np.ndarray:
        """Factorized joint state rho_spin (x) |alpha><alpha|."""
        return tensor_product(bloch_to_density(rho0), self._field_state)

    def evolved_state(self, t: float, rho0) -> np.ndarray:
        u = self.propagator(t)
        return u @ self.initial_state(rho0) @ u.conj().T

    def expectations(self, t: float, rho0, triplet: str = "x") -> np.ndarray:
        rho_t = self.evolved_state(t, rho0)
        return np.array([np.trace(rho_t @ ob).real for ob in self._observables[triplet]])

    def joint_distribution(self, t: float, rho0) -> dict[tuple[int, int], float]:
        """P(i, n) of the joint projective (sigma_x, photon number) measurement.

        P(i, n) = tr[rho(t) (pi_i^x (x) |n><n|)]; the outcomes run over the
        padded photon range, so the distribution sums to one up to the
        coherent-state truncation deficit.
        """
        rho_t = self.evolved_state(t, rho0)
        dim_f = self.space.dim
        uu = np.diag(rho_t[:dim_f, :dim_f]).real
        dd = np.diag(rho_t[dim_f:, dim_f:]).real
        ud = np.diag(rho_t[:dim_f, dim_f:])
        cross = 2.0 * ud.real
        dist: dict[tuple[int, int], float] = {}
        for n in range(dim_f):
            dist[(1, n)] = 0.5 * (uu[n] + dd[n] + cross[n])
            dist[(-1, n)] = 0.5 * (uu[n] + dd[n] - cross[n])
        return dist

    def expectation_map(self, t: float, triplet: str = "x") -> tuple[np.ndarray, np.ndarray]:
        """Affine map (M, b) with y = M x0 + b for the chosen triplet.

        Expectation values are linear in the initial density matrix, so
        probing the origin and the three Bloch axes recovers the map
        exactly (no finite differencing involved).
        """
        b = self.expectations(t, np.zeros(3), triplet)
        m = np.empty((3, 3))
        for k in range(3):
            axis = np.zeros(3)
            axis[k] = 1.0
            m[:, k] = self.expectations(t, axis, triplet) - b
        return m, b


def oracle_expectations(t: float, params: JCParams, rho0,
                        padding: int = DEFAULT_PADDING) -> ExpectationTriple:
    """Exact (sigma_x, photon number, product) triple at time t."""
    vals = JCOracle(params, padding).expectations(t, rho0, triplet="x")
    return ExpectationTriple(sx=float(vals[0]), n_phot=float(vals[1]), nsx=float(vals[2]))


def joint_distribution(t: float, params: JCParams, rho0,
                       padding: int = DEFAULT_PADDING) -> dict[tuple[int, int], float]:
    return JCOracle(params, padding).joint_distribution(t, rho0)


def expectation_map(t: float, params: JCParams, triplet: str = "x",
                    padding: int = DEFAULT_PADDING) -> tuple[np.ndarray, np.ndarray]:
    return JCOracle(params, padding).expectation_map(t, triplet)
