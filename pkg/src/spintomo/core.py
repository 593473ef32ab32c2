"""Low-level quantum primitives shared by every other module.

Pauli algebra, tensor products, exact evolution of Hermitian generators,
Bloch-vector conversions, and truncated boson (Fock) spaces.  Everything
is a pure function over plain numpy arrays; matrices produced here are
marked read-only so they can be shared between threads without copying.

Units: hbar = 1 throughout, all operators dimensionless unless noted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TruncationError",
    "IllConditionedError",
    "FockSpace",
    "pauli",
    "tensor_product",
    "dagger",
    "is_hermitian",
    "hermitian_expm",
    "density_matrix",
    "bloch_to_density",
    "density_to_bloch",
    "annihilation",
    "creation",
    "number_operator",
    "poisson_weights",
    "coherent_amplitudes",
    "coherent_state",
]

# Validation tolerances applied on every constructor path.
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-10
BLOCH_NORM_TOL = 1e-12
# Probability mass a truncated coherent state may lose before we refuse it.
COHERENT_DEFICIT_TOL = 1e-8


class TruncationError(ValueError):
    """A truncated Fock space is too small to hold the requested state.

    ``deficit`` carries the probability mass that would be lost.
    """

    def __init__(self, message: str, deficit: float):
        super().__init__(message)
        self.deficit = deficit


class IllConditionedError(RuntimeError):
    """A reconstruction system is too close to singular to invert.

    ``determinant`` carries the offending determinant value.
    """

    def __init__(self, message: str, determinant: float):
        super().__init__(message)
        self.determinant = determinant


def _readonly(m: np.ndarray) -> np.ndarray:
    m.setflags(write=False)
    return m


_PAULI = {
    "x": _readonly(np.array([[0, 1], [1, 0]], dtype=complex)),
    "y": _readonly(np.array([[0, -1j], [1j, 0]], dtype=complex)),
    "z": _readonly(np.array([[1, 0], [0, -1]], dtype=complex)),
}

IDENTITY_2 = _readonly(np.eye(2, dtype=complex))
SIGMA_PLUS = _readonly(np.array([[0, 1], [0, 0]], dtype=complex))   # |+><-|
SIGMA_MINUS = _readonly(np.array([[0, 0], [1, 0]], dtype=complex))  # |-><+|
PROJECTOR_UP = _readonly(np.array([[1, 0], [0, 0]], dtype=complex))
PROJECTOR_DOWN = _readonly(np.array([[0, 0], [0, 1]], dtype=complex))


def pauli(axis: str) -> np.ndarray:
    """Return the 2x2 Pauli matrix for ``axis`` in {'x', 'y', 'z'}.

    Basis convention: spin-up |+> is the first basis vector.
    """
    try:
        return _PAULI[axis]
    except KeyError:
        raise ValueError(f"axis must be one of 'x', 'y', 'z', got {axis!r}") from None


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the first factor's index varying slowest.

    The convention everywhere in this package: system factors come first,
    assistant factors second, so tensor_product(op_S, op_A) acts on the
    joint space with the system index slow.
    """
    return np.kron(np.asarray(a), np.asarray(b))


def dagger(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).conj().T


def is_hermitian(m: np.ndarray, tol: float = 1e-10) -> bool:
    m = np.asarray(m)
    return bool(np.abs(m - m.conj().T).max() <= tol)


def hermitian_expm(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) for Hermitian h, via eigendecomposition.

    Exactly unitary up to the eigensolver tolerance, which is why this is
    used instead of a series expansion.  Rejects non-Hermitian input.
    """
    h = np.asarray(h, dtype=complex)
    asym = np.abs(h - h.conj().T).max()
    if asym > 1e-10:
        raise ValueError(f"generator is not Hermitian (max asymmetry {asym:.2e})")
    w, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(-1j * w * t)) @ vecs.conj().T


def density_matrix(entries: np.ndarray) -> np.ndarray:
    """Validate and freeze a density matrix.

    Checks Hermiticity, unit trace and positivity (eigenvalue floor
    -1e-10); every density matrix built by this package passes through
    here.
    """
    rho = np.array(entries, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    herm = np.abs(rho - rho.conj().T).max()
    if herm > HERMITIAN_TOL:
        raise ValueError(f"density matrix not Hermitian (deviation {herm:.2e})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace {tr} != 1")
    eigmin = np.linalg.eigvalsh(rho).min()
    if eigmin < EIGENVALUE_FLOOR:
        raise ValueError(f"density matrix has negative eigenvalue {eigmin:.2e}")
    return _readonly(rho)


def bloch_to_density(v) -> np.ndarray:
    """Spin-1/2 density matrix 1/2 (1 + v . sigma) for a Bloch vector v.

    Rejects unphysical vectors with |v| > 1.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError("Bloch vector must have exactly 3 components")
    norm_sq = float(v @ v)
    if norm_sq > 1.0 + BLOCH_NORM_TOL:
        raise ValueError(f"Bloch vector norm {np.sqrt(norm_sq):.6f} exceeds 1")
    rho = 0.5 * (IDENTITY_2 + v[0] * _PAULI["x"] + v[1] * _PAULI["y"] + v[2] * _PAULI["z"])
    return density_matrix(rho)


def density_to_bloch(rho: np.ndarray) -> np.ndarray:
    """Bloch vector (tr(rho sigma_x), tr(rho sigma_y), tr(rho sigma_z))."""
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a 2x2 density matrix, got shape {rho.shape}")
    return np.array([np.trace(rho @ _PAULI[ax]).real for ax in "xyz"])


@dataclass(frozen=True)
class FockSpace:
    """Truncated photon-number space {|0>, ..., |n_max>}."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError("n_max must be non-negative")

    @property
    def dim(self) -> int:
        return self.n_max + 1


def annihilation(space: FockSpace) -> np.ndarray:
    """Truncated annihilation operator: a|n> = sqrt(n)|n-1>, exact for n <= n_max."""
    a = np.zeros((space.dim, space.dim), dtype=complex)
    for k in range(1, space.dim):
        a[k - 1, k] = np.sqrt(k)
    return _readonly(a)


def creation(space: FockSpace) -> np.ndarray:
    return _readonly(annihilation(space).conj().T.copy())


def number_operator(space: FockSpace) -> np.ndarray:
    return _readonly(np.diag(np.arange(space.dim)).astype(complex))


def poisson_weights(alpha_sq: float, n_max: int) -> np.ndarray:
    """Poisson photon-number weights exp(-|a|^2)|a|^(2n)/n! for n = 0..n_max.

    Computed by the stable multiplicative recurrence, no factorials.
    """
    p = np.empty(n_max + 1)
    p[0] = np.exp(-alpha_sq)
    for n in range(1, n_max + 1):
        p[n] = p[n - 1] * alpha_sq / n
    return p


def coherent_amplitudes(alpha: complex, space: FockSpace) -> tuple[np.ndarray, float]:
    """Truncated coherent-state amplitudes and the pre-normalization deficit.

    Returns (c, deficit) with c_k = exp(-|a|^2/2) a^k / sqrt(k!) left
    unnormalized, and deficit = 1 - sum |c_k|^2, the Poisson mass beyond
    the truncation level.
    """
    c = np.zeros(space.dim, dtype=complex)
    c[0] = np.exp(-abs(alpha) ** 2 / 2)
    for k in range(1, space.dim):
        c[k] = c[k - 1] * alpha / np.sqrt(k)
    deficit = max(0.0, 1.0 - float(np.vdot(c, c).real))
    return c, deficit


def coherent_state(alpha: complex, space: FockSpace,
                   max_deficit: float = COHERENT_DEFICIT_TOL) -> np.ndarray:
    """Density matrix of the coherent state |alpha> on a truncated space.

    The amplitudes are renormalized after truncation.  If the truncation
    would lose more than ``max_deficit`` probability mass the state is
    refused with a TruncationError carrying the achieved deficit.
    """
    c, deficit = coherent_amplitudes(alpha, space)
    if deficit > max_deficit:
        raise TruncationError(
            f"n_max={space.n_max} too small for |alpha|^2={abs(alpha)**2:.4g}: "
            f"truncation deficit {deficit:.3e} exceeds {max_deficit:.0e}",
            deficit=deficit,
        )
    c = c / np.linalg.norm(c)
    return density_matrix(np.outer(c, c.conj()))
