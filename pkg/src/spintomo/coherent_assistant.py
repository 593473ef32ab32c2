"""Coherent-light assistant: closed-form dynamics and reconstruction.

The unknown spin is coupled resonantly to a single field mode prepared in
a coherent state |alpha> (Jaynes-Cummings interaction, coupling gamma,
frequency omega).  The commuting triplet

    sigma_x,   a^dag a,   a^dag a sigma_x

is measured at time t; its expectation values are an affine function of
the initial Bloch vector,

    y(t) = M(t) x0 + b(t),    x0 = (<sx(0)>, <sy(0)>, <sz(0)>),

with M and b given by Poisson-weighted sums of trigonometric
coefficients over the photon number.  This module evaluates those closed
forms, assembles the reconstruction system, tracks its determinant
Delta(t) = det M(t), and inverts measured triples back to x0.

All closed forms here are validated against the brute-force
matrix-exponential reference in the oracle module; the dedicated test
suite pins the agreement to ~1e-7 relative or better.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    FockSpace,
    IllConditionedError,
    TruncationError,
    poisson_weights,
)

__all__ = [
    "POISSON_TAIL_TOL",
    "JCParams",
    "ExpectationTriple",
    "DressedCoefficients",
    "DressedBasis",
    "evolution_coefficients",
    "dressed_basis",
    "coefficient_matrix",
    "coefficient_offsets",
    "ReconstructionSystem",
    "reconstruction_system",
    "determinant_series",
    "determinant_triple_sum",
    "expectations_analytic",
    "reconstruct_initial",
    "RankReport",
    "singular_triplet_check",
]

# Poisson mass allowed beyond the series truncation level.
POISSON_TAIL_TOL = 1e-8
DEFAULT_N_MAX = 30


def poisson_tail(alpha_sq: float, n_max: int) -> float:
    """Poisson probability mass beyond n_max for mean alpha_sq."""
    return max(0.0, 1.0 - float(poisson_weights(alpha_sq, n_max).sum()))


@dataclass(frozen=True)
class JCParams:
    """Configuration of the coherent-assistant model.

    gamma : coupling constant (rad/time), > 0
    omega : mode and spin frequency (rad/time), >= 0 (resonant model)
    alpha : coherent amplitude; mean photon number is |alpha|^2
    n_max : photon-number truncation of all series

    Construction refuses truncations that leave more than
    POISSON_TAIL_TOL of the Poisson weight above n_max; use
    JCParams.auto() to have n_max raised automatically.
    """

    gamma: float
    omega: float
    alpha: complex
    n_max: int = DEFAULT_N_MAX

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.omega < 0:
            raise ValueError("omega must be non-negative")
        if self.n_max < 1:
            raise ValueError("n_max must be a positive integer")
        tail = poisson_tail(self.alpha_sq, self.n_max)
        if tail > POISSON_TAIL_TOL:
            raise TruncationError(
                f"n_max={self.n_max} keeps only 1-{tail:.3e} of the Poisson "
                f"weight for |alpha|^2={self.alpha_sq:.4g}; raise n_max",
                deficit=tail,
            )

    @property
    def alpha_sq(self) -> float:
        return float(abs(self.alpha) ** 2)

    @classmethod
    def auto(cls, gamma: float, omega: float, alpha: complex,
             start: int = DEFAULT_N_MAX) -> "JCParams":
        """Build params with n_max raised from ``start`` until the Poisson
        tail beyond it drops under POISSON_TAIL_TOL."""
        n_max = start
        while poisson_tail(abs(alpha) ** 2, n_max) > POISSON_TAIL_TOL:
            n_max += 1
        return cls(gamma=gamma, omega=omega, alpha=alpha, n_max=n_max)


@dataclass(frozen=True)
class ExpectationTriple:
    """Measured triple (<sigma_x>, <a^dag a>, <a^dag a sigma_x>) at one time."""

    sx: float
    n_phot: float
    nsx: float

    def as_array(self) -> np.ndarray:
        return np.array([self.sx, self.n_phot, self.nsx])


@dataclass(frozen=True)
class DressedCoefficients:
    """Closed-form evolution coefficients of dressed mode n at time t.

    f_plus/f_minus = exp(i(+/- gamma sqrt(n) - omega) t) are pure phases;
    s = i sin(gamma sqrt(n+1) t)/sqrt(n+1) is purely imaginary;
    g_plus/g_minus = cos(gamma sqrt(n+1) t) +/- sqrt(n) s.
    """

    n: int
    f_plus: complex
    f_minus: complex
    s: complex
    g_plus: complex
    g_minus: complex


def evolution_coefficients(n: int, t: float, params: JCParams) -> DressedCoefficients:
    if n < 0:
        raise ValueError("n must be non-negative")
    g, w = params.gamma, params.omega
    root_n = np.sqrt(n)
    root_n1 = np.sqrt(n + 1)
    s = 1j * np.sin(g * root_n1 * t) / root_n1
    cos1 = np.cos(g * root_n1 * t)
    return DressedCoefficients(
        n=n,
        f_plus=np.exp(1j * (g * root_n - w) * t),
        f_minus=np.exp(1j * (-g * root_n - w) * t),
        s=s,
        g_plus=cos1 + root_n * s,
        g_minus=cos1 - root_n * s,
    )


@dataclass(frozen=True)
class DressedBasis:
    """Joint eigenbasis of the interaction operator on a truncated space.

    vectors[:, j] is the j-th basis vector; labels[j] = (n, sign) with sign
    +1/-1 for the split doublets, 0 for the n = 0 ground vector and 0 for
    the unpaired top state left over by truncation (labelled n_max + 1).
    v_eigenvalues and k_eigenvalues give the action of the interaction
    operator and of sqrt(N + 1) on each vector; for the top state the
    truncated interaction operator annihilates it.
    """

    space: FockSpace
    vectors: np.ndarray
    labels: tuple[tuple[int, int], ...]
    v_eigenvalues: np.ndarray
    k_eigenvalues: np.ndarray


def dressed_basis(space: FockSpace) -> DressedBasis:
    """Orthonormal basis { (|+,n-1> +/- |-,n>)/sqrt(2), |-,0>, |+,n_max> }.

    Spin factor slow, photon factor fast.  The doublet with label (n, +/-)
    has interaction eigenvalue +/- sqrt(n); |-,0> has eigenvalue 0; the
    top product state |+, n_max> is kept so the basis is complete on the
    truncated space.
    """
    dim_f = space.dim
    dim = 2 * dim_f

    def product(spin: int, k: int) -> np.ndarray:
        vec = np.zeros(dim, dtype=complex)
        vec[spin * dim_f + k] = 1.0  # spin 0 = up, 1 = down
        return vec

    columns = [product(1, 0)]
    labels: list[tuple[int, int]] = [(0, 0)]
    v_eigs = [0.0]
    k_eigs = [1.0]
    for n in range(1, space.n_max + 1):
        up = product(0, n - 1)
        down = product(1, n)
        for sign in (+1, -1):
            columns.append((up + sign * down) / np.sqrt(2.0))
            labels.append((n, sign))
            v_eigs.append(sign * np.sqrt(n))
            k_eigs.append(np.sqrt(n + 1))
    # unpaired |+, n_max>: its partner |-, n_max+1> is truncated away
    columns.append(product(0, space.n_max))
    labels.append((space.n_max + 1, 0))
    v_eigs.append(0.0)
    k_eigs.append(np.sqrt(space.n_max + 2))
    return DressedBasis(
        space=space,
        vectors=np.column_stack(columns),
        labels=tuple(labels),
        v_eigenvalues=np.array(v_eigs),
        k_eigenvalues=np.array(k_eigs),
    )


def _trig_tables(t: float, params: JCParams) -> dict:
    """sin/cos of gamma sqrt(j) t for j = 0..n_max+1 plus Poisson weights."""
    n = np.arange(params.n_max + 1)
    root = np.sqrt(np.arange(params.n_max + 2))
    angles = params.gamma * root * t
    return {
        "n": n,
        "p": poisson_weights(params.alpha_sq, params.n_max),
        "sin": np.sin(angles),   # sin[j] = sin(gamma sqrt(j) t)
        "cos": np.cos(angles),
        "phase": np.exp(1j * params.omega * t),
    }


def _coefficient_arrays(t: float, params: JCParams) -> tuple[np.ndarray, np.ndarray]:
    """Per-photon-number coefficient matrices A(n) and offsets d(n).

    Returns (a, d) with a of shape (3, 3, n_max+1) and d of shape
    (3, n_max+1).  Row i of a(., ., n) carries the coefficients of the
    initial-spin variables (lambda_1, conj(lambda_2), lambda_2) in the
    expectation value of the i-th operator of the measured triplet taken
    in raising-operator form (sigma_+, a^dag a, a^dag a sigma_+), where
    lambda_1 = (1 + <sz(0)>)/2 and lambda_2 = <sigma_+(0)>; d(n) is the
    variable-independent term.  Row 3 is n times row 1, an exact identity
    of the dynamics.
    """
    tab = _trig_tables(t, params)
    n = tab["n"]
    s, c = tab["sin"], tab["cos"]
    w = tab["phase"]
    alpha = params.alpha
    asq = params.alpha_sq
    ac = np.conj(alpha)
    rn = np.sqrt(n)
    rn1 = np.sqrt(n + 1.0)
    s_n, c_n = s[:-1], c[:-1]          # at sqrt(n)
    s_n1, c_n1 = s[1:], c[1:]          # at sqrt(n+1)

    a = np.zeros((3, 3, params.n_max + 1), dtype=complex)
    d = np.zeros((3, params.n_max + 1), dtype=complex)

    a[0, 0] = -1j * (w / alpha) * (rn * c_n1 * s_n + asq * c_n * s_n1 / rn1)
    a[0, 1] = (ac / alpha) * w * (rn / rn1) * s_n1 * s_n
    a[0, 2] = w * c_n1 * c_n
    d[0] = 1j * ac * w * s_n1 * c_n / rn1

    a[1, 0] = ((1 + 2 * n) * (1 + n - asq)
               - (1 + n + asq) * np.cos(2 * params.gamma * rn1 * t)) / (2 * (n + 1))
    a[1, 1] = -1j * ac * c_n1 * s_n1 / rn1
    a[1, 2] = np.conj(a[1, 1])
    d[1] = asq * (c_n1 ** 2 + n * s_n1 ** 2 / (n + 1))

    a[2] = n * a[0]
    d[2] = n * d[0]
    return a, d


def coefficient_matrix(n: int, t: float, params: JCParams) -> np.ndarray:
    """Per-photon-number 3x3 coefficient matrix A(n); see _coefficient_arrays.

    Rows 1 and 3 carry 1/alpha factors, so a vanishing coherent amplitude
    is rejected.
    """
    if params.alpha == 0:
        raise ValueError("coefficient matrix requires a nonzero coherent amplitude")
    if not 0 <= n <= params.n_max:
        raise ValueError(f"n must lie in 0..{params.n_max}")
    a, _ = _coefficient_arrays(t, params)
    return a[:, :, n].copy()


def coefficient_offsets(n: int, t: float, params: JCParams) -> np.ndarray:
    """Per-photon-number offset column d(n); see _coefficient_arrays."""
    if params.alpha == 0:
        raise ValueError("coefficient offsets require a nonzero coherent amplitude")
    if not 0 <= n <= params.n_max:
        raise ValueError(f"n must lie in 0..{params.n_max}")
    _, d = _coefficient_arrays(t, params)
    return d[:, n].copy()


def _row_to_real(a_row: np.ndarray, d_row: complex, doubled: bool) -> tuple[np.ndarray, float]:
    """Convert one complex coefficient row into real (x, y, z) form.

    The measured rows 1 and 3 are 2 Re of the raising-operator rows
    (doubled=True); the photon-number row is real as it stands.
    Columns of the output multiply (<sx(0)>, <sy(0)>, <sz(0)>).
    """
    a1, a2, a3 = a_row
    if doubled:
        row = np.array([(a2 + a3).real, (a2 - a3).imag, a1.real])
        offset = float(a1.real + 2 * d_row.real)
    else:
        row = np.array([((a2 + a3) / 2).real, ((1j * (a3 - a2)) / 2).real, (a1 / 2).real])
        offset = float((a1 / 2 + d_row).real)
    return row, offset


@dataclass(frozen=True)
class ReconstructionSystem:
    """Affine system y = M x0 + b linking the measured triple at time t to
    the initial Bloch vector, plus its determinant."""

    matrix: np.ndarray
    offset: np.ndarray
    t: float
    params: JCParams
    determinant: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "determinant", float(np.linalg.det(self.matrix)))


def reconstruction_system(t: float, params: JCParams) -> ReconstructionSystem:
    """Assemble M(t) and b(t) from the Poisson-summed coefficient arrays."""
    if params.alpha == 0:
        raise ValueError("the scheme requires a nonzero coherent amplitude")
    a, d = _coefficient_arrays(t, params)
    p = poisson_weights(params.alpha_sq, params.n_max)
    a_hat = a @ p          # (3, 3) summed coefficients
    d_hat = d @ p          # (3,)
    m = np.zeros((3, 3))
    b = np.zeros(3)
    for i in range(3):
        m[i], b[i] = _row_to_real(a_hat[i], d_hat[i], doubled=(i != 1))
    return ReconstructionSystem(matrix=m, offset=b, t=float(t), params=params)


def determinant_series(t_grid, params: JCParams) -> np.ndarray:
    """Delta(t) = det M(t) evaluated on a time grid."""
    return np.array([reconstruction_system(float(t), params).determinant
                     for t in np.asarray(t_grid, dtype=float)])


def determinant_triple_sum(t: float, params: JCParams) -> float:
    """Delta(t) recomputed as the triple Poisson-weighted sum

        sum_{l,m,n} p_l p_m p_n eps_ijk M_1i(l) M_2j(m) M_3k(n),

    expanding the determinant by multilinearity over the per-photon-number
    rows.  Cross-check for reconstruction_system; algebraically identical
    but numerically independent of the summed-matrix path.
    """
    a, d = _coefficient_arrays(t, params)
    p = poisson_weights(params.alpha_sq, params.n_max)
    rows = []
    for i in range(3):
        per_n = np.empty((params.n_max + 1, 3))
        for n in range(params.n_max + 1):
            per_n[n], _ = _row_to_real(a[i, :, n], d[i, n], doubled=(i != 1))
        rows.append(per_n * p[:, None])
    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k] = 1.0
        eps[i, k, j] = -1.0
    return float(np.einsum("li,mj,nk,ijk->", rows[0], rows[1], rows[2], eps))


def expectations_analytic(t: float, params: JCParams, rho0) -> ExpectationTriple:
    """Closed-form expectation triple at time t for initial Bloch vector rho0.

    Evaluated through the complex variables lambda_1 = (1 + <sz>)/2 and
    lambda_2 = (<sx> + i <sy>)/2, taking 2 Re of the raising-operator rows;
    agrees with reconstruction_system's M x + b arrangement to solver
    precision and with the brute-force reference to truncation precision.
    """
    if params.alpha == 0:
        raise ValueError("the scheme requires a nonzero coherent amplitude")
    rho0 = np.asarray(rho0, dtype=float)
    if rho0 @ rho0 > 1.0 + 1e-12:
        raise ValueError(f"Bloch vector norm {np.linalg.norm(rho0):.6f} exceeds 1")
    a, d = _coefficient_arrays(t, params)
    p = poisson_weights(params.alpha_sq, params.n_max)
    a_hat = a @ p
    d_hat = d @ p
    lam1 = 0.5 * (1.0 + rho0[2])
    lam2 = 0.5 * (rho0[0] + 1j * rho0[1])
    values = a_hat @ np.array([lam1, np.conj(lam2), lam2]) + d_hat
    return ExpectationTriple(
        sx=float(2 * values[0].real),
        n_phot=float(values[1].real),
        nsx=float(2 * values[2].real),
    )


def reconstruct_initial(triple: ExpectationTriple, system: ReconstructionSystem,
                        det_floor: float = 1e-6) -> tuple[np.ndarray, float]:
    """Solve M x0 = y - b for the initial Bloch vector.

    Returns (x0, condition_number).  Raises IllConditionedError carrying
    the determinant when |det M| <= det_floor; pick a measurement time
    with a large |Delta(t)| instead.
    """
    if abs(system.determinant) <= det_floor:
        raise IllConditionedError(
            f"|Delta(t={system.t:g})| = {abs(system.determinant):.3e} at or below "
            f"floor {det_floor:.0e}", determinant=system.determinant)
    y = triple.as_array() if isinstance(triple, ExpectationTriple) else np.asarray(triple, dtype=float)
    x0 = np.linalg.solve(system.matrix, y - system.offset)
    return x0, float(np.linalg.cond(system.matrix))


@dataclass(frozen=True)
class RankReport:
    """Numerical rank of the sensitivity of a measured triplet to the
    initial Bloch vector."""

    triplet: str
    t: float
    singular_values: np.ndarray
    tol: float

    @property
    def rank(self) -> int:
        return int((self.singular_values > self.tol).sum())


def singular_triplet_check(t: float, params: JCParams, triplet: str = "z",
                           tol: float = 1e-8, padding: int = 12) -> RankReport:
    """Rank of the 3x3 sensitivity of (<s_i>, <n>, <n s_i>) to rho0.

    ``triplet`` selects the spin component i ('x' or 'z').  The
    sensitivity columns are obtained from the brute-force reference by
    probing the three Bloch axes (the map is exactly affine, so the probe
    is exact).  The z triplet is singular at all times - those three
    observables cannot determine the full initial state - while the x
    triplet has full rank wherever Delta(t) is away from zero.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    from . import oracle  # deferred: oracle imports this module's types

    m, _ = oracle.expectation_map(t, params, triplet=triplet, padding=padding)
    singular_values = np.linalg.svd(m, compute_uv=False)
    return RankReport(triplet=triplet, t=float(t),
                      singular_values=singular_values, tol=tol)
