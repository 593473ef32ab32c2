"""Two-spin reconstruction scheme.

A second spin-1/2 in a known pure state is coupled to the unknown spin
for a fixed interaction time, after which the z components of both spins
are measured jointly.  The four joint outcome probabilities are an affine
function of the unknown Bloch vector,

    P_alpha = u_alpha + v_alpha . rho,    alpha in {++, +-, -+, --},

and the scheme is characterized by the coefficients (u_alpha, v_alpha).
The quality of the inversion is governed by the transformation
determinant Delta = 4 v_++ . (v_+- x v_-+); its maximum over all unitary
couplings is 1/(12 sqrt(3)), reached when the four v_alpha form a regular
tetrahedron.  This module builds the coupling Hamiltonian that attains
the optimum, evaluates forward probabilities, and inverts them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    IDENTITY_2,
    PROJECTOR_DOWN,
    PROJECTOR_UP,
    IllConditionedError,
    dagger,
    hermitian_expm,
    pauli,
    tensor_product,
)

__all__ = [
    "PHI",
    "CHI",
    "TAU_OPTIMAL",
    "OPTIMAL_DETERMINANT",
    "ALPHA_LABELS",
    "MappingCoefficients",
    "SpinScheme",
    "triple_product_determinant",
    "optimal_hamiltonian",
    "ising_hamiltonian",
    "build_scheme",
    "synthetic_scheme",
    "optimal_scheme",
    "tetrahedron_coefficients",
    "forward_probabilities",
    "moment_system",
    "probabilities_to_moments",
    "reconstruct_bloch",
    "reconstruct_from_moments",
    "scheme_report",
]

# Half the angle between the first tetrahedron vector (1,1,1)/sqrt(3) and
# the z axis: cos(2*PHI) = 1/sqrt(3).
PHI = 0.5 * np.arccos(1.0 / np.sqrt(3.0))
# The optimal coupling squares to sin(CHI)^2 times the identity, with
# cos(CHI) = cos(PHI)/2; running it for TAU_OPTIMAL gives the evolution
# operator cos(CHI) - i H in closed form.
CHI = np.arccos(np.cos(PHI) / 2.0)
TAU_OPTIMAL = CHI / np.sin(CHI)
OPTIMAL_DETERMINANT = 1.0 / (12.0 * np.sqrt(3.0))

# Joint outcome order: system sign slow, assistant sign fast.
ALPHA_LABELS = ((1, 1), (1, -1), (-1, 1), (-1, -1))

_CONSTRAINT_TOL = 1e-12


@dataclass(frozen=True)
class MappingCoefficients:
    """Affine map {u_alpha, v_alpha} from Bloch vector to joint probabilities.

    Any physically realizable map satisfies sum(u) = 1, sum(v) = 0 and
    u_alpha >= |v_alpha| (so probabilities stay in [0, 1] on the Bloch
    ball); violation means a construction bug and is a hard failure.
    """

    u: np.ndarray  # shape (4,)
    v: np.ndarray  # shape (4, 3)

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).reshape(4)
        v = np.asarray(self.v, dtype=float).reshape(4, 3)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        if abs(u.sum() - 1.0) > _CONSTRAINT_TOL:
            raise ValueError(f"sum of u_alpha = {u.sum()} != 1")
        if np.abs(v.sum(axis=0)).max() > _CONSTRAINT_TOL:
            raise ValueError(f"v_alpha do not sum to zero: {v.sum(axis=0)}")
        norms = np.linalg.norm(v, axis=1)
        if np.any(u < norms - _CONSTRAINT_TOL):
            raise ValueError(
                f"positivity violated: u = {u}, |v| = {norms}")

    @property
    def determinant(self) -> float:
        return triple_product_determinant(self.v)


@dataclass(frozen=True)
class SpinScheme:
    """A concrete two-spin measurement scheme.

    ``hamiltonian``/``tau``/``initial_assistant`` record how the map was
    realized and may be None for synthetic (directly specified) schemes.
    """

    coefficients: MappingCoefficients
    determinant: float
    hamiltonian: np.ndarray | None = None
    tau: float | None = None
    initial_assistant: np.ndarray | None = None
    assistant_projectors: tuple[np.ndarray, np.ndarray] | None = None


def triple_product_determinant(v: np.ndarray) -> float:
    """Transformation determinant 4 v_++ . (v_+- x v_-+).

    Equal to four times the signed volume of the parallelepiped spanned by
    the first three map vectors; antisymmetric under swapping any two of
    them.  Zero iff the vectors are coplanar, in which case the map cannot
    be inverted.
    """
    v = np.asarray(v, dtype=float)
    return float(4.0 * v[0] @ np.cross(v[1], v[2]))


def optimal_hamiltonian() -> np.ndarray:
    """Coupling Hamiltonian that attains the tetrahedron optimum.

    H = (1/sqrt(2)) sigma_x (s_x cos(PHI) + s_z sin(PHI))
        + 1/2 [(s_y - s_x) sin(PHI) + s_z cos(PHI)],

    acting on system (sigma) and assistant (s).  Squares to
    sin(CHI)^2 * identity, so exp(-i H TAU_OPTIMAL) = cos(CHI) - i H.
    """
    c, s = np.cos(PHI), np.sin(PHI)
    sx, sy, sz = pauli("x"), pauli("y"), pauli("z")
    h = (1.0 / np.sqrt(2.0)) * tensor_product(sx, c * sx + s * sz) \
        + 0.5 * tensor_product(IDENTITY_2, s * (sy - sx) + c * sz)
    return h


def ising_hamiltonian() -> tuple[np.ndarray, tuple[np.ndarray, np.ndarray], np.ndarray]:
    """Rotated-frame variant: Ising coupling plus a transverse field.

    H = (1/sqrt(2)) sigma_x s_x + 1/2 (s_y sin(PHI) + s_z).

    The rotation moves into the measured assistant axis: returns
    (hamiltonian, (proj_plus, proj_minus), initial_assistant) where the
    projectors are 1/2 (1 +/- s_z') with s_z' = s_x sin(PHI) + s_z cos(PHI)
    and the assistant starts in proj_plus.  Same spectrum and same optimal
    determinant as optimal_hamiltonian().
    """
    c, s = np.cos(PHI), np.sin(PHI)
    sx, sy, sz = pauli("x"), pauli("y"), pauli("z")
    h = (1.0 / np.sqrt(2.0)) * tensor_product(sx, sx) \
        + 0.5 * tensor_product(IDENTITY_2, s * sy + sz)
    sz_rot = s * sx + c * sz
    proj_plus = 0.5 * (IDENTITY_2 + sz_rot)
    proj_minus = 0.5 * (IDENTITY_2 - sz_rot)
    return h, (proj_plus, proj_minus), proj_plus


def build_scheme(hamiltonian: np.ndarray, tau: float, assistant_state: np.ndarray,
                 assistant_projectors: tuple[np.ndarray, np.ndarray] | None = None,
                 ) -> SpinScheme:
    """Evolve for time tau and extract the affine map of the joint measurement.

    u_alpha = 1/2 tr[U (1 (x) R) U^dag P_alpha] and
    v_alpha = 1/2 tr[U (sigma_k (x) R) U^dag P_alpha] with
    P_alpha = pi_i (x) p_a the product of the system sigma_z eigenprojectors
    and the assistant projectors (z basis unless overridden).

    The constraint set (normalization, zero-sum, positivity) is validated;
    a violation raises, it is never downgraded to a warning.
    """
    u_evo = hermitian_expm(hamiltonian, tau)
    if assistant_projectors is None:
        assistant_projectors = (PROJECTOR_UP.copy(), PROJECTOR_DOWN.copy())
    sys_projectors = (PROJECTOR_UP, PROJECTOR_DOWN)

    evolved_id = u_evo @ tensor_product(IDENTITY_2, assistant_state) @ dagger(u_evo)
    evolved_pauli = [
        u_evo @ tensor_product(pauli(ax), assistant_state) @ dagger(u_evo)
        for ax in "xyz"
    ]
    u = np.zeros(4)
    v = np.zeros((4, 3))
    idx = 0
    for pi in sys_projectors:
        for pa in assistant_projectors:
            joint = tensor_product(pi, pa)
            u[idx] = 0.5 * np.trace(evolved_id @ joint).real
            for k in range(3):
                v[idx, k] = 0.5 * np.trace(evolved_pauli[k] @ joint).real
            idx += 1
    coeffs = MappingCoefficients(u=u, v=v)
    return SpinScheme(
        coefficients=coeffs,
        determinant=coeffs.determinant,
        hamiltonian=np.asarray(hamiltonian, dtype=complex),
        tau=float(tau),
        initial_assistant=np.asarray(assistant_state, dtype=complex),
        assistant_projectors=tuple(np.asarray(p, dtype=complex) for p in assistant_projectors),
    )


def synthetic_scheme(coefficients: MappingCoefficients) -> SpinScheme:
    """Scheme specified directly by its map coefficients (no dynamics)."""
    return SpinScheme(coefficients=coefficients, determinant=coefficients.determinant)


def optimal_scheme() -> SpinScheme:
    """The optimal scheme: optimal_hamiltonian() run for TAU_OPTIMAL with the
    assistant prepared spin-up."""
    return build_scheme(optimal_hamiltonian(), TAU_OPTIMAL, PROJECTOR_UP.copy())


def tetrahedron_coefficients() -> MappingCoefficients:
    """The canonical regular-tetrahedron map: u_alpha = 1/4 and

        v_++ = (1,1,1)/(4 sqrt(3)),   v_+- = (-1,1,-1)/(4 sqrt(3)),
        v_-+ = (1,-1,-1)/(4 sqrt(3)), v_-- = (-1,-1,1)/(4 sqrt(3)).

    This is exactly the map realized by optimal_scheme().
    """
    v = np.array([[1, 1, 1], [-1, 1, -1], [1, -1, -1], [-1, -1, 1]],
                 dtype=float) / (4.0 * np.sqrt(3.0))
    return MappingCoefficients(u=np.full(4, 0.25), v=v)


def forward_probabilities(scheme: SpinScheme, bloch) -> np.ndarray:
    """Joint outcome probabilities P_alpha = u_alpha + v_alpha . rho.

    Ordered as ALPHA_LABELS.  Rejects unphysical Bloch vectors; the
    returned probabilities are clipped of sub-tolerance negative noise and
    sum to one.
    """
    bloch = np.asarray(bloch, dtype=float)
    if bloch @ bloch > 1.0 + 1e-12:
        raise ValueError(f"Bloch vector norm {np.linalg.norm(bloch):.6f} exceeds 1")
    p = scheme.coefficients.u + scheme.coefficients.v @ bloch
    if p.min() < -1e-12:
        raise RuntimeError(f"negative probability {p.min():.3e} from a valid scheme")
    return np.clip(p, 0.0, 1.0)


def moment_system(scheme: SpinScheme) -> tuple[np.ndarray, np.ndarray]:
    """Linear system in correlation coordinates.

    The signed sums m = (sum_a i_a P_a, sum_a a_a P_a, sum_a i_a a_a P_a)
    are the expectations of (system z, assistant z, their product) after
    the interaction; they relate to the unknown Bloch vector rho through
    m = T rho + c.  Returns (T, c).
    """
    signs = np.array([[i, a, i * a] for (i, a) in ALPHA_LABELS], dtype=float)
    t_mat = signs.T @ scheme.coefficients.v
    c = signs.T @ scheme.coefficients.u
    return t_mat, c


def probabilities_to_moments(probabilities) -> np.ndarray:
    p = np.asarray(probabilities, dtype=float).reshape(4)
    signs = np.array([[i, a, i * a] for (i, a) in ALPHA_LABELS], dtype=float)
    return signs.T @ p


def reconstruct_bloch(scheme: SpinScheme, probabilities,
                      det_floor: float = 1e-6) -> tuple[np.ndarray, float]:
    """Invert P_alpha = u_alpha + v_alpha . rho for rho.

    Solves the first three affine equations; the fourth is redundant for
    normalized data and is returned as a consistency residual
    P_-- - (u_-- + v_-- . rho) rather than enforced, since sampled
    frequencies need not satisfy it exactly.

    Raises IllConditionedError carrying the determinant when
    |Delta| <= det_floor.
    """
    p = np.asarray(probabilities, dtype=float).reshape(4)
    delta = scheme.determinant
    if abs(delta) <= det_floor:
        raise IllConditionedError(
            f"|Delta| = {abs(delta):.3e} at or below floor {det_floor:.0e}; "
            "the map cannot be inverted stably", determinant=delta)
    coeffs = scheme.coefficients
    rho = np.linalg.solve(coeffs.v[:3], p[:3] - coeffs.u[:3])
    residual = float(p[3] - (coeffs.u[3] + coeffs.v[3] @ rho))
    return rho, residual


def reconstruct_from_moments(scheme: SpinScheme, moments,
                             det_floor: float = 1e-6) -> np.ndarray:
    """Invert the correlation-coordinate system m = T rho + c.

    Agrees exactly with reconstruct_bloch on any probability vector that
    sums to one (the two solve the same rank-3 system in different
    coordinates).
    """
    delta = scheme.determinant
    if abs(delta) <= det_floor:
        raise IllConditionedError(
            f"|Delta| = {abs(delta):.3e} at or below floor {det_floor:.0e}",
            determinant=delta)
    t_mat, c = moment_system(scheme)
    return np.linalg.solve(t_mat, np.asarray(moments, dtype=float) - c)


def scheme_report(scheme: SpinScheme) -> dict:
    """Diagnostics of a scheme: weights, vector norms, pairwise cosines,
    determinant and the closed-form evolution constants."""
    coeffs = scheme.coefficients
    norms = np.linalg.norm(coeffs.v, axis=1)
    cosines = {}
    for a in range(4):
        for b in range(a + 1, 4):
            if norms[a] > 1e-15 and norms[b] > 1e-15:
                key = f"{_label(a)},{_label(b)}"
                cosines[key] = float(coeffs.v[a] @ coeffs.v[b] / (norms[a] * norms[b]))
    return {
        "u": coeffs.u.tolist(),
        "v_norms": norms.tolist(),
        "pairwise_cosines": cosines,
        "determinant": float(scheme.determinant),
        "optimal_determinant": float(OPTIMAL_DETERMINANT),
        "phi": float(PHI),
        "chi": float(CHI),
        "tau_optimal": float(TAU_OPTIMAL),
        "determinant_formula": "4 v_++ . (v_+- x v_-+)",
    }


def _label(idx: int) -> str:
    i, a = ALPHA_LABELS[idx]
    return ("+" if i > 0 else "-") + ("+" if a > 0 else "-")
