"""Worked examples and their closed-form matrices.

Qubit scenario: system and environment are qubits, the composite state is
sum_i p_i Pi_i (x) rho_E^i with Pi_1, Pi_2 the projections on the sigma_y
eigenvectors |+i>, |-i> and rho_E^i = diag(lam_plus_i, lam_minus_i).  The
interaction is the isotropic Heisenberg coupling, so the reduced maps depend
on time only through C = cos(2 omega t) and S = sin(2 omega t).

All analytic matrices are returned in the input-first layout (rows indexed by the
input matrix unit for Lambda, input factor first for Choi).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .analysis import PAULIS
from .linalg import dagger, expm_hermitian, kron
from .states import (
    CorrelatedClassSpec,
    NonOrthogonalDecomposition,
    OrthogonalDecomposition,
    ValidationError,
    spectral_decompose,
)

SQRT2 = np.sqrt(2.0)
KET_PLUS_I = np.array([1.0, 1.0j]) / SQRT2
KET_MINUS_I = np.array([1.0, -1.0j]) / SQRT2
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128)
NAMED_CASES = ("cesar", "jpa", "figure", "discordant-uniform")
# Bloch-sphere snapshots, in units of 2 omega t
FIGURE_TIMES = (0.0, np.pi / 8, np.pi / 4, 3 * np.pi / 8, np.pi / 2)


@dataclass(frozen=True)
class QubitScenarioParams:
    p1: float
    p2: float
    lam_plus_1: float
    lam_minus_1: float
    lam_plus_2: float
    lam_minus_2: float
    omega: float = 0.5

    def __post_init__(self):
        probs = (self.p1, self.p2)
        if min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-12:
            raise ValidationError("p1, p2 must form a probability distribution")
        for a, b in ((self.lam_plus_1, self.lam_minus_1), (self.lam_plus_2, self.lam_minus_2)):
            if min(a, b) < 0 or abs(a + b - 1.0) > 1e-12:
                raise ValidationError("environment eigenvalue pairs must be nonnegative and sum to 1")

    @classmethod
    def from_plus(cls, lam_plus_1: float, lam_plus_2: float, p1: float = 0.5,
                  omega: float = 0.5) -> "QubitScenarioParams":
        return cls(p1, 1.0 - p1, lam_plus_1, 1.0 - lam_plus_1, lam_plus_2, 1.0 - lam_plus_2, omega)

    def env_state(self, i: int) -> np.ndarray:
        if i == 1:
            return np.diag([self.lam_plus_1, self.lam_minus_1]).astype(np.complex128)
        return np.diag([self.lam_plus_2, self.lam_minus_2]).astype(np.complex128)


@dataclass(frozen=True)
class DerivedConstants:
    sigma_plus: float
    sigma_minus: float
    delta_plus: float
    delta_minus: float
    kappa_script_plus: float
    kappa_script_minus: float
    mu_plus: float
    mu_minus: float
    chi_plus: float
    chi_minus: float
    kappa_plus: float
    kappa_minus: float


@dataclass(frozen=True)
class JpaParams:
    """State 1/4 [1 (x) 1 + y sigma_y (x) 1 - chi sigma_y (x) sigma_z]."""

    y: float
    chi: float

    def __post_init__(self):
        y, chi = float(self.y), float(self.chi)
        if not abs(y) < 1:
            raise ValidationError("need |y| < 1")
        if chi * chi > 1 - y * y + 1e-15:
            raise ValidationError("need chi^2 <= 1 - y^2")
        # positivity of the composite state is the stronger condition
        if abs(y) + abs(chi) > 1 + 1e-15:
            raise ValidationError("need |y| + |chi| <= 1 for a positive state")

    @property
    def a_plus(self) -> float:
        return 0.5 * (self._root(+1) + self._root(-1))

    @property
    def a_minus(self) -> float:
        return 0.5 * (self._root(+1) - self._root(-1))

    @property
    def b(self) -> float:
        return self.chi / (1 - self.y ** 2)

    def _root(self, sign: int) -> float:
        val = (1 - (self.y + sign * self.chi) ** 2) / (1 - self.y ** 2)
        return float(np.sqrt(max(val, 0.0)))


def qubit_unitary(omega_t: float) -> np.ndarray:
    """prod_j [cos(wt) 1 (x) 1 - i sin(wt) sigma_j (x) sigma_j], j = x, y, z."""
    u = np.eye(4, dtype=np.complex128)
    for s in PAULIS:
        u = u @ (np.cos(omega_t) * np.eye(4) - 1j * np.sin(omega_t) * kron(s, s))
    return u


def qubit_unitary_swap_form(omega_t: float) -> np.ndarray:
    """cos(2wt) 1 - (i/2) sin(2wt) sum_{j=0..3} sigma_j (x) sigma_j = C 1 - i S SWAP."""
    total = np.eye(4, dtype=np.complex128) + sum(kron(s, s) for s in PAULIS)
    return np.cos(2 * omega_t) * np.eye(4) - 0.5j * np.sin(2 * omega_t) * total


def align_phase(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return ``a`` times the global phase that matches it to ``b``.

    The phase is read off the largest-magnitude entry of ``b``.
    """
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[k]) == 0:
        return a
    return a * (b[k] / a[k]) / abs(b[k] / a[k])


def phase_aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(align_phase(a, b) - b))


def derived_constants(p: QubitScenarioParams) -> DerivedConstants:
    rp1, rm1 = np.sqrt(p.lam_plus_1), np.sqrt(p.lam_minus_1)
    rp2, rm2 = np.sqrt(p.lam_plus_2), np.sqrt(p.lam_minus_2)
    sp, sm = (rp1 + rp2) / 2, (rm1 + rm2) / 2
    dp, dm = (rp1 - rp2) / 2, (rm1 - rm2) / 2
    return DerivedConstants(
        sigma_plus=sp, sigma_minus=sm, delta_plus=dp, delta_minus=dm,
        kappa_script_plus=sp * dp, kappa_script_minus=sm * dm,
        mu_plus=sp ** 2 + dp ** 2, mu_minus=sm ** 2 + dm ** 2,
        chi_plus=sp ** 2 + sm ** 2, chi_minus=sp ** 2 - sm ** 2,
        kappa_plus=dp ** 2 + dm ** 2, kappa_minus=dp ** 2 - dm ** 2,
    )


def _cs(p: QubitScenarioParams, t: float):
    return np.cos(2 * p.omega * t), np.sin(2 * p.omega * t)


def analytic_lambda_phi1(p: QubitScenarioParams, t: float) -> np.ndarray:
    C, S = _cs(p, t)
    k = derived_constants(p)
    vk = k.kappa_script_minus - k.kappa_script_plus
    dmu = k.mu_plus - k.mu_minus
    kp, km = k.kappa_script_plus, k.kappa_script_minus
    return 0.5 * np.array([
        [C * C + 2 * S * S * k.mu_plus, 2 * S * C * vk, 2 * S * C * vk, C * C + 2 * S * S * k.mu_minus],
        [4j * S * S * kp, C * C - 1j * C * S * dmu, -C * C - 1j * C * S * dmu, 4j * S * S * km],
        [-4j * S * S * kp, -C * C + 1j * C * S * dmu, C * C + 1j * C * S * dmu, -4j * S * S * km],
        [C * C + 2 * S * S * k.mu_plus, 2 * S * C * vk, 2 * S * C * vk, C * C + 2 * S * S * k.mu_minus],
    ])


def analytic_lambda_phi2(p: QubitScenarioParams, t: float) -> np.ndarray:
    C, S = _cs(p, t)
    k = derived_constants(p)
    vk = k.kappa_script_minus - k.kappa_script_plus
    kp, km = k.kappa_script_plus, k.kappa_script_minus
    return np.array([
        [C * C * k.chi_plus + S * S * k.mu_plus, S * C * vk, S * C * vk, C * C * k.kappa_plus + S * S * k.mu_minus],
        [2j * S * S * kp, C * C * k.chi_plus - 1j * C * S * k.chi_minus,
         -C * C * k.kappa_plus - 1j * C * S * k.kappa_minus, 2j * S * S * km],
        [-2j * S * S * kp, -C * C * k.kappa_plus + 1j * C * S * k.kappa_minus,
         C * C * k.chi_plus + 1j * C * S * k.chi_minus, -2j * S * S * km],
        [C * C * k.kappa_plus + S * S * k.mu_plus, S * C * vk, S * C * vk, C * C * k.chi_plus + S * S * k.mu_minus],
    ])


def analytic_choi_phi1(p: QubitScenarioParams, t: float) -> np.ndarray:
    C, S = _cs(p, t)
    k = derived_constants(p)
    vk = k.kappa_script_minus - k.kappa_script_plus
    dmu = k.mu_plus - k.mu_minus
    kp, km = k.kappa_script_plus, k.kappa_script_minus
    return 0.5 * np.array([
        [C * C + 2 * S * S * k.mu_plus, 2 * S * C * vk, 4j * S * S * kp, C * C - 1j * C * S * dmu],
        [2 * S * C * vk, C * C + 2 * S * S * k.mu_minus, -C * C - 1j * C * S * dmu, 4j * S * S * km],
        [-4j * S * S * kp, -C * C + 1j * C * S * dmu, C * C + 2 * S * S * k.mu_plus, 2 * S * C * vk],
        [C * C + 1j * C * S * dmu, -4j * S * S * km, 2 * S * C * vk, C * C + 2 * S * S * k.mu_minus],
    ])


def analytic_choi_phi2(p: QubitScenarioParams, t: float) -> np.ndarray:
    C, S = _cs(p, t)
    k = derived_constants(p)
    vk = k.kappa_script_minus - k.kappa_script_plus
    kp, km = k.kappa_script_plus, k.kappa_script_minus
    return np.array([
        [C * C * k.chi_plus + S * S * k.mu_plus, S * C * vk, 2j * S * S * kp,
         C * C * k.chi_plus - 1j * C * S * k.chi_minus],
        [S * C * vk, C * C * k.kappa_plus + S * S * k.mu_minus,
         -C * C * k.kappa_plus - 1j * C * S * k.kappa_minus, 2j * S * S * km],
        [-2j * S * S * kp, -C * C * k.kappa_plus + 1j * C * S * k.kappa_minus,
         C * C * k.kappa_plus + S * S * k.mu_plus, S * C * vk],
        [C * C * k.chi_plus + 1j * C * S * k.chi_minus, -2j * S * S * km, S * C * vk,
         C * C * k.chi_plus + S * S * k.mu_minus],
    ])


def jpa_choi(j: JpaParams, t: float, omega: float = 0.5) -> np.ndarray:
    C, S = np.cos(2 * omega * t), np.sin(2 * omega * t)
    ap, am, b, y = j.a_plus, j.a_minus, j.b, j.y
    c2, s2, cs = C * C, S * S, C * S
    return 0.5 * np.array([
        [c2 * (1 + ap) + s2 * (1 + y * b), cs * b, -1j * s2 * b, c2 * (1 + ap) - 1j * cs * (y * b - am)],
        [cs * b, c2 * (1 - ap) + s2 * (1 - y * b), -c2 * (1 - ap) - 1j * cs * (y * b + am), 1j * s2 * b],
        [1j * s2 * b, -c2 * (1 - ap) + 1j * cs * (y * b + am), c2 * (1 - ap) + s2 * (1 + y * b), cs * b],
        [c2 * (1 + ap) + 1j * cs * (y * b - am), -1j * s2 * b, cs * b, c2 * (1 + ap) + s2 * (1 - y * b)],
    ])


def qubit_params_from_jpa(j: JpaParams, omega: float = 0.5) -> QubitScenarioParams:
    """Map (y, chi) onto the qubit scenario; p1 = (1 + y)/2 is the weight of Pi_1."""
    y, chi = j.y, j.chi
    return QubitScenarioParams(
        (1 + y) / 2, (1 - y) / 2,
        0.5 * (1 - chi / (1 + y)), 0.5 * (1 + chi / (1 + y)),
        0.5 * (1 + chi / (1 - y)), 0.5 * (1 - chi / (1 - y)),
        omega,
    )


def jpa_state(j: JpaParams) -> np.ndarray:
    sx, sy, sz = PAULIS
    eye = np.eye(2)
    return 0.25 * (kron(eye, eye) + j.y * kron(sy, eye) - j.chi * kron(sy, sz))


def qubit_class_spec(p: QubitScenarioParams) -> CorrelatedClassSpec:
    """n = d = 2: one pure projection |+i> and a pure W = |-i><-i|."""
    return CorrelatedClassSpec(
        n=2, d=2, p=np.array([p.p1, p.p2]),
        phi=KET_PLUS_I.reshape(2, 1),
        w_block=OrthogonalDecomposition(np.array([1.0]), KET_MINUS_I.reshape(2, 1)),
        rho_env=(p.env_state(1),), varrho_env=(p.env_state(2),),
    )


def qubit_class_spec_mixed_w(p: QubitScenarioParams) -> CorrelatedClassSpec:
    """Same composite state written with d = 1 and W = p1 Pi_1 + p2 Pi_2."""
    if min(p.p1, p.p2) <= 0:
        raise ValidationError("the d = 1 form needs both p1, p2 > 0")
    return CorrelatedClassSpec(
        n=2, d=1, p=np.array([1.0]), phi=np.zeros((2, 0)),
        w_block=OrthogonalDecomposition(np.array([p.p1, p.p2]), np.column_stack([KET_PLUS_I, KET_MINUS_I])),
        varrho_env=(p.env_state(1), p.env_state(2)),
    )


def _default_env_states(count: int) -> list:
    return [np.diag([(i + 1) / (count + 1), 1 - (i + 1) / (count + 1)]).astype(np.complex128)
            for i in range(count)]


def discordant_spec(n: int, mu, p=None, rho_env=None, varrho_env=None) -> CorrelatedClassSpec:
    """Class-II spec with psi = (|0>, |1>, |+>) on the last two basis directions of C^n.

    The first n-2 computational basis vectors carry the pure projections.  The
    class probabilities default to uniform and the environment states to
    distinct diagonal qubit states.
    """
    if n < 2:
        raise ValidationError("need n >= 2")
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (3,):
        raise ValidationError("mu must have three entries")
    d = n - 1
    e = np.eye(n, dtype=np.complex128)
    zero, one = e[:, n - 2], e[:, n - 1]
    psi = np.column_stack([zero, one, (zero + one) / SQRT2])
    nonortho = NonOrthogonalDecomposition(mu, psi)
    ortho = spectral_decompose(nonortho.assemble())
    envs = _default_env_states(d - 1 + 3)
    return CorrelatedClassSpec(
        n=n, d=d,
        p=np.full(d, 1.0 / d) if p is None else np.asarray(p, dtype=float),
        phi=e[:, : n - 2],
        w_block=ortho, psi_block=nonortho,
        rho_env=tuple(envs[: d - 1]) if rho_env is None else tuple(rho_env),
        varrho_env=tuple(envs[d - 1:]) if varrho_env is None else tuple(varrho_env),
    )


UNIFORM_DISCORDANT_LAMBDA = ((0.25, 0.5), (0.25, 0.5), (0.5, 0.0))


def uniform_discordant_k_operators(n: int) -> dict:
    """Closed-form K_jk for ``discordant_spec(n, [1/3, 1/3, 1/3])``, keyed "K<j><k>".

    j runs over the eigenvectors |+>, |-> of W and k over psi = |0>, |1>, |+>
    (all inside the last two basis vectors of C^n).
    """
    e = np.eye(n, dtype=np.complex128)
    k0, k1 = e[:, n - 2], e[:, n - 1]
    kp, km = (k0 + k1) / SQRT2, (k0 - k1) / SQRT2
    return {
        "K+0": np.sqrt(1 / 4) * np.outer(k0, kp), "K+1": np.sqrt(1 / 4) * np.outer(k1, kp),
        "K++": np.sqrt(1 / 2) * np.outer(kp, kp),
        "K-0": np.sqrt(1 / 2) * np.outer(k0, km), "K-1": np.sqrt(1 / 2) * np.outer(k1, km),
        "K-+": np.zeros((n, n), dtype=np.complex128),
    }


@dataclass(frozen=True)
class Scenario:
    """A class spec plus a time-dependent composite unitary.

    ``unitary(tau)`` takes the dimensionless time tau = 2 omega t.
    """

    name: str
    spec: CorrelatedClassSpec
    unitary: Callable[[float], np.ndarray]
    qubit: Optional[QubitScenarioParams] = None
    jpa: Optional[JpaParams] = None


def qubit_scenario(name: str, p: QubitScenarioParams, jpa: Optional[JpaParams] = None) -> Scenario:
    return Scenario(name, qubit_class_spec(p), lambda tau: qubit_unitary(tau / 2), p, jpa)


def random_hamiltonian(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + dagger(g))


def hamiltonian_scenario(name: str, spec: CorrelatedClassSpec, h: np.ndarray) -> Scenario:
    return Scenario(name, spec, lambda tau: expm_hermitian(h, tau))


FIGURE_JPA = JpaParams(0.2, -0.4)
DEFAULT_JPA = JpaParams(0.3, 0.5)
CESAR_PARAMS = QubitScenarioParams(0.6, 0.4, 0.9, 0.1, 0.3, 0.7)
DISCORDANT_SEED = 20170101


def named_case(name: str) -> Scenario:
    if name == "cesar":
        return qubit_scenario(name, CESAR_PARAMS)
    if name in ("jpa", "figure"):
        j = FIGURE_JPA if name == "figure" else DEFAULT_JPA
        return qubit_scenario(name, qubit_params_from_jpa(j), j)
    if name == "discordant-uniform":
        spec = discordant_spec(3, [1 / 3, 1 / 3, 1 / 3])
        return hamiltonian_scenario(name, spec, random_hamiltonian(spec.n * spec.dim_e, DISCORDANT_SEED))
    raise KeyError(f"unknown case {name!r}; known cases: {', '.join(NAMED_CASES)}")
