"""Kraus representations of reduced dynamical maps built from correlated classes.

Given a class spec and a composite unitary U on H_S (x) H_E the constructions
here produce Kraus sets whose action on the compatibility domain reproduces
Tr_E[U rho_SE U^dagger] exactly, and which extend completely positively to all
system states:

* ``phiII`` - class II, operators sqrt(l) <g|U|a> Pi_phi_i and sqrt(e) <g|U|b> K_jk
* ``phi1``  - class I, operators sqrt(l) <g|U|a> Pi_phi_i over the full basis
* ``phi2``  - class I, coherent sum over the basis, M_ga = sum_i <g|U (1 (x) sqrt(rho_i))|a> Pi_i
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import (
    DimensionError,
    as_matrix,
    as_vector,
    check_unitary,
    dagger,
    hermitian_eig,
    kron,
    partial_trace_env,
    projector,
    psd_sqrt,
)
from .states import (
    CorrelatedClassSpec,
    GhjwLink,
    NonOrthogonalDecomposition,
    OrthogonalDecomposition,
    ValidationError,
    density_matrix,
    ghjw_link,
    marginal,
)

TP_TOL = 1e-10
ENV_CUTOFF = 1e-14
LABELS = ("phiI", "phiII", "phi1", "phi2", "custom", "identity")


@dataclass(frozen=True)
class KrausSet:
    operators: tuple
    label: str = "custom"
    time_tag: float = 0.0

    def __post_init__(self):
        ops = tuple(as_matrix(m) for m in self.operators)
        if not ops:
            raise ValidationError("a Kraus set needs at least one operator")
        n = ops[0].shape[0]
        if any(m.shape != (n, n) for m in ops):
            raise DimensionError("Kraus operators must all be square of the same size")
        if self.label not in LABELS:
            raise ValueError(f"unknown Kraus set label {self.label!r}")
        object.__setattr__(self, "operators", ops)
        defect = self.tp_defect()
        if defect > TP_TOL:
            raise ValidationError(f"Kraus set is not trace preserving (defect {defect:.3e})")

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)

    def tp_defect(self) -> float:
        s = sum(dagger(m) @ m for m in self.operators)
        return float(np.linalg.norm(s - np.eye(s.shape[0])))


@dataclass(frozen=True)
class InvariantPovm:
    """Effects {Pi_phi_i, K_jk^dagger K_jk} and the K_jk themselves.

    ``kraus_k[j, k]`` is K_jk; ``projectors`` are the pure-state projections
    (plus a null-space projector when W and the phi_i do not span H_S).
    """

    projectors: tuple
    kraus_k: np.ndarray

    def __post_init__(self):
        defect = self.completeness_defect()
        if defect > 1e-10:
            raise ValidationError(f"POVM is not complete (defect {defect:.3e})")
        for e in self.effects:
            if hermitian_eig(e).eigenvalues[-1] < -1e-10:
                raise ValidationError("POVM effect is not positive")

    @property
    def effects(self) -> list:
        ks = self.kraus_k.reshape(-1, *self.kraus_k.shape[2:])
        return list(self.projectors) + [dagger(k) @ k for k in ks]

    def completeness_defect(self) -> float:
        s = sum(self.effects)
        return float(np.linalg.norm(s - np.eye(s.shape[0])))

    def apply(self, rho) -> np.ndarray:
        """Instrument sum_i Pi_i rho Pi_i + sum_jk K_jk rho K_jk^dagger."""
        rho = as_matrix(rho)
        out = sum(p @ rho @ dagger(p) for p in self.projectors) if self.projectors else 0
        for k in self.kraus_k.reshape(-1, *self.kraus_k.shape[2:]):
            out = out + k @ rho @ dagger(k)
        return out


def env_sandwich(u, gamma, alpha) -> np.ndarray:
    """System operator <gamma|U|alpha>, i.e. entries <s, gamma|U|s', alpha>."""
    u = as_matrix(u)
    g, a = as_vector(gamma), as_vector(alpha)
    if g.size != a.size or u.shape[0] != u.shape[1] or u.shape[0] % g.size:
        raise DimensionError(f"unitary of shape {u.shape} does not fit env dimension {g.size}")
    n = u.shape[0] // g.size
    return np.einsum("e,sepf,f->sp", g.conj(), u.reshape(n, g.size, n, g.size), a)


def _env_basis(dim_e: int, env_basis) -> np.ndarray:
    if env_basis is None:
        return np.eye(dim_e, dtype=np.complex128)
    b = check_unitary(env_basis)
    if b.shape != (dim_e, dim_e):
        raise DimensionError("environment basis has the wrong dimension")
    return b


def _check_composite(spec: CorrelatedClassSpec, u) -> np.ndarray:
    u = as_matrix(u)
    side = spec.n * spec.dim_e
    if u.shape != (side, side):
        raise DimensionError(f"composite unitary must be {side}x{side}, got {u.shape}")
    return check_unitary(u)


def _maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128) / dim


def _sandwich_kraus(u, blocks, gammas) -> list:
    # blocks: (system operator A, env state rho) -> sqrt(l_a) <g|U|a> A for each eigenpair
    ops = []
    for a_op, rho in blocks:
        vals, vecs = hermitian_eig(rho)
        for lam, alpha in zip(vals, vecs.T):
            if lam <= ENV_CUTOFF:
                continue
            for g in gammas.T:
                ops.append(np.sqrt(lam) * env_sandwich(u, g, alpha) @ a_op)
    return ops


def _projector_blocks(spec: CorrelatedClassSpec) -> list:
    """(projector, env state) pairs over the full orthogonal basis of a class-I spec."""
    blocks = [(projector(spec.phi[:, i]), spec.rho_env[i]) for i in range(spec.d - 1)]
    vecs = spec.w_block.vectors
    blocks += [(projector(vecs[:, j]), spec.varrho_env[j]) for j in range(vecs.shape[1])]
    null = spec.null_projector()
    if null is not None:
        blocks.append((null, _maximally_mixed(spec.dim_e)))
    return blocks


def basis_projectors(spec: CorrelatedClassSpec) -> list:
    """The pinching projections: phi_i, the eigenvectors of W, and any null block."""
    ps = [projector(spec.phi[:, i]) for i in range(spec.d - 1)]
    ps += [projector(v) for v in spec.w_block.vectors.T]
    null = spec.null_projector()
    if null is not None:
        ps.append(null)
    return ps


def build_k_operators(link: GhjwLink, nonortho: NonOrthogonalDecomposition,
                      ortho: OrthogonalDecomposition, projectors: Sequence = ()) -> InvariantPovm:
    """K_jk = sqrt(lambda_kj) |psi_k><phi_j| bundled with the extra projections."""
    if link.u.shape != (len(nonortho), len(ortho)):
        raise DimensionError("GHJW link does not match the decompositions")
    m, r = len(ortho), len(nonortho)
    ks = np.zeros((m, r, ortho.dim, ortho.dim), dtype=np.complex128)
    for j in range(m):
        for k in range(r):
            ks[j, k] = np.sqrt(link.lambda_kj[k, j]) * np.outer(nonortho.vectors[:, k],
                                                                ortho.vectors[:, j].conj())
    return InvariantPovm(tuple(as_matrix(p) for p in projectors), ks)


def invariant_povm(spec: CorrelatedClassSpec) -> InvariantPovm:
    """The POVM fixed by a class-II spec; checks the fixed-point relation on its marginal."""
    if not spec.is_class_two:
        raise ValueError("invariant_povm needs a class-II spec (psi_block present)")
    link = ghjw_link(spec.w_block, spec.psi_block)
    ps = [projector(spec.phi[:, i]) for i in range(spec.d - 1)]
    null = spec.null_projector()
    if null is not None:
        ps.append(null)
    povm = build_k_operators(link, spec.psi_block, spec.w_block, ps)
    rho0 = marginal(spec)
    for k in range(len(spec.psi_block)):
        lhs = sum(kk @ rho0 @ dagger(kk) for kk in povm.kraus_k[:, k])
        rhs = spec.p[-1] * spec.psi_block.weights[k] * projector(spec.psi_block.vectors[:, k])
        if np.linalg.norm(lhs - rhs) > 1e-10:
            raise ValidationError(f"K operators fail the invariance relation for component {k}")
    return povm


def build_phiII_kraus(spec: CorrelatedClassSpec, u, t_tag: float = 0.0,
                      env_basis=None) -> KrausSet:
    """Kraus set of the class-II reduced map at one time.

    ``env_basis`` (columns) fixes the orthonormal system {|gamma>} used to
    evaluate the partial trace; the channel does not depend on it.
    """
    if not spec.is_class_two:
        raise ValueError("build_phiII_kraus needs a class-II spec; use build_phi1_kraus")
    u = _check_composite(spec, u)
    gammas = _env_basis(spec.dim_e, env_basis)
    povm = invariant_povm(spec)
    blocks = [(projector(spec.phi[:, i]), spec.rho_env[i]) for i in range(spec.d - 1)]
    for k in range(len(spec.psi_block)):
        blocks += [(povm.kraus_k[j, k], spec.varrho_env[k]) for j in range(len(spec.w_block))]
    null = spec.null_projector()
    if null is not None:
        blocks.append((null, _maximally_mixed(spec.dim_e)))
    return KrausSet(tuple(_sandwich_kraus(u, blocks, gammas)), "phiII", float(t_tag))


def _require_class_one(spec: CorrelatedClassSpec, what: str) -> None:
    if spec.is_class_two:
        raise ValueError(f"{what} needs a class-I spec; use build_phiII_kraus for class II")


def build_phi1_kraus(spec: CorrelatedClassSpec, u, t_tag: float = 0.0,
                     env_basis=None, label: str = "phi1") -> KrausSet:
    _require_class_one(spec, "build_phi1_kraus")
    u = _check_composite(spec, u)
    gammas = _env_basis(spec.dim_e, env_basis)
    return KrausSet(tuple(_sandwich_kraus(u, _projector_blocks(spec), gammas)), label, float(t_tag))


def build_phiI_kraus(spec: CorrelatedClassSpec, u, t_tag: float = 0.0, env_basis=None) -> KrausSet:
    """Zero-discord counterpart of ``build_phiII_kraus``; same operators as phi1."""
    return build_phi1_kraus(spec, u, t_tag, env_basis, label="phiI")


def build_phi2_kraus(spec: CorrelatedClassSpec, u, t_tag: float = 0.0, env_basis=None) -> KrausSet:
    """Coherent extension: M_{g a} = sum_i <g| U (Pi_i (x) sqrt(rho_i)) |a>.

    The index ``a`` runs over the computational basis of H_E.  When every
    environment state is diagonal in that basis this is exactly
    sum_i sqrt(lambda_{a,i}) <g|U|a> Pi_i.
    """
    _require_class_one(spec, "build_phi2_kraus")
    u = _check_composite(spec, u)
    gammas = _env_basis(spec.dim_e, env_basis)
    blocks = [(p, psd_sqrt(rho)) for p, rho in _projector_blocks(spec)]
    ops = []
    for g in gammas.T:
        for a in range(spec.dim_e):
            ops.append(sum(env_sandwich(u, g, root[:, a]) @ p for p, root in blocks))
    return KrausSet(tuple(ops), "phi2", float(t_tag))


def build_custom_kraus(spec: CorrelatedClassSpec, u, chi, t_tag: float = 0.0,
                       env_basis=None) -> KrausSet:
    """Alternative class-II extension with K'_jk = sqrt(mu_k) |psi_k><chi_j|.

    ``chi`` holds the vectors chi_j as columns.  They must resolve the identity
    on the support of W, so the K' reproduce p_d mu_k |psi_k><psi_k| on the
    marginal; this is checked and a ``ValidationError`` raised otherwise.
    """
    if not spec.is_class_two:
        raise ValueError("custom extensions need a class-II spec")
    u = _check_composite(spec, u)
    gammas = _env_basis(spec.dim_e, env_basis)
    chi = as_matrix(chi)
    if chi.shape[0] != spec.n:
        raise DimensionError("chi vectors have the wrong length")
    psi, mu = spec.psi_block.vectors, spec.psi_block.weights
    rho0 = marginal(spec)
    blocks = [(projector(spec.phi[:, i]), spec.rho_env[i]) for i in range(spec.d - 1)]
    for k in range(len(mu)):
        ks = [np.sqrt(mu[k]) * np.outer(psi[:, k], chi[:, j].conj()) for j in range(chi.shape[1])]
        lhs = sum(kk @ rho0 @ dagger(kk) for kk in ks)
        if np.linalg.norm(lhs - spec.p[-1] * mu[k] * projector(psi[:, k])) > 1e-10:
            raise ValidationError(f"custom K' operators break invariance for component {k}")
        blocks += [(kk, spec.varrho_env[k]) for kk in ks]
    null = spec.null_projector()
    if null is not None:
        blocks.append((null, _maximally_mixed(spec.dim_e)))
    return KrausSet(tuple(_sandwich_kraus(u, blocks, gammas)), "custom", float(t_tag))


def identity_kraus(n: int) -> KrausSet:
    return KrausSet((np.eye(n, dtype=np.complex128),), "identity")


def apply_kraus(ks: KrausSet, rho) -> np.ndarray:
    """sum_M M rho M^dagger; linear, so any n x n operator is accepted."""
    rho = as_matrix(rho)
    if rho.shape != (ks.dim, ks.dim):
        raise DimensionError(f"operator of shape {rho.shape} does not match Kraus dim {ks.dim}")
    return sum(m @ rho @ dagger(m) for m in ks.operators)


def diagonalizing_projection(spec: CorrelatedClassSpec, w) -> np.ndarray:
    w = as_matrix(w)
    if w.shape != (spec.n, spec.n):
        raise DimensionError("operator does not act on H_S")
    return sum(p @ w @ p for p in basis_projectors(spec))


def assignment_a1(spec: CorrelatedClassSpec, sigma) -> np.ndarray:
    """A1[sigma] = sum_j Pi_j sigma Pi_j (x) rho_E^j."""
    _require_class_one(spec, "assignment_a1")
    sigma = as_matrix(sigma)
    if sigma.shape != (spec.n, spec.n):
        raise DimensionError("operator does not act on H_S")
    return sum(kron(p @ sigma @ p, rho) for p, rho in _projector_blocks(spec))


def assignment_a2(spec: CorrelatedClassSpec, sigma) -> np.ndarray:
    """A2[sigma] = sum_jk Pi_j sigma Pi_k (x) sqrt(rho_E^j) sqrt(rho_E^k)."""
    _require_class_one(spec, "assignment_a2")
    sigma = as_matrix(sigma)
    if sigma.shape != (spec.n, spec.n):
        raise DimensionError("operator does not act on H_S")
    blocks = [(p, psd_sqrt(rho)) for p, rho in _projector_blocks(spec)]
    return sum(kron(pj @ sigma @ pk, rj @ rk) for pj, rj in blocks for pk, rk in blocks)


def oracle_reduced(rho_se, u, dim_s: int) -> np.ndarray:
    """Ground truth Tr_E[U rho_SE U^dagger]."""
    rho_se = as_matrix(rho_se)
    u = check_unitary(u)
    if u.shape != rho_se.shape or rho_se.shape[0] % dim_s:
        raise DimensionError("unitary and composite state dimensions do not match")
    return partial_trace_env(u @ rho_se @ dagger(u), dim_s, rho_se.shape[0] // dim_s)


def build_kraus(spec: CorrelatedClassSpec, u, which: str, t_tag: float = 0.0,
                env_basis=None) -> KrausSet:
    builders = {"phiII": build_phiII_kraus, "phi1": build_phi1_kraus,
                "phi2": build_phi2_kraus, "phiI": build_phiI_kraus}
    if which not in builders:
        raise ValueError(f"unknown map {which!r}; choose from {sorted(builders)}")
    return builders[which](spec, u, t_tag, env_basis=env_basis)


def apply_to_state(ks: KrausSet, rho) -> np.ndarray:
    """``apply_kraus`` followed by density-matrix validation of the result."""
    return density_matrix(apply_kraus(ks, density_matrix(rho)))


__all__ = [
    "KrausSet", "InvariantPovm", "env_sandwich", "build_k_operators", "invariant_povm",
    "build_phiII_kraus", "build_phiI_kraus", "build_phi1_kraus", "build_phi2_kraus",
    "build_custom_kraus", "identity_kraus", "apply_kraus", "apply_to_state",
    "diagonalizing_projection", "assignment_a1", "assignment_a2", "oracle_reduced",
    "basis_projectors", "build_kraus",
]
