"""Density operators, correlated state classes and the GHJW link.

A correlated class is described by a :class:`CorrelatedClassSpec`: d-1 pure
system projectors |phi_i><phi_i| paired with environment states rho_E^i, and
one mixed system operator W paired with further environment states.  W is
given either through its spectral resolution alone (class I, zero discord) or
additionally through a non-orthogonal decomposition sum_k mu_k |psi_k><psi_k|
(class II, possibly discordant).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .linalg import (
    HERMITIAN_RTOL,
    DimensionError,
    as_matrix,
    as_vector,
    check_hermitian,
    dagger,
    hermitian_eig,
    kron,
    partial_trace_env,
    projector,
)

SPECTRAL_CUTOFF = 1e-12


class ValidationError(ValueError):
    """A state, decomposition or class spec violates its invariants."""


def density_matrix(m, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Validate ``m`` as a statistical operator and return it as an array.

    Checks Hermiticity, unit trace and positivity, each within ``rtol``.
    """
    try:
        m = check_hermitian(m, rtol)
    except ValueError as exc:
        raise ValidationError(f"not a density matrix: {exc}") from exc
    tr = np.trace(m)
    if abs(tr - 1.0) > rtol:
        raise ValidationError(f"not a density matrix: trace {tr.real:.12g} != 1")
    lo = hermitian_eig(m, rtol).eigenvalues[-1]
    if lo < -rtol:
        raise ValidationError(f"not a density matrix: negative eigenvalue {lo:.3e}")
    return m


def _check_probabilities(p, name: str, strict: bool = False) -> np.ndarray:
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise ValidationError(f"{name} must be a non-empty finite vector")
    if np.any(p < 0) or (strict and np.any(p <= 0)):
        raise ValidationError(f"{name} must be {'strictly ' if strict else ''}positive")
    if abs(p.sum() - 1.0) > 1e-12:
        raise ValidationError(f"{name} must sum to 1 (got {p.sum():.15g})")
    return p


@dataclass(frozen=True)
class OrthogonalDecomposition:
    """W = sum_j w_j |phi_j><phi_j| with orthonormal phi_j; vectors are columns."""

    weights: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        w = _check_probabilities(self.weights, "orthogonal weights", strict=True)
        v = as_matrix(self.vectors)
        if v.shape[1] != w.size:
            raise ValidationError("one vector per weight required")
        if np.linalg.norm(dagger(v) @ v - np.eye(w.size)) > 1e-10:
            raise ValidationError("orthogonal decomposition vectors are not orthonormal")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def __len__(self) -> int:
        return self.weights.size

    def assemble(self) -> np.ndarray:
        return (self.vectors * self.weights) @ dagger(self.vectors)


@dataclass(frozen=True)
class NonOrthogonalDecomposition:
    """W = sum_k mu_k |psi_k><psi_k| with normalized, generally overlapping psi_k."""

    weights: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        mu = _check_probabilities(self.weights, "non-orthogonal weights")
        v = as_matrix(self.vectors)
        if v.shape[1] != mu.size:
            raise ValidationError("one vector per weight required")
        norms = np.linalg.norm(v, axis=0)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValidationError("non-orthogonal decomposition vectors must be normalized")
        object.__setattr__(self, "weights", mu)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def __len__(self) -> int:
        return self.weights.size

    def assemble(self) -> np.ndarray:
        return (self.vectors * self.weights) @ dagger(self.vectors)


@dataclass(frozen=True)
class GhjwLink:
    """Isometry block U (r x m) linking the two decompositions, and |U_kj|^2."""

    u: np.ndarray
    lambda_kj: np.ndarray

    def isometry_defect(self) -> float:
        m = self.u.shape[1]
        return float(np.linalg.norm(dagger(self.u) @ self.u - np.eye(m)))

    def link_defect(self, ortho: OrthogonalDecomposition, nonortho: NonOrthogonalDecomposition) -> float:
        return float(np.max(np.abs(self.lambda_kj @ ortho.weights - nonortho.weights)))

    def column_sum_defect(self) -> float:
        return float(np.max(np.abs(self.lambda_kj.sum(axis=0) - 1.0)))


def spectral_decompose(w, cutoff: float = SPECTRAL_CUTOFF) -> OrthogonalDecomposition:
    """Spectral resolution of a density matrix, dropping weights below ``cutoff``."""
    w = density_matrix(w)
    vals, vecs = hermitian_eig(w)
    keep = vals >= cutoff
    weights = vals[keep]
    return OrthogonalDecomposition(weights / weights.sum(), vecs[:, keep])


def ghjw_link(ortho: OrthogonalDecomposition, nonortho: NonOrthogonalDecomposition) -> GhjwLink:
    """U_kj = sqrt(mu_k / w_j) <phi_j|psi_k> for two decompositions of the same W."""
    if ortho.dim != nonortho.dim:
        raise DimensionError("decompositions act on spaces of different dimension")
    if np.linalg.norm(ortho.assemble() - nonortho.assemble()) > 1e-10:
        raise ValidationError("decompositions represent different states")
    if np.any(ortho.weights <= 0):
        raise ValidationError("orthogonal weights must be strictly positive")
    overlaps = dagger(nonortho.vectors) @ ortho.vectors  # [k, j] = <psi_k|phi_j>
    u = np.sqrt(np.outer(nonortho.weights, 1.0 / ortho.weights)) * np.conj(overlaps)
    return GhjwLink(u, np.abs(u) ** 2)


@dataclass(frozen=True)
class CorrelatedClassSpec:
    """Class C^I_SE (``psi_block is None``) or C^II_SE on H_S (x) H_E.

    ``phi`` holds the d-1 orthonormal system vectors as columns, ``rho_env``
    their environment states.  ``varrho_env`` carries one environment state
    per component of ``w_block`` (class I) or of ``psi_block`` (class II).
    """

    n: int
    d: int
    p: np.ndarray
    phi: np.ndarray
    w_block: OrthogonalDecomposition
    psi_block: Optional[NonOrthogonalDecomposition] = None
    rho_env: Sequence[np.ndarray] = field(default_factory=tuple)
    varrho_env: Sequence[np.ndarray] = field(default_factory=tuple)

    def __post_init__(self):
        n, d = int(self.n), int(self.d)
        if not 1 <= d <= n:
            raise ValidationError(f"need 1 <= d <= n, got d={d}, n={n}")
        p = _check_probabilities(self.p, "class probabilities p")
        if p.size != d:
            raise ValidationError(f"expected {d} class probabilities, got {p.size}")
        phi = np.zeros((n, 0), dtype=np.complex128) if d == 1 else as_matrix(self.phi)
        if phi.shape != (n, d - 1):
            raise ValidationError(f"phi must hold d-1={d - 1} vectors of length {n}")
        if self.w_block.dim != n:
            raise ValidationError("w_block acts on the wrong space")
        basis = np.hstack([phi, self.w_block.vectors])
        if basis.shape[1] > n or np.linalg.norm(dagger(basis) @ basis - np.eye(basis.shape[1])) > 1e-10:
            raise ValidationError("phi vectors must be orthonormal and orthogonal to the W support")
        if self.psi_block is not None:
            if self.psi_block.dim != n:
                raise ValidationError("psi_block acts on the wrong space")
            gap = np.linalg.norm(self.psi_block.assemble() - self.w_block.assemble())
            if gap > 1e-10:
                raise ValidationError(f"psi_block and w_block describe different W (gap {gap:.3e})")

        rho = tuple(density_matrix(r) for r in self.rho_env)
        varrho = tuple(density_matrix(r) for r in self.varrho_env)
        if len(rho) != d - 1:
            raise ValidationError(f"expected {d - 1} rho_env states, got {len(rho)}")
        n_w = len(self.psi_block) if self.psi_block is not None else len(self.w_block)
        if len(varrho) != n_w:
            raise ValidationError(f"expected {n_w} varrho_env states, got {len(varrho)}")
        dims = {r.shape[0] for r in rho + varrho}
        if len(dims) != 1:
            raise ValidationError("environment states must share one dimension")

        object.__setattr__(self, "n", n)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "rho_env", rho)
        object.__setattr__(self, "varrho_env", varrho)

    @property
    def dim_e(self) -> int:
        return (self.rho_env + self.varrho_env)[0].shape[0]

    @property
    def is_class_two(self) -> bool:
        return self.psi_block is not None

    @property
    def w(self) -> np.ndarray:
        return self.w_block.assemble()

    def null_projector(self) -> Optional[np.ndarray]:
        """Projector onto the part of H_S outside span{phi_i} + supp W, if any."""
        basis = np.hstack([self.phi, self.w_block.vectors])
        if basis.shape[1] == self.n:
            return None
        return np.eye(self.n) - basis @ dagger(basis)

    def class_one_sibling(self, varrho_env: Sequence[np.ndarray]) -> "CorrelatedClassSpec":
        """Class-I spec sharing phi, p and W, with new per-eigencomponent env states."""
        return CorrelatedClassSpec(self.n, self.d, self.p, self.phi, self.w_block, None,
                                   self.rho_env, tuple(varrho_env))


def assemble_composite(spec: CorrelatedClassSpec) -> np.ndarray:
    """The composite state rho_SE of the class on H_S (x) H_E."""
    out = np.zeros((spec.n * spec.dim_e,) * 2, dtype=np.complex128)
    for i in range(spec.d - 1):
        out += spec.p[i] * kron(projector(spec.phi[:, i]), spec.rho_env[i])
    block = spec.psi_block if spec.is_class_two else spec.w_block
    for k in range(len(block)):
        out += spec.p[-1] * block.weights[k] * kron(projector(block.vectors[:, k]), spec.varrho_env[k])
    return density_matrix(out)


def domain_member(spec: CorrelatedClassSpec, probs) -> np.ndarray:
    """sum_{i<d} probs_i |phi_i><phi_i| + probs_d W."""
    probs = _check_probabilities(probs, "domain probabilities")
    if probs.size != spec.d:
        raise ValidationError(f"expected {spec.d} probabilities, got {probs.size}")
    out = probs[-1] * spec.w
    for i in range(spec.d - 1):
        out = out + probs[i] * projector(spec.phi[:, i])
    return out


def marginal(spec: CorrelatedClassSpec) -> np.ndarray:
    """System marginal Tr_E rho_SE, computed from the class data directly."""
    return domain_member(spec, spec.p)


def marginal_via_trace(spec: CorrelatedClassSpec) -> np.ndarray:
    return partial_trace_env(assemble_composite(spec), spec.n, spec.dim_e)
