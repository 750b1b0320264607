"""Dense complex linear algebra on small matrices.

All matrices are plain ``numpy.ndarray`` objects with ``complex128`` entries.
Composite operators on H_S (x) H_E use system-major ordering, i.e. the basis
vector |s, e> sits at index ``s * dim_e + e``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERMITIAN_RTOL = 1e-10
JACOBI_MAX_SWEEPS = 100
JACOBI_OFFDIAG_RTOL = 1e-14
# relative magnitude below which two eigenvalues are treated as degenerate
DEGENERACY_RTOL = 1e-10


class DimensionError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


class NotHermitianError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


class HermitianEigenResult(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex array, raising on anything else."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def as_vector(v) -> np.ndarray:
    x = np.array(v, dtype=np.complex128).reshape(-1)
    if x.size < 1 or not np.all(np.isfinite(x)):
        raise ValueError("vector must be non-empty and finite")
    return x


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def projector(v) -> np.ndarray:
    """Rank-one operator |v><v|."""
    x = as_vector(v)
    return np.outer(x, x.conj())


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace_env(m, dim_s: int, dim_e: int) -> np.ndarray:
    """Trace out the environment factor of an operator on H_S (x) H_E."""
    m = as_matrix(m)
    side = dim_s * dim_e
    if dim_s < 1 or dim_e < 1 or m.shape != (side, side):
        raise DimensionError(
            f"composite operator of shape {m.shape} does not match dims ({dim_s}, {dim_e})"
        )
    return np.einsum("ieje->ij", m.reshape(dim_s, dim_e, dim_s, dim_e))


def frobenius_distance(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def hermiticity_defect(h: np.ndarray) -> float:
    return float(np.linalg.norm(h - dagger(h)))


def check_hermitian(h, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {h.shape}")
    defect = hermiticity_defect(h)
    if defect > rtol * max(1.0, float(np.linalg.norm(h))):
        raise NotHermitianError(f"matrix is not Hermitian (defect {defect:.3e})")
    return h


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    # Complex Jacobi rotation J on (p, q) with a' = J^H a J and a'[p, q] = 0.
    apq = a[p, q]
    mag = abs(apq)
    phase = apq / mag
    tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
    if abs(tau) > 1e150:
        t = 0.5 / tau
    else:
        t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    jpq = s * phase
    jqp = -s * np.conj(phase)

    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p + jqp * col_q
    a[:, q] = jpq * col_p + c * col_q
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p + np.conj(jqp) * row_q
    a[q, :] = np.conj(jpq) * row_p + c * row_q
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real

    vp = v[:, p].copy()
    vq = v[:, q].copy()
    v[:, p] = c * vp + jqp * vq
    v[:, q] = jpq * vp + c * vq


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # Make the first component of (near-)maximal magnitude real and positive.
    mags = np.abs(v)
    k = int(np.flatnonzero(mags >= mags.max() * (1.0 - 1e-12))[0])
    return v * (np.conj(v[k]) / mags[k])


def _regroup_degenerate(vals: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(vals))))
    out = vecs.copy()
    start = 0
    n = len(vals)
    while start < n:
        stop = start + 1
        while stop < n and abs(vals[stop - 1] - vals[stop]) <= DEGENERACY_RTOL * scale:
            stop += 1
        for i in range(start, stop):
            x = out[:, i]
            for j in range(start, i):
                x = x - np.vdot(out[:, j], x) * out[:, j]
            out[:, i] = x / np.linalg.norm(x)
        start = stop
    return out


def hermitian_eig(h, rtol: float = HERMITIAN_RTOL) -> HermitianEigenResult:
    """Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi sweeps.

    Eigenvalues come back sorted in descending order. Within a degenerate
    cluster the Jacobi output order is kept and the vectors are
    re-orthonormalized. Each eigenvector is phase-fixed so that its first
    largest-magnitude component is real and positive.

    Raises ``NotHermitianError`` if ``h`` is not Hermitian within ``rtol`` and
    ``ConvergenceError`` if 100 sweeps do not suffice.
    """
    h = check_hermitian(h, rtol)
    n = h.shape[0]
    a = 0.5 * (h + dagger(h))
    v = np.eye(n, dtype=np.complex128)
    norm = float(np.linalg.norm(a))
    target = JACOBI_OFFDIAG_RTOL * norm
    sweeps = 0
    while _offdiag_norm(a) > target:
        if sweeps >= JACOBI_MAX_SWEEPS:
            raise ConvergenceError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > 1e-300:
                    _rotate(a, v, p, q)
        sweeps += 1

    vals = np.diag(a).real.copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = _regroup_degenerate(vals, v[:, order])
    for i in range(n):
        vecs[:, i] = _fix_phase(vecs[:, i])
    return HermitianEigenResult(vals, vecs)


def min_eigenvalue(h, rtol: float = HERMITIAN_RTOL) -> float:
    return float(hermitian_eig(h, rtol).eigenvalues[-1])


def psd_sqrt(h, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Square root of a PSD matrix; eigenvalues below zero (roundoff) are clipped."""
    vals, vecs = hermitian_eig(h, rtol)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ dagger(vecs)


def unitary_defect(u) -> float:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {u.shape}")
    return float(np.linalg.norm(dagger(u) @ u - np.eye(u.shape[0])))


def check_unitary(u, tol: float = 1e-10) -> np.ndarray:
    u = as_matrix(u)
    defect = unitary_defect(u)
    if defect > tol:
        raise ValueError(f"operator is not unitary (defect {defect:.3e})")
    return u


def expm_hermitian(h, t: float) -> np.ndarray:
    """exp(-i t H) for Hermitian H via the eigendecomposition."""
    vals, vecs = hermitian_eig(h)
    return (vecs * np.exp(-1j * t * vals)) @ dagger(vecs)
