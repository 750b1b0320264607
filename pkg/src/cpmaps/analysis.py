"""Channel diagnostics: matrix representation, Choi matrix, CP/TP checks, Bloch images.

Index convention (composite indices are row-major)::

    lam[i*n + j, k*n + l]  = <i| Phi[|k><l|] |j>
    choi[i*n + k, j*n + l] = lam[i*n + j, k*n + l]

so ``choi = sum_kl Phi[|k><l|] (x) |k><l|`` with the output factor first.  The
closed-form qubit matrices in :mod:`cpmaps.scenarios` use the transpose of
``lam`` and the factor-swapped ``choi``; see :func:`lambda_input_rows` and
:func:`choi_input_first`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .channels import KrausSet, apply_kraus
from .linalg import DimensionError, as_matrix, hermitian_eig

PAULIS = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)
DEFAULT_BLOCH_SAMPLES = 400


def reshuffle(m: np.ndarray, n: int) -> np.ndarray:
    """Swap the second and third of the four n-ary indices; an involution."""
    m = as_matrix(m)
    if m.shape != (n * n, n * n):
        raise DimensionError(f"expected a {n * n}x{n * n} matrix")
    return m.reshape(n, n, n, n).transpose(0, 2, 1, 3).reshape(n * n, n * n)


def swap_factors(m: np.ndarray, n: int) -> np.ndarray:
    """Conjugate an operator on C^n (x) C^n by the swap of the two factors."""
    return as_matrix(m).reshape(n, n, n, n).transpose(1, 0, 3, 2).reshape(n * n, n * n)


@dataclass(frozen=True)
class ChannelRep:
    lam: np.ndarray
    choi: np.ndarray

    @property
    def n(self) -> int:
        return int(round(np.sqrt(self.lam.shape[0])))

    @classmethod
    def from_lambda(cls, lam) -> "ChannelRep":
        lam = as_matrix(lam)
        n = int(round(np.sqrt(lam.shape[0])))
        return cls(lam, reshuffle(lam, n))

    @classmethod
    def from_choi(cls, choi) -> "ChannelRep":
        choi = as_matrix(choi)
        n = int(round(np.sqrt(choi.shape[0])))
        return cls(reshuffle(choi, n), choi)

    def apply(self, rho) -> np.ndarray:
        rho = as_matrix(rho)
        n = self.n
        if rho.shape != (n, n):
            raise DimensionError("state does not match the channel dimension")
        return (self.lam @ rho.reshape(-1)).reshape(n, n)

    def compose(self, first: "ChannelRep") -> "ChannelRep":
        """The channel ``self o first``."""
        return ChannelRep.from_lambda(self.lam @ first.lam)


@dataclass(frozen=True)
class CpReport:
    min_choi_eig: float
    tp_defect: float
    is_cp: bool
    tol: float

    def to_dict(self) -> dict:
        return asdict(self)


def rep_from_map(fn: Callable[[np.ndarray], np.ndarray], n: int) -> ChannelRep:
    """Matrix representation of any linear map on n x n matrices."""
    lam = np.zeros((n * n, n * n), dtype=np.complex128)
    for k in range(n):
        for l in range(n):
            unit = np.zeros((n, n), dtype=np.complex128)
            unit[k, l] = 1.0
            lam[:, k * n + l] = as_matrix(fn(unit)).reshape(-1)
    return ChannelRep.from_lambda(lam)


def rep_from_kraus(ks: KrausSet) -> ChannelRep:
    return rep_from_map(lambda e: apply_kraus(ks, e), ks.dim)


def tp_defect(rep: ChannelRep) -> float:
    """|| Tr_out(Choi) - 1 ||_F."""
    n = rep.n
    reduced = np.einsum("ikil->kl", rep.choi.reshape(n, n, n, n))
    return float(np.linalg.norm(reduced - np.eye(n)))


def cp_report(rep: ChannelRep, tol: float = 1e-10) -> CpReport:
    lo = float(hermitian_eig(rep.choi).eigenvalues[-1])
    return CpReport(lo, tp_defect(rep), bool(lo >= -tol), float(tol))


def channel_distance(a: ChannelRep, b: ChannelRep, domain: Optional[Sequence] = None) -> float:
    """Frobenius distance of the Lambda matrices, or max output distance over ``domain``."""
    if a.lam.shape != b.lam.shape:
        raise DimensionError("channels act on different dimensions")
    if domain is None:
        return float(np.linalg.norm(a.lam - b.lam))
    if len(domain) == 0:
        raise ValueError("domain must contain at least one state")
    return max(float(np.linalg.norm(a.apply(rho) - b.apply(rho))) for rho in domain)


def lambda_input_rows(rep: ChannelRep) -> np.ndarray:
    """Lambda with rows indexed by the input matrix unit (k, l)."""
    return rep.lam.T.copy()


def choi_input_first(rep: ChannelRep) -> np.ndarray:
    """Choi matrix with the input factor first: sum_kl |k><l| (x) Phi[|k><l|]."""
    return swap_factors(rep.choi, rep.n)


def rep_from_input_rows(lam_rows) -> ChannelRep:
    return ChannelRep.from_lambda(as_matrix(lam_rows).T)


def fibonacci_sphere(samples: int = DEFAULT_BLOCH_SAMPLES) -> np.ndarray:
    """Deterministic, near-uniform unit vectors, shape (samples, 3)."""
    if samples < 1:
        raise ValueError("need at least one sample")
    i = np.arange(samples) + 0.5
    z = 1.0 - 2.0 * i / samples
    r = np.sqrt(1.0 - z * z)
    theta = np.pi * (3.0 - np.sqrt(5.0)) * i
    return np.column_stack([r * np.cos(theta), r * np.sin(theta), z])


def bloch_state(xyz) -> np.ndarray:
    x, y, z = xyz
    return 0.5 * (np.eye(2) + x * PAULIS[0] + y * PAULIS[1] + z * PAULIS[2])


def bloch_vector(rho) -> np.ndarray:
    rho = as_matrix(rho)
    return np.array([np.trace(s @ rho).real for s in PAULIS])


def bloch_image(rep: ChannelRep, samples: int = DEFAULT_BLOCH_SAMPLES) -> list:
    """[(input xyz, output xyz), ...] for pure inputs on a Fibonacci lattice."""
    if rep.n != 2:
        raise DimensionError("Bloch images need a qubit channel")
    return [(v, bloch_vector(rep.apply(bloch_state(v)))) for v in fibonacci_sphere(samples)]
