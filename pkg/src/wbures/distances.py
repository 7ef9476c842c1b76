"""Fidelity, Bures length and the speed functionals used by the cost bound."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SingularDirection
from .linalg import _EPS, as_matrix, hermitian_eig, psd_sqrt, trace_norm, _check_hermitian

#: Eigenvalue (or eigenvalue-pair sum) below which a Fisher-metric term is singular.
SINGULAR_EIGENVALUE = 1e-12
#: Largest numerator tolerated on a singular Fisher-metric term.
SINGULAR_NUMERATOR = 1e-18


@dataclass(frozen=True)
class BuresValue:
    fidelity: float
    length: float


def _pair(rho, sigma) -> tuple[np.ndarray, np.ndarray]:
    a, b = as_matrix(rho), as_matrix(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch(f"states have dims {a.shape[0]} and {b.shape[0]}")
    return a, b


def _snap(f: float, dim: int) -> float:
    # A double cannot resolve 1 - F below ~dim*eps, and arccos turns that
    # residue into a spurious length of order sqrt(dim*eps).
    band = 8 * dim * _EPS
    if f >= 1.0 - band:
        return 1.0
    if f <= band:
        return 0.0
    return f


def uhlmann_fidelity(rho, sigma) -> float:
    """Root fidelity ``|| sqrt(rho) sqrt(sigma) ||_1``, clamped to [0, 1]."""
    a, b = _pair(rho, sigma)
    f = trace_norm(psd_sqrt(a) @ psd_sqrt(b))
    return _snap(min(max(f, 0.0), 1.0), a.shape[0])


def bures_length(rho, sigma) -> BuresValue:
    f = uhlmann_fidelity(rho, sigma)
    return BuresValue(f, float(np.arccos(f)))


def fisher_speed(rho, rho_dot) -> float:
    """Fisher-norm speed ``||rho_dot||_F`` of a path through ``rho``.

    Sum of the classical term ``sum_r dlam_r^2 / (4 lam_r)`` and the coherent
    term ``sum_{r<s} |<r|rho_dot|s>|^2 / (lam_r + lam_s)`` in the eigenbasis of
    ``rho``. Terms whose denominator is below ``SINGULAR_EIGENVALUE`` are
    dropped when their numerator is negligible and raise
    :class:`SingularDirection` otherwise.
    """
    a, d = _pair(rho, rho_dot)
    _check_hermitian(d)
    tr = abs(np.trace(d))
    if tr > 1e-10:
        raise ValueError(f"state derivative must be traceless (|tr| = {tr:.3e})")
    eig = hermitian_eig(a)
    lam = eig.eigenvalues
    v = eig.eigenvectors
    m = v.conj().T @ d @ v

    dlam2 = np.diag(m).real ** 2
    singular = lam < SINGULAR_EIGENVALUE
    if np.any(dlam2[singular] >= SINGULAR_NUMERATOR):
        raise SingularDirection("eigenvalue derivative is nonzero on a null eigenvalue")
    classical = float(np.sum(dlam2[~singular] / (4.0 * lam[~singular])))

    iu = np.triu_indices(lam.size, k=1)
    num = np.abs(m[iu]) ** 2
    den = lam[iu[0]] + lam[iu[1]]
    singular = den < SINGULAR_EIGENVALUE
    if np.any(num[singular] >= SINGULAR_NUMERATOR):
        raise SingularDirection("coherent derivative has weight inside the kernel of rho")
    quantum = float(np.sum(num[~singular] / den[~singular]))
    return float(np.sqrt(classical + quantum))


def hamiltonian_variance(h, rho) -> float:
    hm, a = _pair(h, rho)
    _check_hermitian(hm)
    mean = np.trace(hm @ a).real
    second = np.trace(hm @ hm @ a).real
    return max(float(second - mean**2), 0.0)


def seminorm(h) -> float:
    """Half the spectral spread ``(lam_max - lam_min) / 2``."""
    w = hermitian_eig(h).eigenvalues
    return float(w[-1] - w[0]) / 2.0


def commutator_derivative(h, rho) -> np.ndarray:
    """``-i [h, rho]``, the tangent of unitary evolution under ``h``."""
    hm, a = _pair(h, rho)
    return -1j * (hm @ a - a @ hm)
