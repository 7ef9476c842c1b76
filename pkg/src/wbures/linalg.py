"""Dense complex-matrix kernel.

Bit convention used throughout the package: the basis index of
``|b_0 b_1 ... b_{n-1}>`` is ``sum_i b_i * 2**(n-1-i)``, i.e. qubit 0 is the
most significant bit (the leftmost ket). Reshaping a ``2**n`` axis to
``(2,) * n`` in C order therefore puts qubit ``i`` on axis ``i``.

A subset of qubits is encoded as an integer mask where bit ``i`` set means
qubit ``i`` is in the subset. Note that mask bit ``i`` is *not* the basis-index
bit of qubit ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptySubset,
    NotHermitian,
    NotPSD,
    NotTracePreserving,
)

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EigDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a square complex128 array, unwrapping state objects."""
    if hasattr(m, "mat"):
        m = m.mat
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def num_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise DimensionMismatch(f"dimension {dim} is not a power of two")
    return n


def hermiticity_residual(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def _check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    r = hermiticity_residual(m)
    if r > tol:
        raise NotHermitian(f"matrix is not Hermitian (max |m - m^H| = {r:.3e})")


def jacobi_eigh(
    m, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS
) -> EigDecomposition:
    """Cyclic complex Jacobi eigen-solver for Hermitian matrices.

    Pivots are visited row by row (p < q) in a fixed order, so the output is
    deterministic for a given input. Iteration stops once the off-diagonal
    Frobenius norm drops below ``tol`` times the Frobenius norm of the input.
    """
    a = as_matrix(m).copy()
    _check_hermitian(a)
    a = 0.5 * (a + a.conj().T)
    dim = a.shape[0]
    v = np.eye(dim, dtype=np.complex128)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)

    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                apq = a[p, q]
                r = abs(apq)
                if r <= _EPS * 1e-3 * scale:
                    continue
                # remove the phase of a[p, q] so the pivot block is real symmetric
                phase = apq / r
                a[:, q] *= phase.conjugate()
                a[q, :] *= phase
                v[:, q] *= phase.conjugate()

                app, aqq = a[p, p].real, a[q, q].real
                zeta = (aqq - app) / (2.0 * r)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c

                col_p, col_q = a[:, p].copy(), a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :]
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r

                vp, vq = v[:, p].copy(), v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return EigDecomposition(w[order], v[:, order])


def hermitian_eig(m, method: str = "lapack") -> EigDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``method="lapack"`` (default) calls ``numpy.linalg.eigh``;
    ``method="jacobi"`` uses :func:`jacobi_eigh`. Both are deterministic.
    """
    a = as_matrix(m)
    if method == "jacobi":
        return jacobi_eigh(a)
    if method != "lapack":
        raise ValueError(f"unknown eigen-solver {method!r}")
    _check_hermitian(a)
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return EigDecomposition(w, v)


def noise_floor(eigenvalues: np.ndarray) -> float:
    """Magnitude below which an eigenvalue is indistinguishable from round-off."""
    if eigenvalues.size == 0:
        return 0.0
    return eigenvalues.size * _EPS * max(1.0, float(np.max(np.abs(eigenvalues))))


def _clamped_spectrum(m) -> EigDecomposition:
    eig = hermitian_eig(m)
    w = eig.eigenvalues
    if w[0] < -PSD_TOL:
        raise NotPSD(f"matrix has eigenvalue {w[0]:.3e} < -{PSD_TOL:g}")
    w = np.where(w <= noise_floor(w), 0.0, w)
    return EigDecomposition(w, eig.eigenvectors)


def psd_sqrt(m) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-1e-10, 0)`` are clamped to zero, as are positive
    eigenvalues at round-off level (their square roots would otherwise inject
    ~1e-8 noise per null direction).
    """
    eig = _clamped_spectrum(m)
    v = eig.eigenvectors
    r = (v * np.sqrt(eig.eigenvalues)) @ v.conj().T
    return 0.5 * (r + r.conj().T)


def trace_norm(m) -> float:
    """Sum of singular values."""
    a = as_matrix(m)
    if hermiticity_residual(a) <= HERMITIAN_TOL:
        return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (a + a.conj().T)))))
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def mask_from_qubits(qubits: Iterable[int]) -> int:
    mask = 0
    for q in qubits:
        mask |= 1 << int(q)
    return mask


def qubits_of(mask: int, n: int | None = None) -> list[int]:
    """Qubit indices in ``mask`` in ascending order."""
    out = []
    i = 0
    while mask >> i:
        if mask >> i & 1:
            out.append(i)
        i += 1
    if n is not None and out and out[-1] >= n:
        raise DimensionMismatch(f"mask refers to qubit {out[-1]} but n = {n}")
    return out


def partial_trace(rho, keep: int) -> np.ndarray:
    """Reduced state on the qubits in mask ``keep``, in ascending qubit order."""
    a = as_matrix(rho)
    n = num_qubits(a.shape[0])
    if keep == 0:
        raise EmptySubset("cannot keep an empty set of qubits")
    kept = qubits_of(keep, n)
    full = (1 << n) - 1
    if keep == full:
        return a.copy()
    traced = [q for q in range(n) if q not in kept]
    k = len(kept)
    t = a.reshape((2,) * (2 * n))
    perm = kept + traced + [n + q for q in kept] + [n + q for q in traced]
    dk, dt = 1 << k, 1 << (n - k)
    t = t.transpose(perm).reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def trace_out_position(m: np.ndarray, pos: int, k: int) -> np.ndarray:
    """Trace out the qubit at position ``pos`` of a ``k``-qubit matrix."""
    hi, lo = 1 << pos, 1 << (k - pos - 1)
    t = m.reshape(hi, 2, lo, hi, 2, lo)
    return (t[:, 0, :, :, 0, :] + t[:, 1, :, :, 1, :]).reshape(hi * lo, hi * lo)


def marginals(rho) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(mask, partial_trace(rho, mask))`` for every nonempty mask.

    Subsets are reached depth first, each by tracing a single qubit out of an
    already computed parent, so only one root-to-leaf chain is held in memory.
    The iteration order is deterministic but not sorted by mask.
    """
    a = as_matrix(rho)
    n = num_qubits(a.shape[0])

    def visit(mask: int, mat: np.ndarray, kept: list[int], start: int):
        yield mask, mat
        for pos, q in enumerate(kept):
            if q < start or len(kept) == 1:
                continue
            child = trace_out_position(mat, pos, len(kept))
            yield from visit(mask & ~(1 << q), child, kept[:pos] + kept[pos + 1 :], q + 1)

    yield from visit((1 << n) - 1, a, list(range(n)), 0)


def _apply_left(op: np.ndarray, mat: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """``(op on targets) @ mat`` without forming the full operator."""
    k = len(targets)
    cols = mat.shape[1]
    t = mat.reshape((2,) * n + (cols,))
    o = op.reshape((2,) * (2 * k))
    out = np.tensordot(o, t, axes=(list(range(k, 2 * k)), list(targets)))
    out = np.moveaxis(out, list(range(k)), list(targets))
    return out.reshape(1 << n, cols)


def conjugate_local(op, rho, targets: Sequence[int]) -> np.ndarray:
    """``O rho O^H`` where ``O`` acts as ``op`` on ``targets`` and identity elsewhere."""
    a = as_matrix(rho)
    o = as_matrix(op)
    n = num_qubits(a.shape[0])
    targets = [int(q) for q in targets]
    if o.shape[0] != 1 << len(targets):
        raise DimensionMismatch(
            f"operator of dim {o.shape[0]} cannot act on {len(targets)} qubit(s)"
        )
    if len(set(targets)) != len(targets) or any(q < 0 or q >= n for q in targets):
        raise DimensionMismatch(f"invalid targets {targets} for {n} qubits")
    left = _apply_left(o, a, targets, n)
    return _apply_left(o, left.conj().T, targets, n).conj().T


def propagator(h, t: float) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian ``h``."""
    eig = hermitian_eig(h)
    v = eig.eigenvectors
    return (v * np.exp(-1j * eig.eigenvalues * t)) @ v.conj().T


def apply_kraus(rho, kraus: Sequence, target: int) -> np.ndarray:
    """Apply a single-qubit channel, given by its Kraus operators, to ``target``."""
    ops = [as_matrix(k) for k in kraus]
    if not ops or any(k.shape != (2, 2) for k in ops):
        raise DimensionMismatch("Kraus operators must be a non-empty list of 2x2 matrices")
    completeness = sum(k.conj().T @ k for k in ops)
    dev = float(np.max(np.abs(completeness - np.eye(2))))
    if dev > HERMITIAN_TOL:
        raise NotTracePreserving(f"sum K^H K deviates from identity by {dev:.3e}")
    a = as_matrix(rho)
    out = np.zeros_like(a)
    for k in ops:
        out += conjugate_local(k, a, [target])
    return out
