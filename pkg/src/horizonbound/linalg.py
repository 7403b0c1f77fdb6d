"""Dense complex linear-algebra kernel.

Matrices are plain ``numpy`` complex arrays. Composite systems always use the
factor order ``B (x) A (x) detector``: the left factor of a Kronecker product is
the slower-varying index, so entry ``(i*db + k, j*db + l)`` of ``kron(a, b)`` is
``a[i, j] * b[k, l]``.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import (
    DensityError,
    DimensionError,
    NegativeEigenvalueError,
    NotHermitianError,
)

ATOL = 1e-10  # hermiticity / trace / positivity tolerance

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def tensor(a, b) -> np.ndarray:
    """Kronecker product with ``a`` as the slow index."""
    return np.kron(np.asarray(a), np.asarray(b))


def tensor_all(*factors) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, np.asarray(f))
    return out


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every factor of ``m`` whose index is not in ``keep``.

    Parameters
    ----------
    m : array_like
        Square matrix on ``prod(dims)``.
    dims : sequence of int
        Factor dimensions, slowest-varying first.
    keep : iterable of int
        Factor indices to retain. Kept factors appear in increasing index
        order in the result.
    """
    m = np.asarray(m)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if m.ndim != 2 or m.shape != (total, total):
        raise DimensionError(f"matrix shape {m.shape} does not match dims {dims} (product {total})")
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {n} factors")
    if 2 * n > len(_LETTERS):
        raise DimensionError("too many tensor factors")
    rows = list(_LETTERS[:n])
    cols = [rows[i] if i not in keep else _LETTERS[n + i] for i in range(n)]
    out = [rows[i] for i in keep] + [cols[i] for i in keep]
    spec = "".join(rows) + "".join(cols) + "->" + "".join(out)
    reduced = np.einsum(spec, m.reshape(dims + dims))
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return reduced.reshape(dk, dk)


def is_hermitian(m, atol: float = ATOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= atol


def hermitian_eigvalsh(m, nonnegative: bool = False, atol: float = ATOL) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, optionally clamped at zero.

    With ``nonnegative=True`` eigenvalues in ``[-atol, 0)`` are set to zero and
    anything below ``-atol`` raises :class:`NegativeEigenvalueError`.
    """
    m = np.asarray(m)
    if not is_hermitian(m, atol):
        raise NotHermitianError("matrix is not Hermitian")
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    if nonnegative:
        w = _clamp(w, atol)
    return w


def _clamp(w: np.ndarray, atol: float) -> np.ndarray:
    if w.size and w[0] < -atol:
        raise NegativeEigenvalueError(f"eigenvalue {w[0]:.3g} below -{atol:g}")
    return np.where(w < 0, 0.0, w)


def hermitian_fn(m, f: Callable[[np.ndarray], np.ndarray], nonnegative: bool = False,
                 atol: float = ATOL) -> np.ndarray:
    """Apply ``f`` to a Hermitian matrix through its spectral decomposition.

    ``f`` receives the (real) eigenvalue array and must be vectorized. Set
    ``nonnegative=True`` for functions such as ``log`` or ``sqrt`` that need a
    nonnegative spectrum; tiny negative eigenvalues are then clamped to zero.
    """
    m = np.asarray(m)
    if not is_hermitian(m, atol):
        raise NotHermitianError("matrix is not Hermitian")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    if nonnegative:
        w = _clamp(w, atol)
    with np.errstate(divide="ignore"):
        fw = np.asarray(f(w))
    return (v * fw) @ v.conj().T


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Sample a Haar-distributed unitary (QR of a Ginibre matrix, phase-fixed)."""
    if d < 1:
        raise ValueError("dimension must be positive")
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    # make R's diagonal positive, otherwise the distribution is not Haar
    return q * (diag / np.abs(diag))


def unitarity_residual(u) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))))


def validate_density(m, atol: float = ATOL) -> np.ndarray:
    """Check that ``m`` is a density operator and return its Hermitian part.

    Raises :class:`DensityError` naming the first violated invariant.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"density operator must be square, got shape {m.shape}")
    herm = float(np.max(np.abs(m - m.conj().T), initial=0.0))
    if herm > atol:
        raise DensityError("hermiticity", herm)
    m = 0.5 * (m + m.conj().T)
    tr = abs(np.trace(m).real - 1.0)
    if tr > atol:
        raise DensityError("trace", tr)
    lo = float(np.linalg.eigvalsh(m)[0])
    if lo < -atol:
        raise DensityError("positivity", -lo)
    return m


def entropy_of_spectrum(w: np.ndarray) -> float:
    """``-sum w log w`` with ``0 log 0 = 0``; ``w`` must be nonnegative."""
    w = np.asarray(w, dtype=float)
    w = w[w > 0]
    return float(-np.sum(w * np.log(w)))
