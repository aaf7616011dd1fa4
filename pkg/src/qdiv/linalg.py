"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of complex dtype.  The helpers here add the
validation and support (kernel) bookkeeping that the divergence code relies
on.  Rank decisions are eigenvalue based, and spectral functions take an
explicit policy for eigenvalues that are numerically zero.
"""

from typing import Callable, NamedTuple

import numpy as np

from .errors import KernelSingularity, NonConvergence

ON_SUPPORT = "on_support"
EXTEND_ZERO = "extend_zero"
FAIL_ON_KERNEL = "fail_on_kernel"
SUPPORT_POLICIES = (ON_SUPPORT, EXTEND_ZERO, FAIL_ON_KERNEL)


class Spectral(NamedTuple):
    """Eigen-decomposition ``H = U diag(eigenvalues) U^dagger``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def as_matrix(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a nonempty 2-d matrix, got shape {m.shape}")
    return m


def hermiticity_tol(m):
    return 1e-10 * (1.0 + np.max(np.abs(m)))


def hermitian(m, tol=None):
    """Return ``(m + m^dagger)/2`` after checking that ``m`` is Hermitian."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"Hermitian matrix must be square, got {m.shape}")
    tol = hermiticity_tol(m) if tol is None else tol
    err = np.max(np.abs(m - m.conj().T))
    if err > tol:
        raise ValueError(f"matrix is not Hermitian (max |M - M^dagger| = {err:.3e})")
    return 0.5 * (m + m.conj().T)


def eig_hermitian(h):
    """Eigenvalues in ascending order and orthonormal eigenvectors (columns)."""
    h = hermitian(h)
    try:
        w, u = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        off = np.linalg.norm(h - np.diag(np.diag(h)))
        raise NonConvergence(f"Hermitian eigensolver failed: {exc}", residual=off) from exc
    return Spectral(w, u)


def support_tol(eigenvalues, dim=None):
    """Eigenvalues at or below this threshold are treated as exactly zero."""
    w = np.asarray(eigenvalues)
    dim = w.shape[-1] if dim is None else dim
    lam_max = float(np.max(w)) if w.size else 0.0
    return dim * 1e-13 * max(lam_max, 1.0)


def psd_tol(eigenvalues):
    lam_max = float(np.max(eigenvalues)) if np.size(eigenvalues) else 0.0
    return 1e-10 * (1.0 + max(lam_max, 0.0))


class Psd(NamedTuple):
    """A positive semidefinite matrix together with its support data."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    rank: int

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def support(self):
        """Orthonormal basis (columns) of the range."""
        return self.eigenvectors[:, self.dim - self.rank:]

    @property
    def support_projection(self):
        v = self.support
        return v @ v.conj().T

    @property
    def faithful(self):
        return self.rank == self.dim


def psd(m):
    """Validate ``m`` as PSD, clip numerically-zero eigenvalues, record its rank."""
    if isinstance(m, Psd):
        return m
    spec = eig_hermitian(m)
    w = spec.eigenvalues
    if w[0] < -psd_tol(w):
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    cut = support_tol(w)
    w = np.where(w <= cut, 0.0, w)
    rank = int(np.count_nonzero(w))
    u = spec.eigenvectors
    return Psd((u * w) @ u.conj().T, w, u, rank)


def spectral_fn(a, g: Callable, support_policy=ON_SUPPORT):
    """Apply the scalar function ``g`` to the PSD matrix ``a`` by spectral calculus.

    ``support_policy`` decides what happens on the kernel: ``on_support``
    leaves it at zero (the result lives on the support), ``extend_zero``
    evaluates ``g(0)`` there and ``fail_on_kernel`` refuses singular input.
    """
    if support_policy not in SUPPORT_POLICIES:
        raise ValueError(f"unknown support policy {support_policy!r}")
    p = psd(a)
    if support_policy == FAIL_ON_KERNEL and not p.faithful:
        raise KernelSingularity(f"matrix has a kernel (rank {p.rank} < {p.dim})")
    w, u = p.eigenvalues, p.eigenvectors
    if support_policy == ON_SUPPORT:
        keep = slice(p.dim - p.rank, p.dim)
        vals = np.asarray(g(w[keep]))
        u = u[:, keep]
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.asarray(g(w))
    if not np.all(np.isfinite(vals)):
        raise KernelSingularity("spectral function is not finite on the retained spectrum")
    out = (u * vals) @ u.conj().T
    return 0.5 * (out + out.conj().T)


def sqrtm_psd(a):
    return spectral_fn(a, np.sqrt, EXTEND_ZERO)


def pinv_psd(a):
    """Moore-Penrose inverse of a PSD matrix using the package rank rule."""
    return spectral_fn(a, lambda w: 1.0 / w, ON_SUPPORT)


def kron(*mats):
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, as_matrix(m))
    return out


def partial_trace(m, factor, dims):
    """Trace out one factor of a bipartite operator on ``C^n (x) C^k``.

    ``factor="first"`` removes the ``n``-dimensional factor and returns a
    ``k x k`` matrix; ``factor="second"`` removes the ``k``-dimensional one.
    """
    n, k = dims
    m = as_matrix(m)
    if m.shape != (n * k, n * k):
        raise ValueError(f"matrix of shape {m.shape} does not match dims {dims}")
    t = m.reshape(n, k, n, k)
    if factor == "first":
        return np.einsum("iaib->ab", t)
    if factor == "second":
        return np.einsum("iaja->ij", t)
    raise ValueError(f"factor must be 'first' or 'second', got {factor!r}")


def max_entangled(n):
    """The unit vector ``n^{-1/2} sum_i e_i (x) e_i`` as an ``n^2 x 1`` column."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.eye(n, dtype=complex).reshape(n * n, 1) / np.sqrt(n)


def projector(v):
    """Orthogonal projection onto the span of the columns of ``v``."""
    v = np.asarray(v, dtype=complex)
    if v.ndim == 1:
        v = v.reshape(-1, 1)
    q, r = np.linalg.qr(v)
    q = q[:, np.abs(np.diag(r)) > 1e-12 * max(1.0, np.abs(r).max())]
    return q @ q.conj().T


def is_projection(p, tol=1e-9):
    p = as_matrix(p)
    return p.shape[0] == p.shape[1] and np.max(np.abs(p @ p - p)) <= tol and \
        np.max(np.abs(p - p.conj().T)) <= tol


def loewner_min_eig(a, b):
    """Smallest eigenvalue of ``b - a``; nonnegative iff ``a <= b``."""
    return float(np.linalg.eigvalsh(hermitian(as_matrix(b) - as_matrix(a)))[0])
