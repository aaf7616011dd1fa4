"""Kraus channels in the Heisenberg picture.

A channel is ``S(m) = sum_i a_i^dagger m a_i`` with ``sum_i a_i^dagger a_i = I``;
its predual acts on densities as ``S^+(rho) = sum_i a_i rho a_i^dagger``.  The
Choi operator is ``C_S = sum_i (a_i (x) 1)|Omega><Omega|(a_i (x) 1)^dagger``
with ``Omega`` the maximally entangled unit vector.  Because
``(a (x) 1) Omega = vec(a) / sqrt(n)`` for the row-major ``vec``, this equals
``sum_i vec(a_i) vec(a_i)^dagger / n``.
"""

import numpy as np

from . import linalg as la

COMPLETENESS_TOL = 1e-9


class KrausChannel:
    """Channel with Kraus operators ``a_i`` of shape ``(dim_out, dim_in)``.

    ``apply`` is the Heisenberg action on ``M_{dim_out}`` and ``apply_dual``
    maps densities on ``C^{dim_in}`` to densities on ``C^{dim_out}``.
    """

    def __init__(self, kraus, tol=COMPLETENESS_TOL):
        ops = [la.as_matrix(k) for k in kraus]
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise ValueError("Kraus operators must share one shape")
        self.kraus = np.stack(ops)
        self.dim_out, self.dim_in = shape
        err = np.max(np.abs(self.completeness() - np.eye(self.dim_in)))
        if err > tol:
            raise ValueError(f"Kraus operators are not complete (residual {err:.3e})")

    @property
    def dim(self):
        if self.dim_in != self.dim_out:
            raise ValueError(f"channel is not square ({self.dim_out}x{self.dim_in})")
        return self.dim_in

    @property
    def square(self):
        return self.dim_in == self.dim_out

    def __len__(self):
        return len(self.kraus)

    def completeness(self):
        return np.einsum("kji,kjl->il", self.kraus.conj(), self.kraus)

    def apply(self, m):
        m = la.as_matrix(m)
        if m.shape != (self.dim_out, self.dim_out):
            raise ValueError(f"input of shape {m.shape} does not match the channel")
        return np.einsum("kji,jl,klm->im", self.kraus.conj(), m, self.kraus)

    def apply_dual(self, rho):
        rho = la.as_matrix(rho)
        if rho.shape != (self.dim_in, self.dim_in):
            raise ValueError(f"density of shape {rho.shape} does not match the channel")
        return np.einsum("kij,jl,kml->im", self.kraus, rho, self.kraus.conj())

    def choi(self):
        """``C_S = (S^+ (x) id)(|Omega><Omega|)``, a density on ``C^n (x) C^n``."""
        n = self.dim
        v = self.kraus.reshape(len(self.kraus), n * n)
        return np.einsum("ki,kj->ij", v, v.conj()) / n

    def canonical(self, tol=1e-13):
        """Equivalent channel with orthogonal Kraus operators from the Choi spectrum."""
        n = self.dim
        w, u = np.linalg.eigh(self.choi())
        keep = w > tol * max(w[-1], 1.0)
        ops = (u[:, keep] * np.sqrt(n * w[keep])).T.reshape(-1, n, n)
        return KrausChannel(list(ops[::-1]))

    def __repr__(self):
        return f"KrausChannel(dim_in={self.dim_in}, dim_out={self.dim_out}, kraus={len(self)})"


def from_choi(c, n):
    w, u = np.linalg.eigh(la.hermitian(c))
    keep = w > 1e-13 * max(w[-1], 1.0)
    ops = (u[:, keep] * np.sqrt(n * w[keep])).T.reshape(-1, n, n)
    return KrausChannel(list(ops))


def identity(n):
    return KrausChannel([np.eye(n)])


def compose(s1, s2, canonical=True):
    """Heisenberg composition ``s1 o s2`` (first ``s2``, then ``s1``): Kraus ``b_j a_i``."""
    if s1.dim_out != s2.dim_in:
        raise ValueError("channels do not compose")
    ops = [b @ a for a in s1.kraus for b in s2.kraus]
    out = KrausChannel(ops)
    return out.canonical() if canonical and out.square else out


def tensor(s1, s2):
    return KrausChannel([np.kron(a, b) for a in s1.kraus for b in s2.kraus])


def mix(p, channels):
    """Convex combination ``sum_k p_k S_k`` with Kraus ``sqrt(p_k) a_i^{(k)}``."""
    p = np.asarray(p, dtype=float)
    if len(p) != len(channels) or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
        raise ValueError("p must be a probability vector matching the channel list")
    shapes = {(c.dim_out, c.dim_in) for c in channels}
    if len(shapes) != 1:
        raise ValueError("mixed channels must share dimensions")
    return KrausChannel([np.sqrt(pk) * a for pk, c in zip(p, channels) if pk > 0 for a in c.kraus])


def pinching(projections, tol=1e-9):
    """``m -> sum e_i m e_i`` for an orthogonal resolution of the identity."""
    ps = [la.hermitian(np.asarray(e, dtype=complex)) for e in projections]
    n = ps[0].shape[0]
    for e in ps:
        if not la.is_projection(e, tol):
            raise ValueError("pinching needs orthogonal projections")
        r = np.trace(e).real
        if r < 0.5 or r > n - 0.5:
            raise ValueError("each projection must satisfy 0 < e < 1")
    if np.max(np.abs(sum(ps) - np.eye(n))) > tol:
        raise ValueError("projections do not sum to the identity")
    for i in range(len(ps)):
        for j in range(i):
            if np.max(np.abs(ps[i] @ ps[j])) > tol:
                raise ValueError("projections are not mutually orthogonal")
    return KrausChannel(ps)


def diagonal_pinching(sizes):
    """Pinching onto consecutive diagonal blocks of the given sizes."""
    n = sum(sizes)
    out, k = [], 0
    for d in sizes:
        e = np.zeros((n, n))
        e[k:k + d, k:k + d] = np.eye(d)
        out.append(e)
        k += d
    return pinching(out)


def weyl_operators(j):
    """The ``j^2`` clock-shift unitaries ``X^a Z^b`` on ``C^j``."""
    shift = np.roll(np.eye(j), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(j) / j))
    return [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            for a in range(j) for b in range(j)]


def conditional_expectation(k, j):
    """Trace-preserving conditional expectation of ``M_{kj}`` onto ``M_k (x) 1_j``.

    Realised as ``id_k (x)`` Weyl twirl with Kraus ``(1_k (x) w_g)/j``.
    """
    if k < 1 or j < 1:
        raise ValueError("k and j must be positive")
    return KrausChannel([np.kron(np.eye(k), w) / j for w in weyl_operators(j)])


def unitary_channel(u, tol=1e-10):
    u = la.as_matrix(u)
    if u.shape[0] != u.shape[1] or np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > tol:
        raise ValueError("u is not unitary")
    return KrausChannel([u])


def random_isometry(rng, rows, cols):
    g = rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(seed, n, kraus_rank):
    """Channel from a random isometry ``C^n -> C^{r n}`` sliced into ``r`` Kraus blocks."""
    if kraus_rank < 1:
        raise ValueError("kraus_rank must be >= 1")
    rng = np.random.default_rng(seed)
    v = random_isometry(rng, kraus_rank * n, n)
    return KrausChannel(list(v.reshape(kraus_rank, n, n)))


def random_unitary(seed, n):
    return random_isometry(np.random.default_rng(seed), n, n)
