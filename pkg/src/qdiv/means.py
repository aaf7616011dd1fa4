"""Kubo-Ando connections built from operator monotone functions.

An operator monotone ``f`` on ``[0, inf)`` is stored through its integral
representation ``f(t) = a + b t + int (1+s) t / (t+s) dmu(s)`` together with a
direct scalar evaluator.  The connection ``A sigma_f B`` is computed in closed
form by diagonalising the pair on its joint support (:class:`JointPencil`), or
independently by integrating parallel sums ``(tA):B`` against ``mu``.  When
the closed form needs a limit (``f(0) = -inf`` with a support violation) the
regularisation ladder ``(A + eps C) sigma (B + eps C)``, ``C = A + B``, decides
between convergence and divergence.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import linalg as la
from .errors import ComputationInconsistent
from .quadrature import adaptive_gauss_legendre, tail_limits

EXACT = "exact"
CONVERGED = "regularized_converged"
DIVERGING = "diverging"

EPS_LADDER = tuple(10.0 ** (-2 - k) for k in range(9))
DIVERGENCE_CAP = 50.0
SLOPE_TOL = 1e-3
CROSS_TOL = 1e-6


@dataclass(frozen=True)
class MonotoneFn:
    """Operator monotone function with its ``(a, b, mu)`` representation.

    ``density`` is ``dmu/ds`` on ``measure_range``; ``moments(lo, hi)``
    returns ``(int (1+s) dmu, int (1+s)/s dmu)`` over ``(lo, hi)``.
    ``linear`` marks the log family, whose divergence is ``-Tr(A sigma B)``
    rather than ``-log Tr(A sigma B)``.
    """

    name: str
    a: float
    b: float
    scalar: Callable
    density: Optional[Callable] = None
    measure_range: tuple = (0.0, np.inf)
    moments: Optional[Callable] = None
    atoms: tuple = field(default_factory=tuple)
    linear: bool = False

    def __call__(self, t):
        with np.errstate(divide="ignore"):
            return self.scalar(np.asarray(t, dtype=float))

    @property
    def has_measure(self):
        return self.density is not None or bool(self.atoms)

    @property
    def finite_ab(self):
        return np.isfinite(self.a) and np.isfinite(self.b)

    def connection_weight(self, p):
        """``p f((1-p)/p)``, extended by ``b`` at ``p = 0`` and ``a`` at ``p = 1``."""
        p = np.asarray(p, dtype=float)
        mid = (p > 0) & (p < 1)
        out = np.where(p <= 0, self.b, self.a).astype(float)
        pm = p[mid]
        with np.errstate(divide="ignore"):
            out[mid] = pm * self.scalar((1.0 - pm) / pm)
        return out

    def mean_weight(self, t):
        """``(1+t) dmu/dt`` as a function of ``t`` (zero outside the measure range)."""
        t = np.asarray(t, dtype=float)
        if self.density is None:
            return np.zeros_like(t)
        lo, hi = self.measure_range
        inside = (t > lo) & (t < hi)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            w = (1.0 + t) * self.density(t)
        return np.where(inside, w, 0.0)

    def u_range(self):
        lo, hi = self.measure_range
        return (np.log(lo) if lo > 0 else -np.inf, np.log(hi) if np.isfinite(hi) else np.inf)

    def integral_repr(self, t, rtol=1e-10):
        """Evaluate ``a + b t + int (1+s) t/(t+s) dmu(s)`` by quadrature."""
        t = float(t)
        val = self.a + self.b * t
        for s, w in self.atoms:
            val += (1 + s) * t / (t + s) * w
        if self.density is None:
            return val

        def integrand(u):
            s = np.exp(u)
            return self.mean_weight(s) * s * t / (t + s)

        u_lo, u_hi = u_window(self, lambda u: abs(float(integrand(np.array([u]))[0])),
                              np.log(max(t, 1e-300)))
        return val + float(adaptive_gauss_legendre(integrand, u_lo, u_hi, rtol=rtol))

    def interval_moments(self, lo, hi):
        lo = max(lo, self.measure_range[0])
        hi = min(hi, self.measure_range[1])
        atom_m = [0.0, 0.0]
        for s, w in self.atoms:
            if lo < s < hi:
                atom_m[0] += (1 + s) * w
                atom_m[1] += (1 + s) / s * w
        if hi <= lo or self.density is None:
            return atom_m[0], atom_m[1]
        if self.moments is not None:
            m0, m1 = self.moments(lo, hi)
            return m0 + atom_m[0], m1 + atom_m[1]

        def integrand(u):
            s = np.exp(u)
            w = self.mean_weight(s) * s
            return np.stack([w, w / s], axis=-1)

        u_lo = np.log(lo) if lo > 0 else -700.0
        u_hi = np.log(hi) if np.isfinite(hi) else 700.0
        m = adaptive_gauss_legendre(integrand, u_lo, u_hi, rtol=1e-10)
        return float(m[0]) + atom_m[0], float(m[1]) + atom_m[1]


def u_window(f, bound, center, rel=1e-12):
    """Integration window in ``u = log t`` for an integrand dominated by ``bound(u)``.

    Finite ends of the measure range are kept; infinite ends are truncated
    where ``bound`` falls below ``rel`` times its peak.
    """
    u_lo, u_hi = f.u_range()
    grid = center + np.arange(-80.0, 80.5, 0.5)
    if np.isfinite(u_lo):
        grid = np.concatenate([[u_lo + 1e-9], grid[grid > u_lo]])
    if np.isfinite(u_hi):
        grid = grid[grid < u_hi]
    vals = np.array([bound(u) for u in grid])
    peak = grid[int(np.argmax(vals))]
    scale = float(vals.max())
    if scale <= 0:
        return peak, peak
    lo, hi = tail_limits(bound, scale, rel=rel, start=peak)
    return max(lo, u_lo), min(hi, u_hi)


def left_trivial():
    return MonotoneFn("left_trivial", 1.0, 0.0, lambda t: np.ones_like(np.asarray(t, dtype=float)))


def right_trivial():
    return MonotoneFn("right_trivial", 0.0, 1.0, lambda t: np.asarray(t, dtype=float))


def alpha_geometric(alpha):
    """``t -> t^alpha`` with ``dmu = sin(alpha pi)/pi * t^alpha / (t (t+1)) dt``."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    c = np.sin(alpha * np.pi) / np.pi

    def moments(lo, hi):
        m0 = c * (hi ** alpha - lo ** alpha) / alpha
        hi_term = 0.0 if not np.isfinite(hi) else hi ** (alpha - 1.0)
        lo_term = np.inf if lo == 0 else lo ** (alpha - 1.0)
        m1 = c * (lo_term - hi_term) / (1.0 - alpha)
        return m0, m1

    return MonotoneFn(
        f"alpha_geometric({alpha:g})", 0.0, 0.0,
        lambda t: np.power(t, alpha),
        density=lambda t: c * np.power(t, alpha - 1.0) / (t + 1.0),
        moments=moments,
    )


def log_n(n):
    """``t -> log(t + 1/n)``: ``a = -log n``, ``b = 0``, ``dmu = ds/(s(1+s))`` on ``(1/n, inf)``."""
    n = float(n)
    if n <= 0:
        raise ValueError("n must be positive")

    def moments(lo, hi):
        m0 = np.log(hi / lo) if np.isfinite(hi) else np.inf
        m1 = 1.0 / lo - (0.0 if not np.isfinite(hi) else 1.0 / hi)
        return m0, m1

    return MonotoneFn(
        f"log_n({n:g})", -np.log(n), 0.0,
        lambda t: np.log(t + 1.0 / n),
        density=lambda s: 1.0 / (s * (1.0 + s)),
        measure_range=(1.0 / n, np.inf),
        moments=moments,
        linear=True,
    )


def log_fn():
    """``t -> log t``; formally ``a = -inf``.  Only the closed path supports it."""
    return MonotoneFn("log", -np.inf, 0.0, lambda t: np.log(t),
                      density=lambda s: 1.0 / (s * (1.0 + s)), linear=True)


def catalog(name, param=None):
    """Look up a monotone function by name.

    ``left_trivial``, ``right_trivial``, ``alpha_geometric`` (``param`` = alpha),
    ``log_n`` (``param`` = n) and ``log``.
    """
    if name == "left_trivial":
        return left_trivial()
    if name == "right_trivial":
        return right_trivial()
    if name == "alpha_geometric":
        return alpha_geometric(param)
    if name == "log_n":
        return log_n(param)
    if name == "log":
        return log_fn()
    raise ValueError(f"unknown monotone function {name!r}")


# --------------------------------------------------------------------------- parallel sums


def _pinv_stack(m):
    w, u = np.linalg.eigh(m)
    cut = m.shape[-1] * 1e-13 * np.maximum(w[..., -1:], 1.0)
    with np.errstate(divide="ignore"):
        inv = np.where(w > cut, 1.0 / np.where(w > cut, w, 1.0), 0.0)
    return (u * inv[..., None, :]) @ np.conj(np.swapaxes(u, -1, -2))


def parallel_sum_stack(a, b):
    """``a (a+b)^+ b`` for stacks of PSD matrices (exact for singular input)."""
    out = a @ _pinv_stack(a + b) @ b
    return 0.5 * (out + np.conj(np.swapaxes(out, -1, -2)))


class ParallelSumFamily:
    """``t -> (tA):B`` for all ``t > 0`` from one factorisation.

    The parallel sum only sees ``B`` through its shorted operator on the
    range of ``A``, ``B_s = B_11 - B_12 B_22^{-1} B_21`` (``B_22`` lives on
    the part of ``ker A`` where ``B`` is nonzero, so it is invertible).  With
    ``A_11^{-1/2} B_s A_11^{-1/2} = U diag(m) U^*`` and ``G = A_11^{1/2} U``,
    ``(tA):B = G diag(t m / (t + m)) G^*``, which stays accurate for ``t``
    many orders of magnitude away from 1, unlike ``tA (tA + B)^+ B``.
    """

    def __init__(self, a, b, tol=1e-12):
        a = la.hermitian(np.asarray(a, dtype=complex))
        b = la.hermitian(np.asarray(b, dtype=complex))
        n = a.shape[0]
        wa, ua = np.linalg.eigh(a)
        keep = wa > tol * max(wa[-1], 1e-300) * n
        wa, ua = wa[keep], ua[:, keep]
        if wa.size == 0:
            self.m, self.frame = np.zeros(0), np.zeros((n, 0), dtype=complex)
            return
        comp = np.eye(n) - ua @ ua.conj().T
        wb, ub = np.linalg.eigh(la.hermitian(comp @ b @ comp))
        q = ub[:, wb > tol * max(np.abs(wb).max(), np.linalg.norm(b, 2), 1e-300) * n]
        b11 = ua.conj().T @ b @ ua
        if q.shape[1]:
            b12 = ua.conj().T @ b @ q
            b22 = q.conj().T @ b @ q
            b11 = b11 - b12 @ np.linalg.solve(b22, b12.conj().T)
        r = 1.0 / np.sqrt(wa)
        m, u = np.linalg.eigh(la.hermitian(r[:, None] * b11 * r[None, :], tol=1e-6))
        # rounding leaves O(1e-16) eigenvalues where B_s is singular; with
        # slowly decaying measures they would contribute like m^alpha
        m[m <= tol * n * max(np.linalg.norm(b, 2), 1e-300) / wa[0]] = 0.0
        self.m = m
        self.frame = (ua * np.sqrt(wa)) @ u

    def weights(self, t):
        t = np.asarray(t, dtype=float)[..., None]
        with np.errstate(invalid="ignore"):
            return np.where(self.m > 0, t * self.m / (t + self.m), 0.0)

    def __call__(self, t):
        """Stack of ``(t_k A):B`` for an array of ``t``."""
        w = self.weights(t)
        g = self.frame
        return np.einsum("ij,...j,kj->...ik", g, w, g.conj())

    def trace(self, t):
        g2 = np.sum(np.abs(self.frame) ** 2, axis=0)
        return self.weights(t) @ g2


def parallel_sum(a, b, method="exact"):
    """Parallel sum ``A:B``.

    ``method="exact"`` uses ``A (A+B)^+ B``, valid for all PSD pairs;
    ``method="ladder"`` returns the last rung of ``(A+eps I):(B+eps I)``.
    Both agree with ``(A^{-1} + B^{-1})^{-1}`` for invertible input.
    """
    a = la.psd(a).matrix
    b = la.psd(b).matrix
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    if method == "exact":
        return parallel_sum_stack(a, b)
    if method == "ladder":
        eye = np.eye(a.shape[0])
        out = None
        for eps in EPS_LADDER:
            out = np.linalg.inv(np.linalg.inv(a + eps * eye) + np.linalg.inv(b + eps * eye))
        return 0.5 * (out + out.conj().T)
    raise ValueError(f"unknown method {method!r}")


def parallel_sum_variational(a, b, xi):
    """Minimise ``<z, A z> + <xi - z, B (xi - z)>`` over ``z``.

    The stationarity condition ``(A + B) z = B xi`` is solved with the
    pseudo-inverse; returns ``(value, minimiser)``.
    """
    a = la.psd(a).matrix
    b = la.psd(b).matrix
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    z = la.pinv_psd(a + b) @ (b @ xi)
    r = xi - z
    value = np.vdot(z, a @ z).real + np.vdot(r, b @ r).real
    return float(value), z


def projection_meet(p, q, tol=1e-8):
    """Orthogonal projection onto ``range(P) ∩ range(Q)``: the eigenvalue-2 space of ``P + Q``."""
    if not (la.is_projection(p) and la.is_projection(q)):
        raise ValueError("inputs must be orthogonal projections")
    w, u = np.linalg.eigh(la.hermitian(np.asarray(p) + np.asarray(q)))
    v = u[:, np.abs(w - 2.0) <= tol]
    return v @ v.conj().T


# --------------------------------------------------------------------------- means


@dataclass
class MeanResult:
    """``A sigma B`` with the regularisation trace ``[(eps, Tr(A_eps sigma B_eps)), ...]``."""

    value: np.ndarray
    status: str
    epsilon_trace: list = field(default_factory=list)
    path: str = "closed"


def mean_invertible(a, b, f):
    """Textbook formula ``A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}`` for invertible ``A``."""
    w, u = np.linalg.eigh(la.hermitian(a))
    if w[0] <= 0:
        raise ValueError("first argument must be positive definite")
    s = np.sqrt(w)
    a_half = (u * s) @ u.conj().T
    a_mhalf = (u / s) @ u.conj().T
    wi, ui = np.linalg.eigh(la.hermitian(a_mhalf @ b @ a_mhalf))
    out = a_half @ ((ui * f(np.clip(wi, 0.0, None))) @ ui.conj().T) @ a_half
    return 0.5 * (out + out.conj().T)


class JointPencil:
    """Simultaneous diagonalisation of a PSD pair on its joint support.

    With ``S = A + B`` restricted to its support ``V``, the compressions
    ``S^{-1/2} A S^{-1/2}`` and ``S^{-1/2} B S^{-1/2}`` sum to the identity,
    so they share eigenvectors ``e_k`` with eigenvalues ``p_k`` and
    ``1 - p_k``.  Since connections commute with invertible congruences,
    ``A sigma B = S^{1/2} (sum_k p_k f((1-p_k)/p_k) e_k e_k^*) S^{1/2}``.
    The regularised pair ``(A + eps S, B + eps S)`` only moves ``p_k`` to
    ``(p_k + eps)/(1 + 2 eps)``, so every ladder rung is exact as well.
    """

    def __init__(self, a, b, tol=1e-12):
        p = la.psd(a + b)
        self.dim = p.dim
        self.rank = p.rank
        v = p.support
        w = p.eigenvalues[p.dim - p.rank:]
        self.frame = v * np.sqrt(w)
        s_mhalf = v / np.sqrt(w)
        at = la.hermitian(s_mhalf.conj().T @ a @ s_mhalf, tol=1e-6)
        pk, e = np.linalg.eigh(at)
        pk = np.clip(pk, 0.0, 1.0)
        pk[pk <= tol] = 0.0
        pk[pk >= 1.0 - tol] = 1.0
        self.p = pk
        self.basis = self.frame @ e

    @property
    def only_in_a(self):
        """Number of joint-support directions outside the support of ``B``."""
        return int(np.count_nonzero(self.p == 1.0))

    @property
    def only_in_b(self):
        return int(np.count_nonzero(self.p == 0.0))

    def assemble(self, weights):
        g = self.basis
        out = (g * weights) @ g.conj().T
        return 0.5 * (out + out.conj().T)

    def mean(self, f, eps=0.0):
        p = (self.p + eps) / (1.0 + 2.0 * eps)
        return (1.0 + 2.0 * eps) * self.assemble(f.connection_weight(p))


def ladder_rungs(a, b, f, eps_ladder=EPS_LADDER):
    """Matrices ``(A + eps C) sigma (B + eps C)`` with ``C = A + B``."""
    pencil = JointPencil(a, b)
    return [(eps, pencil.mean(f, eps)) for eps in eps_ladder]


def fitted_slope(eps, values, tail=5):
    """Least-squares slope of ``values`` against ``log(1/eps)`` over the last rungs."""
    x = np.log(1.0 / np.asarray(eps[-tail:], dtype=float))
    y = np.asarray(values[-tail:], dtype=float)
    if len(x) < 2:
        return 0.0
    return float(np.polyfit(x, y, 1)[0])


def ladder_diverges(eps, values, cap=DIVERGENCE_CAP, slope_tol=SLOPE_TOL):
    """Infinity rule for a regularisation ladder whose values grow as ``eps -> 0``."""
    if not np.all(np.isfinite(values)) or abs(values[-1]) > cap:
        return True
    return fitted_slope(eps, values) > slope_tol


def kubo_ando_closed(a, b, f, eps_ladder=EPS_LADDER):
    """Closed-path connection with support handling; see :func:`kubo_ando_mean`."""
    pencil = JointPencil(a, b)
    if pencil.rank == 0:
        return MeanResult(np.zeros_like(np.asarray(a, dtype=complex)), EXACT)
    needs_limit = (pencil.only_in_a and not np.isfinite(f.a)) or \
        (pencil.only_in_b and not np.isfinite(f.b))
    if not needs_limit:
        return MeanResult(pencil.mean(f), EXACT)
    rungs = [(eps, pencil.mean(f, eps)) for eps in eps_ladder]
    eps = [e for e, _ in rungs]
    traces = [float(np.trace(m).real) for _, m in rungs]
    trace = list(zip(eps, traces))
    if ladder_diverges(eps, [-t for t in traces]):
        return MeanResult(rungs[-1][1], DIVERGING, trace)
    return MeanResult(rungs[-1][1], CONVERGED, trace)


def kubo_ando_integral(a, b, f, rtol=1e-8):
    """``a A + b B + int (1+t)/t [(tA):B] dmu(t)`` by adaptive quadrature in ``u = log t``."""
    if not f.finite_ab:
        raise ValueError(f"integral path needs finite a, b (got {f.name})")
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    out = f.a * a + f.b * b
    family = ParallelSumFamily(a, b)
    for s, w in f.atoms:
        out = out + (1 + s) / s * family(np.array([s]))[0] * w
    if f.density is None:
        return out
    na = max(np.trace(a).real, 0.0)
    nb = max(np.trace(b).real, 0.0)
    if na == 0 or nb == 0:
        return out

    def integrand(u):
        t = np.exp(u)
        return f.mean_weight(t)[:, None, None] * family(t)

    def bound(u):
        t = np.exp(u)
        return float(f.mean_weight(np.array([t]))[0] * min(t * na, nb))

    u_lo, u_hi = u_window(f, bound, np.log(nb / na))
    integral = adaptive_gauss_legendre(integrand, u_lo, u_hi, rtol=rtol)
    res = out + integral
    return 0.5 * (res + res.conj().T)


def kubo_ando_mean(a, b, f, path="auto", cross_tol=CROSS_TOL, eps_ladder=EPS_LADDER):
    """Kubo-Ando connection ``A sigma_f B`` of two PSD matrices.

    ``path="closed"`` uses the spectral formula, exactly on the joint support
    when one argument is invertible there, otherwise through the
    regularisation ladder.  ``path="integral"`` integrates parallel sums
    against ``mu``.  ``path="auto"`` runs the closed path and checks it
    against the integral path on the coarsest ladder rung; a disagreement
    raises :class:`ComputationInconsistent`.
    """
    a = la.psd(a).matrix
    b = la.psd(b).matrix
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    if path == "integral":
        return MeanResult(kubo_ando_integral(a, b, f), EXACT, path="integral")
    if path not in ("closed", "auto"):
        raise ValueError(f"unknown path {path!r}")
    res = kubo_ando_closed(a, b, f, eps_ladder)
    if path == "auto" and f.finite_ab and f.has_measure:
        (eps0, closed0), = ladder_rungs(a, b, f, eps_ladder[:1])
        c = a + b
        integ0 = kubo_ando_integral(a + eps0 * c, b + eps0 * c, f)
        err = np.linalg.norm(closed0 - integ0)
        if err > cross_tol * max(1.0, np.linalg.norm(closed0)):
            raise ComputationInconsistent(
                f"closed and integral paths disagree by {err:.3e}", closed0, integ0)
        res.path = "auto"
    return res


def f_identity_check(f, t):
    """``f(t) I`` versus ``I sigma (t I)`` on a 2x2 example (Kubo-Ando correspondence)."""
    eye = np.eye(2)
    return kubo_ando_mean(eye, t * eye, f, path="closed").value
