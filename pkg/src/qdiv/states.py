"""Positive functionals on direct sums of matrix blocks and their divergences.

A functional ``phi(m) = sum_i Tr(m_i rho_i)`` is stored as its list of block
densities.  Maximal f-divergences are ``-log sum_i Tr(rho_phi,i sigma_f
rho_psi,i)``; the BS divergence is the ``log`` member ``-sum_i Tr(rho_phi,i
sigma_log rho_psi,i)``.  Every closed-form value has a second route for
cross-checking, through variational brackets or through the regularisation
ladder.
"""

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from . import means
from .errors import ComputationInconsistent, EquivalenceViolation
from .quadrature import adaptive_gauss_legendre, composite_gauss_legendre

FINITE = "finite"
INFINITE = "infinite"
LOWER_BOUND = "lower_bound"

N_GRID = (10, 10 ** 2, 10 ** 3, 10 ** 4, 10 ** 6)
QUAD_NODES = 400
CROSS_TOL = 1e-6
SUPPORT_TOL = 1e-8


@dataclass
class DivergenceResult:
    value: float
    status: str
    epsilon_trace: list = field(default_factory=list)
    method: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def infinite(self):
        return self.status == INFINITE or not np.isfinite(self.value)


class PositiveFunctional:
    """``phi(m) = sum_i Tr(m_i rho_i)`` on ``M_{n_1} (+) ... (+) M_{n_N}``."""

    def __init__(self, blocks):
        if isinstance(blocks, np.ndarray) and blocks.ndim == 2:
            blocks = [blocks]
        if len(blocks) == 0:
            raise ValueError("a functional needs at least one block")
        self.blocks = [la.psd(b).matrix for b in blocks]

    @classmethod
    def from_matrix(cls, rho):
        return cls([rho])

    @property
    def block_dims(self):
        return [b.shape[0] for b in self.blocks]

    @property
    def weight(self):
        return float(sum(np.trace(b).real for b in self.blocks))

    def is_state(self, tol=1e-10):
        return abs(self.weight - 1.0) <= tol

    def __call__(self, m_blocks):
        if isinstance(m_blocks, np.ndarray) and m_blocks.ndim == 2:
            m_blocks = [m_blocks]
        return complex(sum(np.trace(m @ r) for m, r in zip(m_blocks, self.blocks)))

    def scaled(self, c):
        return PositiveFunctional([c * b for b in self.blocks])

    def __add__(self, other):
        _check_same_algebra(self, other)
        return PositiveFunctional([a + b for a, b in zip(self.blocks, other.blocks)])

    def matrix(self):
        """Block-diagonal density matrix."""
        dims = self.block_dims
        out = np.zeros((sum(dims), sum(dims)), dtype=complex)
        k = 0
        for b, d in zip(self.blocks, dims):
            out[k:k + d, k:k + d] = b
            k += d
        return out

    def compose(self, channel):
        """The functional ``phi o T`` for a channel on a single full matrix block."""
        if len(self.blocks) != 1:
            raise ValueError("channels act on single-block functionals only")
        return PositiveFunctional([channel.apply_dual(self.blocks[0])])

    def pinched(self, sizes):
        """Restriction to the block-diagonal subalgebra with the given block sizes."""
        if len(self.blocks) != 1 or sum(sizes) != self.block_dims[0]:
            raise ValueError("block sizes must partition the single block")
        out, k = [], 0
        for d in sizes:
            out.append(self.blocks[0][k:k + d, k:k + d])
            k += d
        return PositiveFunctional(out)

    def __repr__(self):
        return f"PositiveFunctional(block_dims={self.block_dims}, weight={self.weight:.6g})"


def _as_functional(x):
    return x if isinstance(x, PositiveFunctional) else PositiveFunctional(x)


def _check_same_algebra(phi, psi):
    if phi.block_dims != psi.block_dims:
        raise ValueError(f"functionals live on different algebras {phi.block_dims} vs {psi.block_dims}")


@dataclass
class StepFunction:
    """Piecewise constant ``x_t`` with ``x_t = values[k]`` on ``(t_k, t_{k+1})``.

    Below ``breakpoints[0]`` the value is the identity and above the last
    breakpoint it is zero; ``y_t = 1 - x_t``.  Each value is a matrix (single
    block) or a list of per-block matrices.
    """

    breakpoints: np.ndarray
    values: list

    def __post_init__(self):
        t = np.asarray(self.breakpoints, dtype=float)
        if t.ndim != 1 or t.size < 1 or not np.all(np.isfinite(t)) or np.any(t <= 0):
            raise ValueError("breakpoints must be finite positive reals")
        if np.any(np.diff(t) <= 0):
            raise ValueError("breakpoints must be strictly ascending")
        if len(self.values) != t.size - 1:
            raise ValueError(f"need {t.size - 1} interval values, got {len(self.values)}")
        self.breakpoints = t

    def block_values(self, nblocks):
        out = []
        for v in self.values:
            if isinstance(v, np.ndarray) and v.ndim == 2:
                v = [v]
            if len(v) != nblocks:
                raise ValueError("step value does not match the block structure")
            out.append([np.asarray(b, dtype=complex) for b in v])
        return out


# --------------------------------------------------------------------------- closed forms


def _block_ladder_traces(phi, psi, f, eps_ladder, reg_scale):
    """Summed traces ``sum_i Tr((A_i + eps C_i) sigma (B_i + eps C_i))`` over the ladder."""
    totals = np.zeros(len(eps_ladder))
    for a, b in zip(phi.blocks, psi.blocks):
        rungs = means.ladder_rungs(a, b, f, [reg_scale * e for e in eps_ladder])
        totals += [np.trace(m).real for _, m in rungs]
    return totals


def _trace_of_mean(phi, psi, f, eps_ladder=means.EPS_LADDER, reg_scale=1.0, force_ladder=False):
    """``sum_i Tr(rho_phi,i sigma_f rho_psi,i)`` with status and ladder trace (or ``None``)."""
    exact, total = True, 0.0
    if not force_ladder:
        for a, b in zip(phi.blocks, psi.blocks):
            r = means.kubo_ando_closed(a, b, f, eps_ladder)
            if r.status != means.EXACT:
                exact = False
                break
            total += np.trace(r.value).real
        if exact:
            return total, None
    return None, _block_ladder_traces(phi, psi, f, eps_ladder, reg_scale)


def _divergence_from_trace(f, total):
    if f.linear:
        return -np.asarray(total, dtype=float)
    with np.errstate(divide="ignore"):
        return -np.log(np.maximum(total, 0.0))


def d_f_closed(phi, psi, f, eps_ladder=means.EPS_LADDER, reg_scale=1.0, force_ladder=False):
    """Maximal f-divergence ``-log phi(1 sigma_f)`` by the closed-form mean.

    For the log family (``f.linear``) the value is ``-phi(1 sigma_f)``.

    Pairs whose blocks are not jointly handled exactly go through the ladder
    ``(phi + eps r (phi+psi) || psi + eps r (phi+psi))`` with ``r = reg_scale``.
    """
    phi, psi = _as_functional(phi), _as_functional(psi)
    _check_same_algebra(phi, psi)
    if phi.weight == 0 and psi.weight == 0:
        raise ValueError("both functionals are zero")
    if f.name == "log":
        return d_bs(phi, psi, eps_ladder=eps_ladder, reg_scale=reg_scale, force_ladder=force_ladder)
    total, ladder = _trace_of_mean(phi, psi, f, eps_ladder, reg_scale, force_ladder)
    if ladder is None:
        value = _divergence_from_trace(f, total)
        return DivergenceResult(float(value), FINITE if np.isfinite(value) else INFINITE,
                                method="closed")
    vals = _divergence_from_trace(f, ladder)
    eps = [reg_scale * e for e in eps_ladder]
    trace = [(float(e), float(v)) for e, v in zip(eps, vals)]
    if means.ladder_diverges(eps, vals):
        return DivergenceResult(np.inf, INFINITE, trace, "regularized")
    return DivergenceResult(float(vals[-1]), FINITE, trace, "regularized")


def support_violation(rho_phi, rho_psi):
    """Relative weight of ``rho_phi`` outside the support of ``rho_psi``."""
    p = la.psd(rho_psi)
    w = np.trace(rho_phi).real
    if w <= 0:
        return 0.0
    v = p.support
    inside = np.trace(v.conj().T @ rho_phi @ v).real
    return max(0.0, (w - inside) / w)


def _bs_block(rho_phi, rho_psi, support_tol=SUPPORT_TOL):
    """``Tr(rho_phi log(rho_phi^{1/2} rho_psi^+ rho_phi^{1/2}))`` for one block.

    Works in the eigenbasis of ``rho_phi``, where the compressed density is
    diagonal; returns ``inf`` when more than ``support_tol`` of the weight of
    ``rho_phi`` lies outside the support of ``rho_psi``.
    """
    wt, ut = np.linalg.eigh(rho_psi)
    kt = wt > la.support_tol(wt)
    wp, up = np.linalg.eigh(rho_phi)
    kp = wp > la.support_tol(wp)
    total = wp[kp].sum()
    if total <= 0:
        return 0.0
    sp = up[:, kp] * np.sqrt(wp[kp])
    m = ut[:, kt].conj().T @ sp
    if 1.0 - np.sum(np.abs(m) ** 2) / total > support_tol:
        return np.inf
    m = m / np.sqrt(wt[kt])[:, None]
    wx, ux = np.linalg.eigh(m.conj().T @ m)
    if wx[0] <= 0:
        return np.inf
    return float(np.sum(wp[kp][:, None] * np.abs(ux) ** 2 * np.log(wx)[None, :]))


def bs_value(rho_phi, rho_psi, support_tol=SUPPORT_TOL):
    """Fast single-block BS value (``inf`` when the support condition fails)."""
    return _bs_block(rho_phi, rho_psi, support_tol)


def d_bs(phi, psi, eps_ladder=means.EPS_LADDER, reg_scale=1.0, force_ladder=False,
         cross_tol=CROSS_TOL):
    """BS divergence ``Tr(rho_phi log(rho_phi^{1/2} rho_psi^+ rho_phi^{1/2}))``.

    When the support condition holds the value is computed by this formula
    and checked against ``-Tr(rho_phi sigma_log rho_psi)`` from the mean
    module; otherwise the regularisation ladder decides infinity.
    """
    phi, psi = _as_functional(phi), _as_functional(psi)
    _check_same_algebra(phi, psi)
    nested = all(support_violation(a, b) <= SUPPORT_TOL for a, b in zip(phi.blocks, psi.blocks))
    log = means.log_fn()
    if nested and not force_ladder:
        value = sum(_bs_block(a, b) for a, b in zip(phi.blocks, psi.blocks))
        total, ladder = _trace_of_mean(phi, psi, log, eps_ladder)
        if ladder is None:
            other = -total
            if abs(value - other) > cross_tol * max(1.0, abs(value)):
                raise ComputationInconsistent(
                    f"BS formula {value!r} disagrees with the log-mean path {other!r}", value, other)
        return DivergenceResult(float(value), FINITE, method="closed")
    traces = _block_ladder_traces(phi, psi, log, eps_ladder, reg_scale)
    vals = -traces
    eps = [reg_scale * e for e in eps_ladder]
    trace = [(float(e), float(v)) for e, v in zip(eps, vals)]
    if means.ladder_diverges(eps, vals):
        return DivergenceResult(np.inf, INFINITE, trace, "regularized")
    return DivergenceResult(float(vals[-1]), FINITE, trace, "regularized")


def cocycle_operator(phi, psi, tol=SUPPORT_TOL):
    """``T = rho_phi^{-1/2} rho_psi rho_phi^{-1/2}`` on the support of ``rho_phi`` (block diagonal)."""
    phi, psi = _as_functional(phi), _as_functional(psi)
    _check_same_algebra(phi, psi)
    out = []
    for a, b in zip(phi.blocks, psi.blocks):
        if support_violation(a, b) > tol or support_violation(b, a) > tol:
            raise EquivalenceViolation("functionals do not have equal supports")
        inv_half = la.spectral_fn(a, lambda w: 1.0 / np.sqrt(w), la.ON_SUPPORT)
        out.append(la.hermitian(inv_half @ b @ inv_half))
    return _block_diag(out)


def _block_diag(mats):
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n), dtype=complex)
    k = 0
    for m in mats:
        d = m.shape[0]
        out[k:k + d, k:k + d] = m
        k += d
    return out


def functional_parallel_sum(phi, psi):
    """``(phi:psi)(1) = inf {phi(x x*) + psi(y y*) : x + y = 1}``.

    Evaluated at the minimiser ``x = (rho_phi + rho_psi)^+ rho_psi``.
    """
    phi, psi = _as_functional(phi), _as_functional(psi)
    _check_same_algebra(phi, psi)
    total = 0.0
    for a, b in zip(phi.blocks, psi.blocks):
        x = la.pinv_psd(a + b) @ b
        y = np.eye(a.shape[0]) - x
        total += np.trace(x.conj().T @ a @ x).real + np.trace(y.conj().T @ b @ y).real
    return float(total)


# --------------------------------------------------------------------------- variational paths


def _optimal_terms(a, b, t):
    """``Tr(x* A x)`` and ``Tr(y* B y)/t`` at ``x = (tA + B)^+ B`` for a stack of ``t``.

    ``y = 1 - x`` is evaluated as ``t (tA + B)^+ A`` (plus a kernel part that
    ``B`` annihilates) so that small ``t`` does not lose precision.
    """
    s_inv = means._pinv_stack(t[:, None, None] * a[None] + b[None])
    x = s_inv @ b[None]
    z = s_inv @ a[None]
    xa = np.einsum("kji,jl,kli->k", x.conj(), a, x).real
    yb_t = t * np.einsum("kji,jl,kli->k", z.conj(), b, z).real
    return xa, yb_t


def _step_terms(phi, psi, x):
    """Per-interval ``(phi(x x*), psi(y y*))`` for a user step function."""
    out = []
    for vals in x.block_values(len(phi.blocks)):
        xa = yb = 0.0
        for xi, a, b in zip(vals, phi.blocks, psi.blocks):
            y = np.eye(a.shape[0]) - xi
            xa += np.trace(xi.conj().T @ a @ xi).real
            yb += np.trace(y.conj().T @ b @ y).real
        out.append((xa, yb))
    return out


def d_f_variational(phi, psi, f, x="optimal", rtol=1e-10):
    """``-log(a phi(1) + b psi(1) + int (1+t)[phi(x x*) + psi(y y*)/t] dmu(t))``.

    With ``x="optimal"`` the stationary point ``x_t = (t rho_phi + rho_psi)^+
    rho_psi`` is used at every quadrature node and the result is a value of
    the divergence.  A user :class:`StepFunction` can only enlarge the
    bracket, so the result is then a lower bound.
    """
    phi, psi = _as_functional(phi), _as_functional(psi)
    _check_same_algebra(phi, psi)
    if not f.finite_ab:
        raise ValueError(f"variational path needs finite a, b (got {f.name})")
    bracket = f.a * phi.weight + f.b * psi.weight
    if isinstance(x, StepFunction):
        t = x.breakpoints
        terms = _step_terms(phi, psi, x)
        m0, _ = f.interval_moments(0.0, t[0])
        bracket += m0 * phi.weight
        for (lo, hi), (xa, yb) in zip(zip(t[:-1], t[1:]), terms):
            m0, m1 = f.interval_moments(lo, hi)
            bracket += m0 * xa + m1 * yb
        _, m1 = f.interval_moments(t[-1], np.inf)
        bracket += m1 * psi.weight
        value = _divergence_from_trace(f, bracket)
        return DivergenceResult(float(value), LOWER_BOUND, method="variational_step",
                                extras={"bracket": float(bracket)})
    if x != "optimal":
        raise ValueError("x must be 'optimal' or a StepFunction")
    for s, w in f.atoms:
        for a, b in zip(phi.blocks, psi.blocks):
            xa, yb_t = _optimal_terms(a, b, np.array([s]))
            bracket += (1 + s) * (xa[0] + yb_t[0]) * w
    if f.density is not None:
        na, nb = phi.weight, psi.weight

        def integrand(u):
            t = np.exp(u)
            acc = np.zeros_like(t)
            for a, b in zip(phi.blocks, psi.blocks):
                xa, yb_t = _optimal_terms(a, b, t)
                acc += xa + yb_t
            return f.mean_weight(t) * t * acc

        def bound(u):
            t = np.exp(u)
            return float(f.mean_weight(np.array([t]))[0] * min(t * na, nb))

        if na > 0 and nb > 0:
            lo, hi = means.u_window(f, bound, np.log(nb / na))
            bracket += float(adaptive_gauss_legendre(integrand, lo, hi, rtol=rtol))
    value = _divergence_from_trace(f, bracket)
    return DivergenceResult(float(value), FINITE if np.isfinite(value) else INFINITE,
                            method="variational", extras={"bracket": float(bracket)})


def bs_bracket(phi, psi, n, nodes=QUAD_NODES, x="optimal"):
    """``phi(1) log n - int_{1/n}^inf [phi(x_t x_t*) + psi(y_t y_t*)/t] dt/t``."""
    phi, psi = _as_functional(phi), _as_functional(psi)
    n = float(n)
    t_min = 1.0 / n
    if isinstance(x, StepFunction):
        t = x.breakpoints
        terms = _step_terms(phi, psi, x)
        integral = 0.0
        if t[0] > t_min:
            integral += phi.weight * np.log(t[0] / t_min)
        for (lo, hi), (xa, yb) in zip(zip(t[:-1], t[1:]), terms):
            lo, hi = max(lo, t_min), max(hi, t_min)
            if hi > lo:
                integral += xa * np.log(hi / lo) + yb * (1.0 / lo - 1.0 / hi)
        integral += psi.weight / max(t[-1], t_min)
        return float(phi.weight * np.log(n) - integral)
    if x != "optimal":
        raise ValueError("x must be 'optimal' or a StepFunction")
    scale = max(phi.weight, 1e-300)
    t_max = max(psi.weight / (1e-12 * scale), 10.0 * n, 1.0)

    def integrand(u):
        t = np.exp(u)
        acc = np.zeros_like(t)
        for a, b in zip(phi.blocks, psi.blocks):
            xa, yb_t = _optimal_terms(a, b, t)
            acc += xa + yb_t
        return acc

    integral = composite_gauss_legendre(integrand, np.log(t_min), np.log(t_max), nodes=nodes)
    return float(phi.weight * np.log(n) - integral)


def d_bs_variational(phi, psi, n_grid=N_GRID, x="optimal", nodes=QUAD_NODES):
    """Lower bounds on the BS divergence from the brackets at each ``n`` in ``n_grid``.

    The reported value is the bracket at the largest ``n``; the full sequence
    (nondecreasing in ``n``) is stored in ``extras["sequence"]``.
    """
    phi, psi = _as_functional(phi), _as_functional(psi)
    _check_same_algebra(phi, psi)
    grid = sorted(n_grid)
    seq = [(int(n), bs_bracket(phi, psi, n, nodes, x)) for n in grid]
    return DivergenceResult(seq[-1][1], LOWER_BOUND, method="variational",
                            extras={"sequence": seq,
                                    "monotone": all(b[1] >= a[1] - 1e-12 for a, b in zip(seq, seq[1:]))})


def alpha_limit(phi, psi, alphas=(1e-3, 1e-4)):
    """Richardson extrapolation of ``D_{f_alpha}/alpha`` to ``alpha -> 0``."""
    a1, a2 = alphas
    r1 = d_f_closed(phi, psi, means.alpha_geometric(a1)).value / a1
    r2 = d_f_closed(phi, psi, means.alpha_geometric(a2)).value / a2
    return float((a1 * r2 - a2 * r1) / (a1 - a2))
