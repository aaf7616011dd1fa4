"""Channel divergences and the complexity ``c(T) = D_BS(id || T)``.

Two independent routes are provided.

The Choi route computes ``K = -(C_S sigma_log C_T)`` and returns
``n * lambda_max(Tr_1 K)``.  For a reference vector ``xi = (1 (x) x) Omega``
with invertible ``x`` the two output densities are ``(1 (x) x) C (1 (x)
x)^dagger`` and the log connection commutes with this congruence, so the
state divergence equals ``Tr((1 (x) x^dagger x) K) = Tr(x^dagger x Tr_1 K)``
under the constraint ``Tr(x^dagger x) = n``.  The supremum over ``x`` is
therefore ``n`` times the top eigenvalue of ``Tr_1 K``; it is approached as
``x^dagger x`` concentrates on the top eigenvector.

The optimisation route maximises the state divergence of
``(S^+ (x) id)(|xi><xi|)`` against ``(T^+ (x) id)(|xi><xi|)`` directly over
unit vectors ``xi``, building the densities from the Kraus operators.  The
search keeps the Schmidt coefficients of ``xi`` above a small fraction of the
largest one: near product vectors the output densities have eigenvalues of
order the squared smallest coefficient and the objective becomes dominated by
rounding.  Every value returned is still the divergence of an actual
reference state, so it remains a lower bound.
"""

import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import channels as ch
from . import linalg as la
from . import means
from . import states as st

OPT_CAP = 50.0
AGREE_TOL = 1e-3


@dataclass
class OptimizerConfig:
    restarts: int = 16
    max_evals: int = 2000
    seed: int = 0
    cap: float = OPT_CAP
    reference_dim: int = 0
    random_probe: int = 64
    polish: bool = True
    threads: int = 1
    singular_floor: float = 1e-3


@dataclass
class ReferenceState:
    """Unit vector ``xi`` in ``C^n (x) C^r`` (system first, reference second)."""

    dim: int
    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise ValueError("reference vector must be nonzero")
        self.vector = v / nrm

    @property
    def reference_dim(self):
        return self.vector.size // self.dim

    def matrix(self):
        """``X`` with ``xi = vec(X)`` (row-major, shape ``(n, r)``)."""
        return self.vector.reshape(self.dim, self.reference_dim)


def output_density(channel, xi):
    """``(S^+ (x) id)(|xi><xi|)`` computed from the Kraus list."""
    x = xi.matrix() if isinstance(xi, ReferenceState) else xi
    v = np.einsum("kij,jr->kir", channel.kraus, x).reshape(len(channel.kraus), -1)
    return v.T @ v.conj()


def d_bs_channel_choi(s, t, eps_ladder=means.EPS_LADDER):
    """Closed-form BS channel divergence ``n * lambda_max(Tr_1(-(C_S sigma_log C_T)))``."""
    n = s.dim
    if t.dim != n:
        raise ValueError(f"channel dimensions differ ({n} vs {t.dim})")
    cs, ct = s.choi(), t.choi()
    log = means.log_fn()
    res = means.kubo_ando_closed(cs, ct, log, eps_ladder)

    def value_of(mean):
        m = la.partial_trace(-mean, "first", (n, n))
        return float(n * np.linalg.eigvalsh(la.hermitian(m))[-1])

    if res.status == means.EXACT:
        return st.DivergenceResult(max(value_of(res.value), 0.0), st.FINITE, method="choi")
    rungs = means.ladder_rungs(cs, ct, log, eps_ladder)
    eps = [e for e, _ in rungs]
    vals = [value_of(m) for _, m in rungs]
    trace = [(float(e), float(v)) for e, v in zip(eps, vals)]
    slope = means.fitted_slope(eps, vals)
    extras = {"slope": slope}
    if means.ladder_diverges(eps, vals):
        return st.DivergenceResult(np.inf, st.INFINITE, trace, "choi", extras)
    return st.DivergenceResult(max(vals[-1], 0.0), st.FINITE, trace, "choi", extras)


def _bs_objective(s, t):
    def g(x):
        return st.bs_value(output_density(s, x), output_density(t, x))
    return g


def _f_objective(s, t, f):
    def g(x):
        a, b = output_density(s, x), output_density(t, x)
        return st.d_f_closed(a, b, f).value
    return g


def _to_x(p, n, r, floor=0.0):
    """Unit-norm ``X`` from real parameters, singular values floored at ``floor * s_max``."""
    x = (p[: n * r] + 1j * p[n * r:]).reshape(n, r)
    if floor > 0 and np.any(x):
        u, sv, vh = np.linalg.svd(x, full_matrices=False)
        x = (u * np.maximum(sv, floor * sv[0])) @ vh
    nrm = np.linalg.norm(x)
    return x / nrm if nrm > 0 else x


def _to_params(x):
    z = np.asarray(x, dtype=complex).reshape(-1)
    return np.concatenate([z.real, z.imag])


def _maximise(objective, n, cfg):
    """Multi-start Nelder-Mead (plus quasi-Newton polish) of ``objective(X)`` over unit ``X``."""
    r = cfg.reference_dim or n
    cap = cfg.cap

    floor = cfg.singular_floor

    def value(p):
        x = _to_x(p, n, r, floor)
        if not np.any(x):
            return -np.inf
        v = objective(x)
        return cap if not np.isfinite(v) or v > cap else v

    def loss(p):
        return -value(p)

    rng = np.random.default_rng(cfg.seed)
    omega = np.zeros((n, r), dtype=complex)
    omega[:, :n] = np.eye(n) / np.sqrt(n)
    u = ch.random_isometry(rng, r, r)
    starts = [_to_params(omega), _to_params(omega @ u)]
    probes = [rng.normal(size=2 * n * r) for _ in range(cfg.random_probe)]
    if probes:
        starts.append(max(probes, key=value))
    seeds = [int(s) for s in rng.integers(0, 2 ** 31 - 1, size=cfg.restarts)]

    def run(idx):
        p0 = starts[idx] if idx < len(starts) else \
            np.random.default_rng(seeds[idx - len(starts)]).normal(size=2 * n * r)
        res = minimize(loss, p0, method="Nelder-Mead",
                       options={"maxfev": cfg.max_evals, "adaptive": True,
                                "xatol": 1e-10, "fatol": 1e-12})
        best_p, best_v = res.x, -res.fun
        if cfg.polish and best_v < cap:
            pol = minimize(loss, best_p, method="BFGS",
                           options={"maxiter": 200, "gtol": 1e-10})
            if -pol.fun > best_v and np.isfinite(pol.fun):
                best_p, best_v = pol.x, -pol.fun
        return best_v, idx, best_p

    total = len(starts) + cfg.restarts
    with warnings.catch_warnings():
        # line-search stalls are expected once the polish reaches rounding level
        warnings.filterwarnings("ignore", message="The line search algorithm")
        if cfg.threads > 1:
            with ThreadPoolExecutor(cfg.threads) as pool:
                runs = list(pool.map(run, range(total)))
        else:
            runs = [run(i) for i in range(total)]
    best_v, best_idx, best_p = max(runs, key=lambda z: (z[0], -z[1]))
    return best_v, _to_x(best_p, n, r, floor), [(i, float(v)) for v, i, _ in runs]


def _opt_result(s, t, objective, cfg, method):
    n = s.dim
    if t.dim != n:
        raise ValueError(f"channel dimensions differ ({n} vs {t.dim})")
    v, x, runs = _maximise(objective, n, cfg)
    witness = ReferenceState(n, x)
    extras = {"restarts": runs, "capped": bool(v >= cfg.cap)}
    return st.DivergenceResult(float(v), st.LOWER_BOUND, method=method, extras=extras), witness


def d_bs_channel_opt(s, t, cfg=None):
    """Lower bound on the BS channel divergence by maximising over reference vectors."""
    cfg = cfg or OptimizerConfig()
    return _opt_result(s, t, _bs_objective(s, t), cfg, "optimize")


def d_f_channel_opt(s, t, f, cfg=None):
    """Lower bound on the maximal f channel divergence by maximising over reference vectors."""
    cfg = cfg or OptimizerConfig()
    return _opt_result(s, t, _f_objective(s, t, f), cfg, "optimize")


def state_divergence_at(s, t, xi, f=None):
    """State-level divergence of the two outputs at a fixed reference vector."""
    a, b = output_density(s, xi), output_density(t, xi)
    if f is None:
        return st.d_bs(a, b)
    return st.d_f_closed(a, b, f)


@dataclass
class ChannelDivergenceReport:
    value: float
    choi: st.DivergenceResult
    opt: st.DivergenceResult = None
    witness: ReferenceState = None
    agreement: float = float("nan")
    epsilon_trace: list = field(default_factory=list)

    def to_dict(self):
        from .io import result_to_dict, format_float, vector_to_json
        out = {"value": format_float(self.value),
               "choi": result_to_dict(self.choi)}
        if self.opt is not None:
            out["opt"] = result_to_dict(self.opt)
            out["witness"] = vector_to_json(self.witness.vector)
            out["agreement"] = format_float(self.agreement)
        out["epsilon_trace"] = [[format_float(e), format_float(v)] for e, v in self.epsilon_trace]
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def channel_report(s, t, method="both", cfg=None):
    """Run the requested routes and assemble a :class:`ChannelDivergenceReport`."""
    choi = d_bs_channel_choi(s, t)
    opt = witness = None
    agreement = float("nan")
    if method in ("optimize", "both"):
        opt, witness = d_bs_channel_opt(s, t, cfg)
        if np.isfinite(choi.value):
            agreement = abs(choi.value - opt.value)
    return ChannelDivergenceReport(choi.value, choi, opt, witness, agreement, choi.epsilon_trace)


def complexity(t, method="both", cfg=None):
    """``c(T) = D_BS(id || T)`` with both routes."""
    return channel_report(ch.identity(t.dim), t, method, cfg)
