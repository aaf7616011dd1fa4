"""Seeded verification suites for the inequalities and identities of the toolkit.

Each suite draws its inputs from an RNG stream derived from ``(seed, trial)``
so single trials can be replayed.  Trial 0 is always an analytically forced
equality case.  The violation of an inequality ``lhs <= rhs`` is
``max(0, lhs - rhs)``; for an identity it is ``|lhs - rhs|``.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import channels as ch
from . import channel_divergence as cd
from . import linalg as la
from . import means
from . import states as st
from .io import channel_to_json, format_float, matrix_to_json

ALPHAS = (0.25, 0.5, 0.75)


@dataclass
class SuiteConfig:
    seed: int = 42
    trials: int = 0
    dims: tuple = ()
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials < 0:
            raise ValueError("trials must be >= 1 (0 selects the suite default)")
        if any(d < 2 for d in self.dims):
            raise ValueError("dims must each be >= 2")


@dataclass
class SuiteReport:
    suite: str
    passed: int
    failed: int
    worst_violation: float
    tolerance: float
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self):
        return self.failed == 0

    def to_dict(self):
        return {"suite": self.suite, "passed": self.passed, "failed": self.failed,
                "worst_violation": format_float(self.worst_violation),
                "tolerance": format_float(self.tolerance),
                "counterexamples": self.counterexamples}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def summary_line(self):
        flag = "PASS" if self.ok else "FAIL"
        return (f"{self.suite:<24} {flag}  passed={self.passed:<4d} failed={self.failed:<4d} "
                f"worst={self.worst_violation:.3e} tol={self.tolerance:.1e}")


# --------------------------------------------------------------------------- samplers


def trial_rng(seed, trial):
    return np.random.default_rng([seed, trial])


def random_psd(rng, n, rank=None):
    rank = n if rank is None else rank
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    return g @ g.conj().T


def random_state(rng, n, faithful=True):
    rho = random_psd(rng, n)
    rho /= np.trace(rho).real
    if faithful:
        rho = rho + 0.01 * np.eye(n) / n
        rho /= np.trace(rho).real
    return rho


def random_hermitian(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (g + g.conj().T)


def random_projection(rng, n, rank, common=None):
    """Projection of the given rank whose range contains the columns of ``common``."""
    basis = [] if common is None else [common]
    extra = rank - (0 if common is None else common.shape[1])
    g = rng.normal(size=(n, max(extra, 0))) + 1j * rng.normal(size=(n, max(extra, 0)))
    m = np.hstack(basis + [g]) if basis else g
    q, _ = np.linalg.qr(m)
    q = q[:, :rank]
    return q @ q.conj().T


def random_channel(rng, n, rank=None):
    rank = int(rng.integers(1, 4)) if rank is None else rank
    return ch.random_channel(rng, n, rank)


def full_rank_channel(rng, n):
    return ch.random_channel(rng, n, n * n)


def _choi_value(s, t):
    return cd.d_bs_channel_choi(s, t).value


# --------------------------------------------------------------------------- suites


def _loewner_violation(lhs, rhs):
    """Failure of ``lhs <= rhs`` measured relative to the operator norm of the inputs."""
    scale = max(1.0, np.linalg.norm(lhs, 2), np.linalg.norm(rhs, 2))
    return max(0.0, -la.loewner_min_eig(lhs, rhs)) / scale


def _kubo_ando_axioms(rng, trial, dims):
    n = int(rng.choice(dims))
    fs = [means.alpha_geometric(a) for a in ALPHAS] + [means.log_n(10)]
    worst = 0.0
    if trial == 0:
        a = random_psd(rng, n)
        b = random_psd(rng, n)
        c, d = a, b
        p = q = random_projection(rng, n, max(1, n // 2))
    else:
        a = random_psd(rng, n, int(rng.integers(1, n + 1)))
        b = random_psd(rng, n, int(rng.integers(1, n + 1)))
        c = a + random_psd(rng, n, int(rng.integers(1, n + 1)))
        d = b + random_psd(rng, n, int(rng.integers(1, n + 1)))
        k = int(rng.integers(0, n))
        common = None
        if k > 0:
            g = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
            common = np.linalg.qr(g)[0]
        p = random_projection(rng, n, int(rng.integers(max(k, 1), n + 1)), common)
        q = random_projection(rng, n, int(rng.integers(max(k, 1), n + 1)), common)
    h = random_hermitian(rng, n)
    for f in fs:
        lo = means.kubo_ando_mean(a, b, f, path="closed").value
        hi = means.kubo_ando_mean(c, d, f, path="closed").value
        # f(0) < 0 breaks monotonicity in the first argument; the shifted
        # function f - f(0) is positive and its connection is sigma - f(0) A
        shift = -min(f.a, 0.0)
        worst = max(worst, _loewner_violation(lo + shift * a, hi + shift * c))
        worst = max(worst, _loewner_violation(lo, means.kubo_ando_mean(a, d, f, path="closed").value))
        lhs = h @ lo @ h
        rhs = means.kubo_ando_mean(h @ a @ h, h @ b @ h, f, path="closed").value
        worst = max(worst, _loewner_violation(lhs, rhs))
        if abs(f(1.0) - 1.0) < 1e-15:
            eye = np.eye(n)
            worst = max(worst, np.max(np.abs(means.kubo_ando_mean(eye, eye, f, path="closed").value - eye)))
        for t in (0.1, 1.0, 10.0):
            m = means.kubo_ando_mean(np.eye(n), t * np.eye(n), f, path="closed").value
            worst = max(worst, np.max(np.abs(m - f(t) * np.eye(n))))
    nn = int(rng.integers(2, 1000))
    meet = means.projection_meet(p, q)
    expected = (meet - p) * np.log(nn) + meet * np.log(1 + 1.0 / nn)
    got = means.kubo_ando_mean(p, q, means.log_n(nn), path="closed").value
    worst = max(worst, np.max(np.abs(got - expected)))
    return worst, {"A": matrix_to_json(a), "B": matrix_to_json(b), "C": matrix_to_json(c),
                   "D": matrix_to_json(d), "P": matrix_to_json(p), "Q": matrix_to_json(q), "n": nn}


def _state_dpi(rng, trial, dims):
    n = int(rng.choice(dims))
    rho, sigma = random_state(rng, n), random_state(rng, n)
    t = ch.identity(n) if trial == 0 else random_channel(rng, n)
    phi, psi = st.PositiveFunctional(rho), st.PositiveFunctional(sigma)
    phit, psit = phi.compose(t), psi.compose(t)
    worst = max(0.0, st.d_bs(phit, psit).value - st.d_bs(phi, psi).value)
    for a in ALPHAS:
        f = means.alpha_geometric(a)
        worst = max(worst, st.d_f_closed(phit, psit, f).value - st.d_f_closed(phi, psi, f).value)
    return worst, {"rho": matrix_to_json(rho), "sigma": matrix_to_json(sigma),
                   "channel": channel_to_json(t)}


def _state_convexity(rng, trial, dims):
    n = int(rng.choice([d for d in dims if d <= 4] or [2]))
    k = 1 if trial == 0 else int(rng.integers(2, 5))
    p = rng.dirichlet(np.ones(k))
    rhos = [random_state(rng, n) for _ in range(k)]
    sigmas = [random_state(rng, n) for _ in range(k)]
    lhs = st.d_bs(sum(w * r for w, r in zip(p, rhos)), sum(w * s for w, s in zip(p, sigmas))).value
    rhs = sum(w * st.d_bs(r, s).value for w, r, s in zip(p, rhos, sigmas))
    return max(0.0, lhs - rhs), {"p": [float(x) for x in p],
                                 "rhos": [matrix_to_json(r) for r in rhos],
                                 "sigmas": [matrix_to_json(s) for s in sigmas]}


def _eps_independence(rng, trial, dims):
    n = int(rng.choice(dims))
    if trial == 0:
        rho = sigma = random_state(rng, n, faithful=False)
    else:
        sigma = random_state(rng, n, faithful=False)
        # rho supported inside sigma's support, rank deficient in general
        w, u = np.linalg.eigh(sigma)
        k = int(rng.integers(1, n + 1))
        v = u[:, -k:]
        rho = v @ random_psd(rng, k, int(rng.integers(1, k + 1))) @ v.conj().T
        rho /= np.trace(rho).real
    r1 = st.d_bs(rho, sigma, force_ladder=True, reg_scale=1.0).value
    r2 = st.d_bs(rho, sigma, force_ladder=True, reg_scale=2.0).value
    worst = abs(r1 - r2)
    # alpha ladders converge like eps^alpha on rank-deficient pairs, so the
    # regulariser comparison for them uses faithful pairs
    rf, sf = random_state(rng, n), random_state(rng, n)
    f = means.alpha_geometric(float(rng.choice(ALPHAS)))
    a1 = st.d_f_closed(rf, sf, f, force_ladder=True, reg_scale=1.0).value
    a2 = st.d_f_closed(rf, sf, f, force_ladder=True, reg_scale=2.0).value
    worst = max(worst, abs(a1 - a2))
    return worst, {"rho": matrix_to_json(rho), "sigma": matrix_to_json(sigma)}


def _variational_consistency(rng, trial, dims):
    n = int(rng.choice([d for d in dims if d <= 3] or [2]))
    rho = random_state(rng, n)
    sigma = rho if trial == 0 else random_state(rng, n)
    exact = st.d_bs(rho, sigma).value
    var = st.d_bs_variational(rho, sigma)
    seq = [v for _, v in var.extras["sequence"]]
    worst = max(0.0, exact - seq[-1], seq[-1] - exact - 1e-9)
    worst = max(worst, max([0.0] + [a - b for a, b in zip(seq, seq[1:])]))
    for a in ALPHAS:
        f = means.alpha_geometric(a)
        worst = max(worst, abs(st.d_f_variational(rho, sigma, f).value - st.d_f_closed(rho, sigma, f).value))
    return worst, {"rho": matrix_to_json(rho), "sigma": matrix_to_json(sigma)}


def _alpha_limit(rng, trial, dims):
    n = int(rng.choice(dims))
    rho = random_state(rng, n)
    sigma = rho if trial == 0 else random_state(rng, n)
    exact = st.d_bs(rho, sigma).value
    limit = st.alpha_limit(rho, sigma)
    return abs(limit - exact) / max(abs(exact), 1e-3), {"rho": matrix_to_json(rho),
                                                        "sigma": matrix_to_json(sigma)}


def _channel_dpi(rng, trial, dims):
    n = int(rng.choice(dims))
    s1 = random_channel(rng, n)
    s2 = full_rank_channel(rng, n)
    t = ch.identity(n) if trial == 0 else random_channel(rng, n)
    lhs = _choi_value(ch.compose(s1, t), ch.compose(s2, t))
    rhs = _choi_value(s1, s2)
    return max(0.0, lhs - rhs), {"S1": channel_to_json(s1), "S2": channel_to_json(s2),
                                 "T": channel_to_json(t)}


def _chain_rule(rng, trial, dims):
    n = int(rng.choice(dims))
    s1, s2 = random_channel(rng, n), random_channel(rng, n)
    if trial == 0:
        t1, t2 = s1, s2
    else:
        t1, t2 = full_rank_channel(rng, n), full_rank_channel(rng, n)
    lhs = _choi_value(ch.compose(s2, s1), ch.compose(t2, t1))
    rhs = _choi_value(s1, t1) + _choi_value(s2, t2)
    return max(0.0, lhs - rhs), {"S1": channel_to_json(s1), "S2": channel_to_json(s2),
                                 "T1": channel_to_json(t1), "T2": channel_to_json(t2)}


def _external_additivity(rng, trial, dims):
    n = 2
    s1, s2 = random_channel(rng, n), random_channel(rng, n)
    if trial == 0:
        t1, t2 = s1, s2
    else:
        t1, t2 = full_rank_channel(rng, n), full_rank_channel(rng, n)
    lhs = _choi_value(ch.tensor(s1, s2), ch.tensor(t1, t2))
    rhs = _choi_value(s1, t1) + _choi_value(s2, t2)
    return abs(lhs - rhs), {"S1": channel_to_json(s1), "S2": channel_to_json(s2),
                            "T1": channel_to_json(t1), "T2": channel_to_json(t2)}


def _channel_convexity(rng, trial, dims):
    n = int(rng.choice(dims))
    if trial == 0:
        s = random_channel(rng, n)
        ss, ts, p, q = [s], [s], np.ones(1), np.ones(1)
    else:
        ks, kt = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        ss = [random_channel(rng, n) for _ in range(ks)]
        ts = [full_rank_channel(rng, n) for _ in range(kt)]
        p, q = rng.dirichlet(np.ones(ks)), rng.dirichlet(np.ones(kt))
    lhs = _choi_value(ch.mix(p, ss), ch.mix(q, ts))
    rhs = sum(pi * qj * _choi_value(si, tj) for pi, si in zip(p, ss) for qj, tj in zip(q, ts))
    return max(0.0, lhs - rhs), {"S": [channel_to_json(c) for c in ss],
                                 "T": [channel_to_json(c) for c in ts],
                                 "p": [float(x) for x in p], "q": [float(x) for x in q]}


def _dilation(rng, trial, dims):
    n = 2
    s = random_channel(rng, n)
    t = s if trial == 0 else full_rank_channel(rng, n)
    anc = ch.identity(2)
    lhs = _choi_value(ch.tensor(s, anc), ch.tensor(t, anc))
    return abs(lhs - _choi_value(s, t)), {"S": channel_to_json(s), "T": channel_to_json(t)}


def _locality(rng, trial, dims):
    if trial == 0:
        t1 = t2 = ch.identity(2)
    else:
        t1, t2 = full_rank_channel(rng, 2), full_rank_channel(rng, 2)
    a = ch.tensor(t1, ch.identity(2))
    b = ch.tensor(ch.identity(2), t2)
    both = ch.compose(a, b)
    lhs = cd.complexity(both, method="choi").value
    rhs = cd.complexity(t1, method="choi").value + cd.complexity(t2, method="choi").value
    return abs(lhs - rhs), {"T1": channel_to_json(t1), "T2": channel_to_json(t2)}


def golden_cases():
    """``(label, channel, expected complexity)`` for the closed-form cases."""
    cases = [("identity", ch.identity(2), 0.0)]
    for sizes in ([1, 1], [1, 1, 1], [1, 1, 1, 1], [2, 2], [2, 1, 1]):
        cases.append((f"pinching{sizes}", ch.diagonal_pinching(sizes), np.log(len(sizes))))
    for k, j in ((1, 2), (2, 2), (1, 3)):
        cases.append((f"cond_exp({k},{j})", ch.conditional_expectation(k, j), np.log(j * j)))
    cases.append(("unitary diag(1,-1)", ch.unitary_channel(np.diag([1.0, -1.0])), np.inf))
    cases.append(("scalar unitary", ch.unitary_channel(np.exp(0.7j) * np.eye(2)), 0.0))
    return cases


def _golden_values(rng, trial, dims):
    cases = golden_cases()
    label, t, expected = cases[trial % len(cases)]
    rep = cd.complexity(t, method="choi")
    if np.isinf(expected):
        worst = 0.0 if rep.choi.infinite else np.inf
    else:
        worst = abs(rep.value - expected)
        # state divergence at the maximally entangled reference vector
        omega = cd.ReferenceState(t.dim, la.max_entangled(t.dim))
        worst = max(worst, abs(cd.state_divergence_at(ch.identity(t.dim), t, omega).value - expected))
    return worst, {"case": label, "channel": channel_to_json(t)}


SUITES = {
    "kubo_ando_axioms": (_kubo_ando_axioms, 100, (2, 3, 4, 5), 1e-8),
    "state_dpi": (_state_dpi, 50, (2, 3, 4), 1e-7),
    "state_convexity": (_state_convexity, 50, (2, 3, 4), 1e-7),
    "eps_independence": (_eps_independence, 25, (2, 3, 4), 1e-7),
    "variational_consistency": (_variational_consistency, 20, (2, 3), 1e-4),
    "alpha_limit": (_alpha_limit, 20, (2, 3, 4), 1e-3),
    "channel_dpi": (_channel_dpi, 100, (2, 3), 1e-6),
    "chain_rule": (_chain_rule, 100, (2, 3), 1e-6),
    "external_additivity": (_external_additivity, 25, (2,), 1e-5),
    "channel_convexity": (_channel_convexity, 50, (2, 3), 1e-6),
    "dilation": (_dilation, 25, (2,), 1e-5),
    "locality": (_locality, 25, (2,), 1e-5),
    "golden_values": (_golden_values, len(golden_cases()), (2,), 1e-6),
}


def run_suite(name, cfg=None):
    """Run one named suite and return its :class:`SuiteReport`."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {sorted(SUITES)}")
    cfg = cfg or SuiteConfig()
    fn, default_trials, default_dims, default_tol = SUITES[name]
    trials = cfg.trials or default_trials
    dims = tuple(cfg.dims) or default_dims
    tol = cfg.tolerances.get(name, default_tol)
    passed = failed = 0
    worst = 0.0
    bad = []
    for trial in range(trials):
        violation, inputs = fn(trial_rng(cfg.seed, trial), trial, dims)
        violation = float(violation)
        worst = max(worst, violation)
        if violation <= tol:
            passed += 1
        else:
            failed += 1
            bad.append({"trial": trial, "seed": cfg.seed, "violation": format_float(violation),
                        "inputs": inputs})
    return SuiteReport(name, passed, failed, worst, tol, bad)
