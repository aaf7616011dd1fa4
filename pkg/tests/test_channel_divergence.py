import json

import numpy as np
import pytest
import scipy.linalg as sla

from qdiv import channel_divergence as cd
from qdiv import channels as ch
from qdiv import means
from oracles import connection_invertible, partial_trace_first

FAST = cd.OptimizerConfig(restarts=0, random_probe=16, max_evals=800)

PINCHINGS = [([1, 1], 2), ([1, 1, 1], 3), ([1, 1, 1, 1], 4), ([2, 2], 2), ([2, 1, 1], 3)]
EXPECTATIONS = [((1, 2), 4), ((2, 2), 4), ((1, 3), 9)]


@pytest.mark.parametrize("sizes,n_blocks", PINCHINGS)
def test_pinching_complexity_is_log_n(sizes, n_blocks):
    res = cd.d_bs_channel_choi(ch.identity(sum(sizes)), ch.diagonal_pinching(sizes))
    assert res.value == pytest.approx(np.log(n_blocks), abs=1e-10)


@pytest.mark.parametrize("kj,index", EXPECTATIONS)
def test_conditional_expectation_complexity_is_log_index(kj, index):
    e = ch.conditional_expectation(*kj)
    res = cd.d_bs_channel_choi(ch.identity(e.dim), e)
    assert res.value == pytest.approx(np.log(index), abs=1e-10)


def test_pinching_optimizer_reaches_log_n():
    rep = cd.complexity(ch.diagonal_pinching([1, 1, 1]), cfg=FAST)
    assert rep.opt.value == pytest.approx(np.log(3), abs=1e-3)
    assert rep.opt.value <= rep.choi.value + 1e-9


@pytest.mark.parametrize("theta", [np.pi, np.pi / 2])
def test_nonscalar_unitary_diverges(theta):
    u = np.diag([1.0, np.exp(1j * theta)])
    res = cd.d_bs_channel_choi(ch.identity(2), ch.unitary_channel(u))
    assert res.infinite
    assert res.extras["slope"] >= 0.9
    vals = [v for _, v in res.epsilon_trace]
    steps = np.diff(vals)
    # affine growth in k log 10
    assert np.allclose(steps[-4:], np.log(10) * res.extras["slope"], rtol=1e-3)


def test_scalar_unitary_is_free():
    u = np.exp(0.7j) * np.eye(3)
    assert cd.d_bs_channel_choi(ch.identity(3), ch.unitary_channel(u)).value <= 1e-8


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_equal_channels_give_zero(seed):
    s = ch.random_channel(seed, 2, 3)
    assert abs(cd.d_bs_channel_choi(s, s).value) <= 1e-8


def _choi_oracle(s, t):
    cs, ct = s.choi(), t.choi()
    k = -connection_invertible(cs, ct, sla.logm)
    n = s.dim
    return n * np.linalg.eigvalsh(partial_trace_first(k, n, n))[-1]


@pytest.mark.parametrize("seed", [3, 4, 5])
def test_choi_route_matches_scipy_for_full_rank_channels(seed):
    s = ch.random_channel(seed, 2, 4)
    t = ch.random_channel(seed + 100, 2, 4)
    assert cd.d_bs_channel_choi(s, t).value == pytest.approx(_choi_oracle(s, t), abs=1e-9)


def test_output_density_is_the_dual_channel_on_the_reference_state():
    s = ch.random_channel(7, 2, 2)
    x = np.array([[0.8, 0.1j], [0.2, 0.5]])
    xi = cd.ReferenceState(2, x)
    rho = cd.output_density(s, xi)
    v = xi.vector.reshape(-1, 1)
    proj = v @ v.conj().T
    # apply S^+ to the first factor, one reference matrix unit at a time
    expected = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            blk = proj.reshape(2, 2, 2, 2)[:, i, :, j]
            e = np.zeros((2, 2))
            e[i, j] = 1.0
            expected += np.kron(s.apply_dual(blk), e)
    assert np.allclose(rho, expected)
    assert np.trace(rho).real == pytest.approx(1.0)


def test_any_reference_state_bounds_the_choi_value():
    s, t = ch.random_channel(8, 2, 2), ch.random_channel(9, 2, 4)
    choi = cd.d_bs_channel_choi(s, t).value
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
        val = cd.state_divergence_at(s, t, cd.ReferenceState(2, x)).value
        assert val <= choi + 1e-9


@pytest.mark.parametrize("seed", [10, 11])
def test_two_routes_agree_and_witness_reproduces(seed):
    s, t = ch.random_channel(seed, 2, 2), ch.random_channel(seed + 50, 2, 4)
    opt, witness = cd.d_bs_channel_opt(s, t, FAST)
    choi = cd.d_bs_channel_choi(s, t).value
    assert opt.status == "lower_bound"
    assert opt.value <= choi + 1e-9
    assert abs(choi - opt.value) <= 1e-3
    assert cd.state_divergence_at(s, t, witness).value == pytest.approx(opt.value, rel=1e-8)


def test_larger_reference_space_changes_nothing():
    s, t = ch.random_channel(12, 2, 2), ch.random_channel(13, 2, 4)
    cfg = cd.OptimizerConfig(restarts=0, random_probe=16, reference_dim=3)
    opt, witness = cd.d_bs_channel_opt(s, t, cfg)
    assert witness.reference_dim == 3
    choi = cd.d_bs_channel_choi(s, t).value
    assert opt.value <= choi + 1e-9 and abs(choi - opt.value) <= 1e-3


def test_threads_do_not_change_the_answer():
    s, t = ch.random_channel(14, 2, 2), ch.random_channel(15, 2, 4)
    cfg1 = cd.OptimizerConfig(restarts=2, random_probe=8, max_evals=300, threads=1)
    cfg2 = cd.OptimizerConfig(restarts=2, random_probe=8, max_evals=300, threads=2)
    assert cd.d_bs_channel_opt(s, t, cfg1)[0].value == cd.d_bs_channel_opt(s, t, cfg2)[0].value


def test_f_channel_optimizer_is_zero_on_equal_channels():
    s = ch.random_channel(16, 2, 2)
    res, _ = cd.d_f_channel_opt(s, s, means.alpha_geometric(0.5), FAST)
    assert abs(res.value) <= 1e-8


def test_report_serialises():
    rep = cd.complexity(ch.diagonal_pinching([1, 1]), cfg=FAST)
    out = json.loads(rep.to_json())
    assert out["value"] == pytest.approx(np.log(2), abs=1e-10)
    assert set(out) >= {"choi", "opt", "witness", "agreement", "epsilon_trace"}
    inf = cd.complexity(ch.unitary_channel(np.diag([1.0, -1.0])), method="choi")
    assert json.loads(inf.to_json())["value"] == "inf"


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        cd.d_bs_channel_choi(ch.identity(2), ch.identity(3))
