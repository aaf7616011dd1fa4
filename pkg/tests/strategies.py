"""Hypothesis strategies for small PSD matrices and states."""

import numpy as np
from hypothesis import strategies as st

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
dims = st.integers(min_value=2, max_value=4)


def psd_from_seed(seed, n, rank=None, faithful_shift=0.0):
    rng = np.random.default_rng(seed)
    rank = n if rank is None else rank
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    return g @ g.conj().T + faithful_shift * np.eye(n)


def state_from_seed(seed, n, faithful=True):
    rho = psd_from_seed(seed, n, faithful_shift=0.05 if faithful else 0.0)
    return rho / np.trace(rho).real


@st.composite
def state_pairs(draw, faithful=True, max_dim=4):
    n = draw(st.integers(min_value=2, max_value=max_dim))
    s1, s2 = draw(seeds), draw(seeds)
    return state_from_seed(s1, n, faithful), state_from_seed(s2, n, faithful)


@st.composite
def psd_pairs(draw, max_dim=4):
    n = draw(st.integers(min_value=2, max_value=max_dim))
    ra = draw(st.integers(min_value=1, max_value=n))
    rb = draw(st.integers(min_value=1, max_value=n))
    return psd_from_seed(draw(seeds), n, ra), psd_from_seed(draw(seeds), n, rb)
