"""Maximal f-divergences and channel complexity for finite-dimensional algebras."""

from .channel_divergence import (ChannelDivergenceReport, OptimizerConfig, ReferenceState, channel_report,
                                 complexity, d_bs_channel_choi, d_bs_channel_opt, d_f_channel_opt)
from .channels import (KrausChannel, compose, conditional_expectation, diagonal_pinching, from_choi, identity,
                       mix, pinching, tensor, unitary_channel)
from .errors import (ComputationInconsistent, EquivalenceViolation, KernelSingularity, NonConvergence,
                     QdivError)
from .means import (JointPencil, MeanResult, MonotoneFn, alpha_geometric, catalog, kubo_ando_mean, left_trivial,
                    log_fn, log_n, parallel_sum, right_trivial)
from .states import (DivergenceResult, PositiveFunctional, StepFunction, alpha_limit, bs_bracket, d_bs,
                     d_bs_variational, d_f_closed, d_f_variational)
from .suites import SUITES, SuiteConfig, SuiteReport, run_suite

__all__ = [
    "ChannelDivergenceReport",
    "OptimizerConfig",
    "ReferenceState",
    "channel_report",
    "complexity",
    "d_bs_channel_choi",
    "d_bs_channel_opt",
    "d_f_channel_opt",
    "KrausChannel",
    "compose",
    "conditional_expectation",
    "diagonal_pinching",
    "from_choi",
    "identity",
    "mix",
    "pinching",
    "tensor",
    "unitary_channel",
    "ComputationInconsistent",
    "EquivalenceViolation",
    "KernelSingularity",
    "NonConvergence",
    "QdivError",
    "JointPencil",
    "MeanResult",
    "MonotoneFn",
    "alpha_geometric",
    "catalog",
    "kubo_ando_mean",
    "left_trivial",
    "log_fn",
    "log_n",
    "parallel_sum",
    "right_trivial",
    "DivergenceResult",
    "PositiveFunctional",
    "StepFunction",
    "alpha_limit",
    "bs_bracket",
    "d_bs",
    "d_bs_variational",
    "d_f_closed",
    "d_f_variational",
    "SUITES",
    "SuiteConfig",
    "SuiteReport",
    "run_suite",
]

__version__ = "0.1.0"
