"""Command-line front end.

Channels are read in the Heisenberg convention ``S(m) = sum_i a_i^dagger m a_i``
with ``sum_i a_i^dagger a_i = I``; the JSON file lists the ``a_i``.

Exit codes: 0 ok, 2 parse error, 3 precondition failure, 4 paths disagree,
5 non-convergence.  Errors print ``error code=<n> kind=<kind>: <message>``
to stderr.
"""

import argparse
import math
import os
import sys

import numpy as np

from . import channel_divergence as cd
from . import means, qft, states, suites
from .errors import ComputationInconsistent, EquivalenceViolation, KernelSingularity, NonConvergence
from .io import (FormatError, channel_from_json, dumps, format_float, functional_from_json,
                 load_json, matrix_from_json, matrix_to_json, result_to_dict)

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_INCONSISTENT, EXIT_NONCONVERGENCE = 0, 2, 3, 4, 5
STATE_CROSS_TOL = 1e-6
VARIATIONAL_GAP = 1e-4


class CliError(Exception):
    def __init__(self, code, kind, message):
        super().__init__(message)
        self.code = code
        self.kind = kind


def parse_f(text):
    """``bs | alpha:A | left | right | logn:N`` to a monotone function (``None`` for bs)."""
    name, _, arg = text.partition(":")
    try:
        if name == "bs":
            return None
        if name == "alpha":
            return means.alpha_geometric(float(arg))
        if name == "left":
            return means.left_trivial()
        if name == "right":
            return means.right_trivial()
        if name == "logn":
            return means.log_n(float(arg))
    except ValueError as exc:
        raise CliError(EXIT_PRECONDITION, "precondition", str(exc)) from exc
    raise CliError(EXIT_PARSE, "parse", f"unknown function {text!r}")


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise CliError(EXIT_PARSE, "parse", f"bad number list {text!r}") from exc


def _threads(args):
    if args.threads:
        return args.threads
    env = os.environ.get("QDIV_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError as exc:
        raise CliError(EXIT_PARSE, "parse", f"QDIV_THREADS must be an integer, got {env!r}") from exc


def _load(path, loader):
    try:
        return loader(load_json(path))
    except FormatError as exc:
        raise CliError(EXIT_PARSE, "parse", str(exc)) from exc
    except ValueError as exc:
        raise CliError(EXIT_PRECONDITION, "precondition", f"{path}: {exc}") from exc


# --------------------------------------------------------------------------- subcommands


def cmd_state(args):
    phi = _load(args.phi, functional_from_json)
    psi = _load(args.psi, functional_from_json)
    if phi.block_dims != psi.block_dims:
        raise CliError(EXIT_PRECONDITION, "precondition",
                       f"functionals live on different algebras {phi.block_dims} vs {psi.block_dims}")
    if not args.allow_weights:
        for label, x in (("phi", phi), ("psi", psi)):
            if not x.is_state():
                raise CliError(EXIT_PRECONDITION, "precondition",
                               f"{label} has weight {x.weight:.12g}; pass --allow-weights for unnormalised input")
    f = parse_f(args.f)
    ladder = tuple(_float_list(args.eps_ladder)) if args.eps_ladder else means.EPS_LADDER
    methods = ["closed", "variational", "regularized"] if args.method == "all" else [args.method]
    out = {}
    for m in methods:
        if m == "closed":
            r = states.d_bs(phi, psi, eps_ladder=ladder) if f is None else \
                states.d_f_closed(phi, psi, f, eps_ladder=ladder)
        elif m == "regularized":
            r = states.d_bs(phi, psi, eps_ladder=ladder, force_ladder=True) if f is None else \
                states.d_f_closed(phi, psi, f, eps_ladder=ladder, force_ladder=True)
        else:
            if f is None:
                grid = [int(x) for x in _float_list(args.ngrid)] if args.ngrid else states.N_GRID
                r = states.d_bs_variational(phi, psi, grid, nodes=args.quad_nodes)
            else:
                r = states.d_f_variational(phi, psi, f)
        out[m] = r
    primary = out[methods[0]]
    report = result_to_dict(primary)
    if len(methods) > 1:
        report["methods"] = {m: result_to_dict(r) for m, r in out.items()}
        _check_state_agreement(out, f)
    return report


def _check_state_agreement(out, f):
    closed, reg, var = out["closed"], out["regularized"], out["variational"]
    if closed.infinite or reg.infinite:
        if closed.infinite != reg.infinite:
            raise CliError(EXIT_INCONSISTENT, "inconsistent",
                           f"closed ({closed.value}) and regularized ({reg.value}) disagree on finiteness")
        return
    # the ladder's own remaining error: geometric tail of its last step (rungs are
    # a decade apart, and even the slowest catalogue member gains a factor 10^0.25)
    tail = 0.0
    if len(reg.epsilon_trace) >= 2:
        tail = 2.0 * abs(reg.epsilon_trace[-1][1] - reg.epsilon_trace[-2][1])
    if abs(closed.value - reg.value) > STATE_CROSS_TOL * max(1.0, abs(closed.value)) + tail:
        raise CliError(EXIT_INCONSISTENT, "inconsistent",
                       f"closed {closed.value:.12g} vs regularized {reg.value:.12g}")
    gap = closed.value - var.value
    limit = VARIATIONAL_GAP if f is None else STATE_CROSS_TOL
    if (f is None and not -1e-9 <= gap <= limit) or (f is not None and abs(gap) > limit):
        raise CliError(EXIT_INCONSISTENT, "inconsistent",
                       f"closed {closed.value:.12g} vs variational {var.value:.12g}")


def _opt_config(args):
    return cd.OptimizerConfig(restarts=args.restarts, seed=args.seed, threads=_threads(args))


def _channel_report(s, t, args):
    if s.dim_in != t.dim_in or not s.square or not t.square:
        raise CliError(EXIT_PRECONDITION, "precondition", "channels must be square with equal dimensions")
    rep = cd.channel_report(s, t, args.method, _opt_config(args))
    if args.method == "optimize":
        rep.value = rep.opt.value
    out = rep.to_dict()
    if args.method == "optimize":
        del out["choi"]
    if args.method == "both" and np.isfinite(rep.choi.value) and rep.agreement > cd.AGREE_TOL:
        print(dumps(out))
        raise CliError(EXIT_INCONSISTENT, "inconsistent",
                       f"choi {rep.choi.value:.12g} vs optimize {rep.opt.value:.12g}")
    return out


def cmd_channel(args):
    s = _load(args.s, channel_from_json)
    t = _load(args.t, channel_from_json)
    return _channel_report(s, t, args)


def cmd_complexity(args):
    from .channels import identity
    t = _load(args.t, channel_from_json)
    if not t.square:
        raise CliError(EXIT_PRECONDITION, "precondition", "complexity needs a square channel")
    return _channel_report(identity(t.dim), t, args)


def cmd_mean(args):
    a = _load(args.a, matrix_from_json)
    b = _load(args.b, matrix_from_json)
    if a.shape != b.shape:
        raise CliError(EXIT_PRECONDITION, "precondition", f"dimension mismatch {a.shape} vs {b.shape}")
    f = parse_f(args.f) or means.log_fn()
    try:
        r = means.kubo_ando_mean(a, b, f, path=args.path)
    except ValueError as exc:
        raise CliError(EXIT_PRECONDITION, "precondition", str(exc)) from exc
    return {"value": matrix_to_json(r.value), "status": r.status, "path": r.path,
            "epsilon_trace": [[format_float(e), format_float(v)] for e, v in r.epsilon_trace]}


def cmd_verify(args):
    names = args.suites or list(suites.SUITES)
    unknown = [n for n in names if n not in suites.SUITES]
    if unknown:
        raise CliError(EXIT_PRECONDITION, "precondition", f"unknown suites {unknown}")
    cfg = suites.SuiteConfig(seed=args.seed, trials=args.trials or 0)
    reports = [suites.run_suite(n, cfg) for n in names]
    if args.summary:
        for r in reports:
            print(r.summary_line(), file=sys.stderr)
    ok = all(r.ok for r in reports)
    return {"ok": ok, "reports": [r.to_dict() for r in reports]}, (EXIT_OK if ok else EXIT_INCONSISTENT)


def cmd_qft(args):
    if args.calc == "lattice":
        if args.cells is not None:
            spec = qft.LatticeSpec(float(args.cells), 1.0, 2)
        else:
            spec = qft.LatticeSpec(args.volume, args.delta, args.dim)
        c = qft.lattice_measurement_complexity(spec)
        return {"cells": format_float(spec.cells), "complexity": format_float(c),
                "complexity_over_log2": format_float(c / math.log(2))}
    if args.calc == "tableau":
        try:
            diagram = qft.YoungDiagram.parse(args.rows)
            d, c = qft.statistical_dimension(diagram, args.n)
        except ValueError as exc:
            raise CliError(EXIT_PRECONDITION, "precondition", str(exc)) from exc
        return {"rows": list(diagram.rows), "N": args.n, "d": d, "complexity": format_float(c)}
    label, m, nearest = qft.jones_admissible(args.x, args.tol)
    return {"x": format_float(args.x), "class": label, "n": m, "nearest": format_float(nearest)}


# --------------------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_PARSE, "parse", f"{self.prog}: {message}")


def build_parser():
    p = _Parser(
        prog="qdiv",
        description="Divergences between states and between channels. "
                    "Channel files list Kraus operators a_i in the Heisenberg convention "
                    "S(m) = sum_i a_i^dagger m a_i with sum_i a_i^dagger a_i = I.")
    p.add_argument("--threads", type=int, default=0, help="worker cap (also QDIV_THREADS)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("state", help="divergence between two positive functionals")
    s.add_argument("phi")
    s.add_argument("psi")
    s.add_argument("--f", default="bs", help="bs | alpha:A | left | right | logn:N")
    s.add_argument("--method", default="closed", choices=["closed", "variational", "regularized", "all"])
    s.add_argument("--allow-weights", action="store_true")
    s.add_argument("--eps-ladder", default=None, help="comma-separated regularisation values")
    s.add_argument("--quad-nodes", type=int, default=states.QUAD_NODES)
    s.add_argument("--ngrid", default=None, help="comma-separated n values for the BS brackets")
    s.set_defaults(func=cmd_state)

    for name, fn, helptext in (("channel", cmd_channel, "BS divergence between two channels"),
                               ("complexity", cmd_complexity, "c(T) = D_BS(id || T)")):
        c = sub.add_parser(name, help=helptext,
                           description=helptext + ". Kraus convention: S(m) = sum_i a_i^dagger m a_i.")
        if name == "channel":
            c.add_argument("s")
        c.add_argument("t")
        c.add_argument("--method", default="both", choices=["choi", "optimize", "both"])
        c.add_argument("--restarts", type=int, default=16)
        c.add_argument("--seed", type=int, default=0)
        c.set_defaults(func=fn)

    m = sub.add_parser("mean", help="Kubo-Ando connection of two PSD matrices")
    m.add_argument("a")
    m.add_argument("b")
    m.add_argument("--f", default="alpha:0.5", help="bs (log) | alpha:A | left | right | logn:N")
    m.add_argument("--path", default="closed", choices=["closed", "integral", "auto"])
    m.set_defaults(func=cmd_mean)

    v = sub.add_parser("verify", help="run property suites")
    v.add_argument("suites", nargs="*")
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--trials", type=int, default=0)
    v.add_argument("--summary", action="store_true", help="print a summary table to stderr")
    v.set_defaults(func=cmd_verify)

    q = sub.add_parser("qft", help="closed-form calculators (see the calc subcommands)")
    qs = q.add_subparsers(dest="calc", required=True)
    ql = qs.add_parser("lattice")
    ql.add_argument("--cells", type=float, default=None)
    ql.add_argument("--volume", type=float, default=1.0)
    ql.add_argument("--delta", type=float, default=1.0)
    ql.add_argument("--dim", type=int, default=2)
    qt = qs.add_parser("tableau")
    qt.add_argument("rows", help="comma-separated row lengths, e.g. 2,1,1")
    qt.add_argument("--n", type=int, required=True)
    qj = qs.add_parser("jones")
    qj.add_argument("x", type=float)
    qj.add_argument("--tol", type=float, default=1e-9)
    q.set_defaults(func=cmd_qft)
    return p


def _fail(code, kind, message):
    print(f"error code={code} kind={kind}: {message}", file=sys.stderr)
    return code


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        result = args.func(args)
        code = EXIT_OK
        if isinstance(result, tuple):
            result, code = result
        print(dumps(result))
        return code
    except CliError as exc:
        return _fail(exc.code, exc.kind, str(exc))
    except ComputationInconsistent as exc:
        return _fail(EXIT_INCONSISTENT, "inconsistent", str(exc))
    except NonConvergence as exc:
        return _fail(EXIT_NONCONVERGENCE, "nonconvergence", str(exc))
    except (EquivalenceViolation, KernelSingularity, ValueError) as exc:
        return _fail(EXIT_PRECONDITION, "precondition", str(exc))


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
