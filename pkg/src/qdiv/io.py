"""JSON encodings used by the command line.

matrix      {"rows": n, "cols": m, "data": [[re, im], ...]}  (row-major)
functional  {"blocks": [matrix, ...]}  or a bare matrix for one block
channel     {"dim": n, "kraus": [matrix, ...]}  with sum_i a_i^dagger a_i = I
"""

import json

import numpy as np

from .channels import KrausChannel
from .states import PositiveFunctional

SIG_DIGITS = 12


class FormatError(ValueError):
    """Input does not follow the JSON schema."""


def format_float(x):
    """12 significant digits; ``"inf"`` for infinities and ``"nan"`` for NaN."""
    x = float(x) + 0.0  # drops the sign of -0.0
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    if np.isnan(x):
        return "nan"
    return float(f"{x:.{SIG_DIGITS}g}")


def matrix_to_json(m):
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]),
            "data": [[format_float(z.real), format_float(z.imag)] for z in m.ravel()]}


def vector_to_json(v):
    return matrix_to_json(np.asarray(v, dtype=complex).reshape(-1, 1))


def matrix_from_json(obj):
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"matrix needs keys rows/cols/data: {exc}") from exc
    if rows < 1 or cols < 1 or len(data) != rows * cols:
        raise FormatError(f"matrix data has {len(data)} entries, expected {rows}x{cols}")
    try:
        vals = [complex(float(re), float(im)) for re, im in data]
    except (TypeError, ValueError) as exc:
        raise FormatError(f"matrix entries must be [re, im] pairs: {exc}") from exc
    return np.array(vals, dtype=complex).reshape(rows, cols)


def functional_from_json(obj):
    if isinstance(obj, dict) and "blocks" in obj:
        blocks = [matrix_from_json(b) for b in obj["blocks"]]
    else:
        blocks = [matrix_from_json(obj)]
    return PositiveFunctional(blocks)


def functional_to_json(phi):
    return {"blocks": [matrix_to_json(b) for b in phi.blocks]}


def channel_from_json(obj):
    try:
        dim, kraus = int(obj["dim"]), obj["kraus"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"channel needs dim and kraus: {exc}") from exc
    ops = [matrix_from_json(k) for k in kraus]
    if any(k.shape[1] != dim for k in ops):
        raise FormatError("Kraus operators do not act on the declared dimension")
    return KrausChannel(ops)


def channel_to_json(channel):
    return {"dim": channel.dim_in, "kraus": [matrix_to_json(k) for k in channel.kraus]}


def result_to_dict(res):
    out = {"value": format_float(res.value), "status": res.status, "method": res.method,
           "epsilon_trace": [[format_float(e), format_float(v)] for e, v in res.epsilon_trace]}
    for key, val in res.extras.items():
        out[key] = _plain(val)
    return out


def _plain(val):
    if isinstance(val, (bool, np.bool_)):
        return bool(val)
    if isinstance(val, (int, np.integer)):
        return int(val)
    if isinstance(val, (float, np.floating)):
        return format_float(val)
    if isinstance(val, (list, tuple)):
        return [_plain(v) for v in val]
    if isinstance(val, dict):
        return {str(k): _plain(v) for k, v in val.items()}
    return val


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def dumps(obj):
    return json.dumps(obj, sort_keys=True)
