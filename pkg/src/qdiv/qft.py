"""Closed-form desk calculators for quantities that reduce to arithmetic."""

from dataclasses import dataclass
from fractions import Fraction
from math import cos, log, pi

import numpy as np

ADMISSIBLE_DISCRETE = "admissible_discrete"
ADMISSIBLE_CONTINUUM = "admissible_continuum"
NOT_ADMISSIBLE = "not_admissible"


@dataclass(frozen=True)
class LatticeSpec:
    volume: float
    delta: float
    spacetime_dim: int

    def __post_init__(self):
        if self.volume <= 0 or self.delta <= 0:
            raise ValueError("volume and delta must be positive")
        if self.spacetime_dim < 2:
            raise ValueError("spacetime dimension must be at least 2")

    @property
    def cells(self):
        return self.volume / self.delta ** (self.spacetime_dim - 1)


def lattice_measurement_complexity(spec):
    """``(vol / delta^(n-1)) log 2``: one binary measurement per lattice cell."""
    return spec.cells * log(2.0)


@dataclass(frozen=True)
class YoungDiagram:
    rows: tuple

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        if not rows or any(r <= 0 for r in rows):
            raise ValueError("rows must be positive integers")
        if any(a < b for a, b in zip(rows, rows[1:])):
            raise ValueError("rows must be nonincreasing")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def parse(cls, text):
        return cls(tuple(int(x) for x in str(text).split(",") if x.strip()))

    @property
    def boxes(self):
        return sum(self.rows)

    def columns(self):
        return [sum(1 for r in self.rows if r > j) for j in range(self.rows[0])]

    def hooks(self):
        cols = self.columns()
        return [[(r - j - 1) + (cols[j] - i - 1) + 1 for j in range(r)]
                for i, r in enumerate(self.rows)]


def hook_content_dimension(diagram, n):
    """``prod_{cells} (n + j - i) / hook(i, j)`` as an exact rational."""
    if len(diagram.rows) > n:
        raise ValueError(f"diagram has {len(diagram.rows)} rows, more than N = {n}")
    d = Fraction(1)
    for i, (row, hooks) in enumerate(zip(diagram.rows, diagram.hooks())):
        for j in range(row):
            d *= Fraction(n + j - i, hooks[j])
    return d


def weyl_ratio_dimension(diagram, n):
    """``prod_{i<j<=N} (l_i - l_j + j - i)/(j - i)`` with rows padded by zeros."""
    if len(diagram.rows) > n:
        raise ValueError(f"diagram has {len(diagram.rows)} rows, more than N = {n}")
    lam = list(diagram.rows) + [0] * (n - len(diagram.rows))
    d = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            d *= Fraction(lam[i] - lam[j] + j - i, j - i)
    return d


def statistical_dimension(diagram, n):
    """Dimension ``d`` of the GL(N) irrep of the given shape and ``log d^2``."""
    d = hook_content_dimension(diagram, n)
    if d != weyl_ratio_dimension(diagram, n) or d.denominator != 1:
        raise ArithmeticError(f"dimension formulas disagree for {diagram.rows}, N={n}")
    d = int(d)
    return d, 2.0 * log(d)


def adjoint_diagram(n):
    return YoungDiagram((2,) + (1,) * (n - 2))


def jones_points(up_to=4.0):
    """Discrete admissible index values ``4 cos^2(pi/m)``, ``m = 3, 4, ...`` below ``up_to``."""
    m, out = 3, []
    while True:
        x = 4.0 * cos(pi / m) ** 2
        if x >= up_to or m > 100000:
            return out
        out.append((m, x))
        m += 1


def jones_admissible(x, tol=1e-9):
    """Classify ``x`` against ``{4 cos^2(pi/m) : m >= 3} U [4, inf]``.

    Returns ``(label, m, nearest)`` where ``m`` and ``nearest`` identify the
    closest discrete point (``m = None`` in the continuum).
    """
    if x < 0:
        raise ValueError("index values are nonnegative")
    if x >= 4.0 - tol:
        return ADMISSIBLE_CONTINUUM, None, float(x)
    # 4 cos^2(pi/m) increases in m; invert to find the nearest candidates
    if x <= 1.0:
        m_guess = 3
    else:
        m_guess = int(np.floor(pi / np.arccos(min(np.sqrt(x) / 2.0, 1.0))))
    best = None
    for m in range(max(3, m_guess - 2), m_guess + 3):
        v = 4.0 * cos(pi / m) ** 2
        if best is None or abs(v - x) < abs(best[1] - x):
            best = (m, v)
    m, v = best
    if abs(v - x) <= tol:
        return ADMISSIBLE_DISCRETE, m, v
    return NOT_ADMISSIBLE, m, v
