"""Adaptive composite Gauss-Legendre quadrature for vector-valued integrands."""

from functools import lru_cache

import numpy as np

from .errors import NonConvergence


@lru_cache(maxsize=None)
def _rule(order):
    return np.polynomial.legendre.leggauss(order)


def gauss_legendre(func, lo, hi, order=20):
    """Single Gauss-Legendre panel.  ``func`` maps a 1-d array of nodes to an
    array whose leading axis runs over the nodes."""
    x, w = _rule(order)
    half = 0.5 * (hi - lo)
    nodes = lo + half * (x + 1.0)
    vals = np.asarray(func(nodes))
    return half * np.tensordot(w, vals, axes=(0, 0))


def composite_gauss_legendre(func, lo, hi, nodes=400, order=20):
    """Fixed composite rule with ``nodes`` total nodes in panels of ``order``."""
    panels = max(1, int(np.ceil(nodes / order)))
    edges = np.linspace(lo, hi, panels + 1)
    x, w = _rule(order)
    half = 0.5 * np.diff(edges)
    pts = (edges[:-1, None] + half[:, None] * (x[None, :] + 1.0)).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    vals = np.asarray(func(pts))
    return np.tensordot(wts, vals, axes=(0, 0))


def adaptive_gauss_legendre(func, lo, hi, rtol=1e-8, atol=0.0, order=16,
                            initial_panels=8, max_panels=20000):
    """Integrate ``func`` over ``[lo, hi]`` by panel halving.

    A panel is accepted once its one-panel estimate agrees with the sum of its
    two halves to within ``max(rtol * |total|, atol)`` scaled by the panel's
    share of the interval.  Returns the integral (same trailing shape as the
    values of ``func``).
    """
    if hi <= lo:
        return 0.0 * np.asarray(func(np.array([lo])))[0]
    edges = np.linspace(lo, hi, initial_panels + 1)
    stack = [(a, b, gauss_legendre(func, a, b, order)) for a, b in zip(edges[:-1], edges[1:])]
    total_guess = sum(np.linalg.norm(np.atleast_1d(s[2])) for s in stack)
    length = hi - lo
    result = 0.0
    evaluated = len(stack)
    while stack:
        a, b, whole = stack.pop()
        mid = 0.5 * (a + b)
        left = gauss_legendre(func, a, mid, order)
        right = gauss_legendre(func, mid, b, order)
        evaluated += 2
        halves = left + right
        err = np.linalg.norm(np.atleast_1d(halves - whole))
        scale = max(rtol * max(total_guess, np.linalg.norm(np.atleast_1d(halves))), atol)
        if err <= scale * max((b - a) / length, 1e-3) or b - a < 1e-12 * length:
            result = result + halves
        else:
            if evaluated > max_panels:
                raise NonConvergence(
                    f"adaptive quadrature exceeded {max_panels} panels on [{lo}, {hi}]",
                    residual=err)
            stack.append((a, mid, left))
            stack.append((mid, b, right))
    return result


def tail_limits(bound, scale, rel=1e-12, start=0.0, step=1.0, limit=1e6):
    """Find ``u_lo < start < u_hi`` where ``bound(u)`` drops below ``rel * scale``.

    ``bound`` must be a nonnegative function decaying in both directions;
    steps grow geometrically so slowly decaying bounds are still bracketed.
    """
    target = rel * scale
    lims = []
    for direction in (-1.0, 1.0):
        u, h = start, step
        while bound(u) > target:
            u += direction * h
            h *= 1.5
            if abs(u - start) > limit:
                raise NonConvergence("integrand bound does not decay")
        lims.append(u)
    return lims[0], lims[1]
