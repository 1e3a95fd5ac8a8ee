"""Central finite differences with Richardson extrapolation.

All stencils are second order in the step, so one extrapolation level
removes the h^2 term, two levels the h^4 term, and so on.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import DerivativeNoise

# default steps per derivative order; larger steps for higher orders keep
# rounding noise (~ eps / h^k) below the truncation error
DEFAULT_STEPS = {1: 1e-5, 2: 1e-4, 3: 1e-3}


def _stencil(f: Callable[[float], np.ndarray], order: int, h: float) -> np.ndarray:
    if order == 1:
        return (np.asarray(f(h)) - np.asarray(f(-h))) / (2 * h)
    if order == 2:
        return (np.asarray(f(h)) - 2 * np.asarray(f(0.0)) + np.asarray(f(-h))) / h**2
    if order == 3:
        return (
            np.asarray(f(2 * h)) - 2 * np.asarray(f(h)) + 2 * np.asarray(f(-h)) - np.asarray(f(-2 * h))
        ) / (2 * h**3)
    raise ValueError(f"derivative order {order} not supported")


def line_derivative(
    f: Callable[[float], np.ndarray],
    order: int = 1,
    h: float | None = None,
    levels: int = 1,
    tol: float | None = None,
) -> np.ndarray:
    """k-th derivative at s = 0 of the curve ``s -> f(s)``.

    ``levels`` Richardson extrapolation steps are applied on top of the
    central stencil.  With ``tol`` set, the last two diagonal entries of the
    Richardson table must agree to ``tol`` (absolute, max-norm) or
    DerivativeNoise is raised.
    """
    if h is None:
        h = DEFAULT_STEPS[order]
    table = [[_stencil(f, order, h / 2**i)] for i in range(levels + 1)]
    for i in range(1, levels + 1):
        for j in range(1, i + 1):
            fac = 4.0**j
            table[i].append((fac * table[i][j - 1] - table[i - 1][j - 1]) / (fac - 1))
    best = table[levels][levels]
    if tol is not None and levels >= 1:
        spread = float(np.max(np.abs(best - table[levels][levels - 1])))
        if not np.isfinite(spread) or spread > tol:
            raise DerivativeNoise(f"Richardson estimates differ by {spread:.3g} > {tol:.3g}")
    return best


def directional(
    f: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    direction: np.ndarray,
    order: int = 1,
    h: float | None = None,
    levels: int = 1,
    tol: float | None = None,
) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    direction = np.asarray(direction, dtype=float)
    return line_derivative(lambda s: f(x + s * direction), order=order, h=h, levels=levels, tol=tol)


def partials(
    f: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    h: float | None = None,
    levels: int = 1,
    tol: float | None = None,
) -> np.ndarray:
    """Stack of first partials; the last axis indexes the differentiation variable."""
    x = np.asarray(x, dtype=float)
    cols = [directional(f, x, e, 1, h, levels, tol) for e in np.eye(x.size)]
    return np.stack(cols, axis=-1)
