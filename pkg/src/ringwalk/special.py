"""Integer-order Bessel functions J_n(x) and exp(-x) I_n(x).

Power series for ``|x| <= 12``; above that, Miller's backward recurrence
normalised by the generating-function sums

    J_0 + 2 (J_2 + J_4 + ...) = 1
    I_0 + 2 (I_1 + I_2 + ...) = e^x

Kept in-house so the infinite-lattice quadrature can be checked against an
unrelated code path.
"""
from __future__ import annotations

import math

import numpy as np

SERIES_LIMIT = 12.0
_RESCALE_AT = 1e250


def _series(n: int, x: np.ndarray, sign: float) -> np.ndarray:
    half = 0.5 * x
    term = half**n / math.factorial(n)
    total = term.copy()
    q = sign * half * half
    for k in range(1, 200):
        term = term * q / (k * (k + n))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _miller_j(n: int, x: np.ndarray) -> np.ndarray:
    xmax = float(np.max(x))
    top = max(n, int(xmax)) + 30 + int(8 * xmax ** (1.0 / 3.0))
    top += top % 2
    above = np.zeros_like(x)
    cur = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    keep = np.zeros_like(x)
    for k in range(top, 0, -1):
        below = (2.0 * k / x) * cur - above
        above, cur = cur, below
        # cur now holds J_{k-1}
        if k - 1 == n:
            keep = cur.copy()
        if (k - 1) % 2 == 0:
            norm += (2.0 if k - 1 > 0 else 1.0) * cur
        big = np.abs(cur) > _RESCALE_AT
        if np.any(big):
            s = np.where(big, 1.0 / _RESCALE_AT, 1.0)
            above *= s
            cur *= s
            norm *= s
            keep *= s
    return keep / norm


def _miller_i_scaled(n: int, x: np.ndarray) -> np.ndarray:
    xmax = float(np.max(x))
    top = max(n, int(math.sqrt(90.0 * xmax))) + 40
    above = np.zeros_like(x)
    cur = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    keep = np.zeros_like(x)
    for k in range(top, 0, -1):
        below = (2.0 * k / x) * cur + above
        above, cur = cur, below
        if k - 1 == n:
            keep = cur.copy()
        norm += (2.0 if k - 1 > 0 else 1.0) * cur
        big = cur > _RESCALE_AT
        if np.any(big):
            s = np.where(big, 1.0 / _RESCALE_AT, 1.0)
            above *= s
            cur *= s
            norm *= s
            keep *= s
    return keep / norm


def bessel_j(n: int, x):
    """Bessel function of the first kind for integer order ``n``."""
    n = int(n)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    sign = 1.0
    if n < 0:
        n = -n
        sign = -1.0 if n % 2 else 1.0
    ax = np.abs(x)
    out = np.empty_like(ax)
    small = ax <= SERIES_LIMIT
    if np.any(small):
        out[small] = _series(n, ax[small], -1.0)
    if np.any(~small):
        out[~small] = _miller_j(n, ax[~small])
    if n % 2:
        out = np.where(x < 0, -out, out)
    out = sign * out
    return float(out[0]) if scalar else out


def bessel_i_scaled(n: int, x):
    """``exp(-|x|) * I_n(x)`` for integer order ``n``."""
    n = abs(int(n))
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    ax = np.abs(x)
    out = np.empty_like(ax)
    small = ax <= SERIES_LIMIT
    if np.any(small):
        out[small] = _series(n, ax[small], 1.0) * np.exp(-ax[small])
    if np.any(~small):
        out[~small] = _miller_i_scaled(n, ax[~small])
    if n % 2:
        out = np.where(x < 0, -out, out)
    return float(out[0]) if scalar else out
