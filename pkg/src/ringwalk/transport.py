"""Character times, transport velocities and power-law fits."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import NoMaximumError
from .finite import (
    amplitude_offset,
    amplitude_offset_derivative,
    classical_offset,
    classical_offset_derivative,
)
from .infinite import (
    QuadratureConfig,
    infinite_classical,
    infinite_classical_derivative,
    infinite_quantum,
    infinite_quantum_derivative,
)
from .lattice import LatticeSpec, bloch_eigenvalues
from .limiting import asymmetry_delta

#: Local maxima below this value are treated as quadrature noise.
NOISE_FLOOR = 1e-8
#: Ratio between successive points of the classical coarse scan.
CLASSICAL_SCAN_RATIO = 1.02
REFINE_XTOL = 1e-9
DEFAULT_DISTANCES = tuple(range(5, 31))
DEFAULT_CLUSTER_BAND = 0.25


@dataclass(frozen=True)
class TransportSample:
    m: int
    length: int
    distance: int
    t_c: float
    kind: str
    lattice: str = "infinite"

    @property
    def velocity(self) -> float:
        return self.length / self.t_c


@dataclass(frozen=True)
class FitResult:
    model: str
    params: dict
    r_squared: float
    residual_max: float
    x: tuple = field(default=(), repr=False)
    y: tuple = field(default=(), repr=False)


def _probability_functions(kind: str, m: int, d: int, lattice: LatticeSpec | None,
                           config: QuadratureConfig | None):
    if lattice is not None and lattice.is_finite:
        if kind == "quantum":
            f = lambda t: np.abs(amplitude_offset(lattice, d, t)) ** 2  # noqa: E731
            def df(t):
                a = amplitude_offset(lattice, d, t)
                return 2.0 * np.real(np.conj(a) * amplitude_offset_derivative(lattice, d, t))
            return f, df
        return (lambda t: classical_offset(lattice, d, t),
                lambda t: classical_offset_derivative(lattice, d, t))
    if kind == "quantum":
        return (lambda t: infinite_quantum(m, d, t, config),
                lambda t: infinite_quantum_derivative(m, d, t, config))
    return (lambda t: infinite_classical(m, d, t, config),
            lambda t: infinite_classical_derivative(m, d, t, config))


def _first_peak(t: np.ndarray, v: np.ndarray, floor: float) -> int | None:
    inner = (v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:]) & (v[1:-1] > floor)
    hits = np.flatnonzero(inner)
    return int(hits[0]) + 1 if hits.size else None


def _refine(f: Callable, df: Callable, a: float, b: float, c: float) -> float:
    """Locate the maximum bracketed by ``a < b < c`` from the sign change of ``df``."""
    ga, gc = float(df(np.array([a]))[0]), float(df(np.array([c]))[0])
    if ga > 0 > gc:
        return brentq(lambda s: float(df(np.array([s]))[0]), a, c, xtol=REFINE_XTOL)
    # derivative too flat to bracket: fall back to the parabola through the three samples
    fa, fb, fc = (float(x) for x in f(np.array([a, b, c])))
    denom = (b - a) * (fb - fc) - (b - c) * (fb - fa)
    if denom == 0:
        return b
    return b - 0.5 * ((b - a) ** 2 * (fb - fc) - (b - c) ** 2 * (fb - fa)) / denom


def character_time(kind: str, m: int, d: int, *, lattice: LatticeSpec | None = None,
                   t_max: float | None = None, floor: float = NOISE_FLOOR,
                   config: QuadratureConfig | None = None) -> float:
    """Time of the first maximum of the probability to be at distance ``d``.

    Uses the infinite chain unless a finite ``lattice`` is given. Quantum walks
    are scanned on a linear grid with ``4m * dt = 0.1``; classical walks on a
    geometric grid, since their single maximum drifts out as ``d^2``.
    """
    if kind not in ("classical", "quantum"):
        raise ValueError(f"unknown walk kind {kind!r}")
    d = abs(int(d))
    if d == 0:
        return 0.0
    f, df = _probability_functions(kind, m, d, lattice, config)

    if kind == "quantum":
        t_max = 4.0 * d + 20.0 if t_max is None else t_max
        dt = 0.1 / (4.0 * m)
        span = 256 * dt
        start = 0.0
        seen_t, seen_v = [], []
        while start < t_max:
            ts = np.arange(start, min(start + span, t_max) + dt / 2, dt)
            if seen_t:
                ts = np.concatenate([seen_t[-1][-2:], ts[1:]])
            vs = f(ts)
            seen_t.append(ts)
            seen_v.append(vs)
            i = _first_peak(ts, vs, floor)
            if i is not None:
                return _refine(f, df, ts[i - 1], ts[i], ts[i + 1])
            start = ts[-1]
        trace = (np.concatenate(seen_t), np.concatenate(seen_v))
        raise NoMaximumError(f"no quantum maximum for m={m}, d={d} in [0, {t_max}]", trace)

    t_max = 2.0 * d * d + 100.0 if t_max is None else t_max
    count = int(math.ceil(math.log(t_max / 1e-2) / math.log(CLASSICAL_SCAN_RATIO))) + 1
    ts = 1e-2 * CLASSICAL_SCAN_RATIO ** np.arange(count)
    vs = f(ts)
    i = _first_peak(ts, vs, floor)
    if i is None:
        raise NoMaximumError(f"no classical maximum for m={m}, d={d} in [0, {t_max}]", (ts, vs))
    if np.any(np.diff(vs[i:]) > 0):
        raise NoMaximumError(f"classical probability for m={m}, d={d} rises again after its maximum",
                             (ts, vs))
    return _refine(f, df, ts[i - 1], ts[i], ts[i + 1])


def equipartition_time(lattice: LatticeSpec, j: int = 0, k: int | None = None,
                       rel_tol: float = 0.01, t_max: float | None = None) -> float:
    """Earliest ``t`` with ``|p_{k,j}(t) - 1/N| <= rel_tol / N`` for the classical walk."""
    n = lattice.size
    k = j if k is None else k
    d = (k - j) % n
    target, band = 1.0 / n, rel_tol / n
    if t_max is None:
        gap = float(np.min(bloch_eigenvalues(lattice).eigenvalues[1:]))
        t_max = 50.0 / gap
    g = lambda t: np.abs(classical_offset(lattice, d, t) - target) - band  # noqa: E731
    ts = np.concatenate([[0.0], np.geomspace(1e-3, t_max, 4000)])
    vs = g(ts)
    hits = np.flatnonzero(vs <= 0)
    if hits.size == 0:
        raise NoMaximumError(f"no equipartition within t <= {t_max:g}", (ts, vs))
    i = int(hits[0])
    if i == 0:
        return 0.0
    return brentq(lambda s: float(g(np.array([s]))[0]), ts[i - 1], ts[i], xtol=REFINE_XTOL)


def transport_samples(kind: str, m: int, lengths: Sequence[int] = DEFAULT_DISTANCES,
                      config: QuadratureConfig | None = None) -> list[TransportSample]:
    """Character times on the infinite chain for target nodes ``m * L`` sites away."""
    out = []
    for length in lengths:
        d = m * int(length)
        out.append(TransportSample(m, int(length), d, character_time(kind, m, d, config=config), kind))
    return out


def _xy(samples) -> tuple[np.ndarray, np.ndarray]:
    if samples and isinstance(samples[0], TransportSample):
        x = np.array([s.length for s in samples], dtype=float)
        y = np.array([s.t_c for s in samples], dtype=float)
    else:
        arr = np.asarray(samples, dtype=float).reshape(-1, 2)
        x, y = arr[:, 0], arr[:, 1]
    if x.size < 3 or np.unique(x).size < x.size:
        raise ValueError("need at least 3 samples with distinct L")
    return x, y


def _r_squared(y: np.ndarray, fitted: np.ndarray) -> float:
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        return 1.0 if ss_res == 0 else 0.0
    return min(1.0, max(0.0, 1.0 - ss_res / ss_tot))


def fit_quadratic(samples) -> FitResult:
    """Least-squares ``beta`` for ``t_c = beta * L^2``."""
    x, y = _xy(samples)
    beta = float(np.sum(x**2 * y) / np.sum(x**4))
    fitted = beta * x**2
    return FitResult("quadratic", {"beta": beta}, _r_squared(y, fitted),
                     float(np.max(np.abs(y - fitted))), tuple(x), tuple(y))


def fit_linear_velocity(samples) -> FitResult:
    """Least-squares straight line ``t_c = t_0 + L / v``; reports ``v`` and ``t_0``."""
    x, y = _xy(samples)
    slope, intercept = np.polyfit(x, y, 1)
    if slope <= 0:
        raise ValueError("character times do not grow with L")
    fitted = intercept + slope * x
    return FitResult("linear", {"v": float(1.0 / slope), "intercept": float(intercept)},
                     _r_squared(y, fitted), float(np.max(np.abs(y - fitted))), tuple(x), tuple(y))


def _power_fit(x: np.ndarray, y: np.ndarray) -> FitResult:
    if np.any(y <= 0) or np.any(x <= 0):
        raise ValueError("power-law fit needs strictly positive values")
    if x.size < 2:
        raise ValueError("power-law fit needs at least two points")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    fitted = intercept + slope * lx
    return FitResult("power", {"exponent": float(slope), "prefactor": float(np.exp(intercept))},
                     _r_squared(ly, fitted), float(np.max(np.abs(ly - fitted))), tuple(x), tuple(y))


def envelope(t: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Local maxima of a sampled series, each refined by a three-point parabola."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    idx = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])) + 1
    a, b, c = v[idx - 1], v[idx], v[idx + 1]
    denom = a - 2 * b + c
    shift = np.where(denom != 0, 0.5 * (a - c) / np.where(denom != 0, denom, 1.0), 0.0)
    h = np.diff(t)[idx - 1]
    peak_t = t[idx] + shift * h
    peak_v = b - 0.25 * (a - c) * shift
    return peak_t, peak_v


def scaling_exponent(t, values, window: tuple[float, float] | None = None,
                     use_envelope: bool = False) -> FitResult:
    """Log-log slope of ``values`` against ``t`` inside ``window``."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if use_envelope:
        t, v = envelope(t, v)
    if window is not None:
        keep = (t >= window[0]) & (t <= window[1])
        t, v = t[keep], v[keep]
    if np.any(v <= 0):
        raise ValueError("non-positive values inside the fit window")
    return _power_fit(t, v)


def cluster_points(sizes: np.ndarray, deltas: np.ndarray, band: float = DEFAULT_CLUSTER_BAND,
                   trial_exponent: float = -1.0) -> list[np.ndarray]:
    """Split ``(N, Delta)`` points by sign and by their log-residual from ``N**trial_exponent``.

    Returns index arrays, largest cluster first.
    """
    clusters = []
    for sign in (1.0, -1.0):
        idx = np.flatnonzero(np.sign(deltas) == sign)
        if idx.size == 0:
            continue
        resid = np.log(np.abs(deltas[idx])) - trial_exponent * np.log(sizes[idx])
        order = np.argsort(resid, kind="stable")
        cuts = np.flatnonzero(np.diff(resid[order]) > band) + 1
        clusters.extend(np.sort(idx[g]) for g in np.split(order, cuts))
    clusters.sort(key=lambda c: (-c.size, sizes[c[0]]))
    return clusters


def delta_scaling(m: int, sizes: Sequence[int], band: float = DEFAULT_CLUSTER_BAND,
                  deltas: Sequence[float] | None = None) -> FitResult:
    """Power-law exponent of the mirror asymmetry against N within the largest cluster.

    ``deltas`` may be supplied (one per size) to fit precomputed values instead.
    """
    if deltas is None:
        n_arr = np.array([int(n) for n in sizes if 2 * m + 1 <= n], dtype=float)
        deltas = np.array([asymmetry_delta(int(n), m) for n in n_arr])
    else:
        n_arr = np.asarray(sizes, dtype=float)
        deltas = np.asarray(deltas, dtype=float)
        if deltas.shape != n_arr.shape:
            raise ValueError("sizes and deltas differ in length")
    nz = deltas != 0
    if np.count_nonzero(nz) < 3:
        raise ValueError(f"m={m}: fewer than 3 sizes with nonzero asymmetry")
    n_arr, deltas = n_arr[nz], deltas[nz]
    best = cluster_points(n_arr, deltas, band)[0]
    fit = _power_fit(n_arr[best], np.abs(deltas[best]))
    fit.params.update({"cluster_size": int(best.size), "sign": int(np.sign(deltas[best[0]])),
                       "clusters": len(cluster_points(n_arr, deltas, band))})
    return fit
