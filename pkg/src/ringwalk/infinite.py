"""Transition probabilities on the infinite chain.

The Bloch sums turn into integrals over the quasi-momentum ``theta``. The
integrands are even in ``theta``, so only ``[0, pi]`` is integrated, with
composite Gauss-Legendre panels that are doubled until two successive
estimates agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError
from .finite import amplitude_offset, classical_offset
from .lattice import LatticeSpec
from .special import bessel_i_scaled, bessel_j

GL_ORDER = 8
_CHUNK_ELEMENTS = 1 << 22
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)


@dataclass(frozen=True)
class QuadratureConfig:
    target_error: float = 1e-10
    max_subdivisions: int = 2**20

    def __post_init__(self):
        if not self.target_error > 0:
            raise ValueError("target_error must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


DEFAULT_QUADRATURE = QuadratureConfig()


def dispersion(m: int, theta: np.ndarray) -> np.ndarray:
    """``E(theta) = 2m - 2 sum_j cos(j theta)``, written as ``4 sum_j sin^2(j theta / 2)``."""
    s = np.zeros_like(theta)
    for j in range(1, m + 1):
        s += np.sin(0.5 * j * theta) ** 2
    return 4.0 * s


def _panel_rule(panels: int) -> tuple[np.ndarray, np.ndarray]:
    width = math.pi / panels
    left = np.arange(panels) * width
    nodes = (left[:, None] + 0.5 * width * (_GL_NODES[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * width * _GL_WEIGHTS, panels)
    return nodes, weights


def _estimate(m: int, d: int, t: np.ndarray, panels: int, quantum: bool, order: int) -> np.ndarray:
    theta, w = _panel_rule(panels)
    energy = dispersion(m, theta)
    weights = w * np.cos(d * theta) / math.pi
    if order == 1:
        weights = weights * (-1j * energy if quantum else -energy)
    factor = -1j if quantum else -1.0
    out = np.empty(t.size, dtype=complex if quantum else float)
    step = max(1, _CHUNK_ELEMENTS // theta.size)
    for lo in range(0, t.size, step):
        block = t[lo : lo + step]
        vals = np.exp(factor * np.outer(block, energy)) @ weights
        out[lo : lo + step] = vals if quantum else np.real(vals)
    return out


def initial_panels(m: int, d: int, t_max: float, quantum: bool) -> int:
    if quantum:
        return max(64, 8 * math.ceil(m * (m + 1) * t_max + abs(d)))
    return max(64, 8 * math.ceil(abs(d)))


def _integrate(m, d, t, quantum, config, order=0):
    if m < 1:
        raise ValueError("m must be a positive integer")
    d = abs(int(d))
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if np.any(t < 0):
        raise ValueError("time must be non-negative")
    config = config or DEFAULT_QUADRATURE
    panels = initial_panels(m, d, float(t.max()) if t.size else 0.0, quantum)
    coarse = _estimate(m, d, t, panels, quantum, order)
    diff = math.inf
    while True:
        if 2 * panels > config.max_subdivisions:
            raise QuadratureError(
                f"quadrature for m={m}, d={d} did not reach {config.target_error:g} "
                f"within {config.max_subdivisions} panels",
                diff,
            )
        fine = _estimate(m, d, t, 2 * panels, quantum, order)
        diff = float(np.max(np.abs(fine - coarse)))
        if diff <= config.target_error:
            break
        panels *= 2
        coarse = fine
    return fine[0] if scalar else fine


def infinite_amplitude(m: int, d: int, t, config: QuadratureConfig | None = None):
    """Quantum amplitude ``(1/2pi) int exp(-i t E(theta)) exp(-i d theta) dtheta``."""
    return _integrate(m, d, t, True, config)


def infinite_quantum(m: int, d: int, t, config: QuadratureConfig | None = None):
    """Quantum transition probability at distance ``d`` on the infinite chain."""
    return np.abs(infinite_amplitude(m, d, t, config)) ** 2


def infinite_classical(m: int, d: int, t, config: QuadratureConfig | None = None):
    """Classical transition probability at distance ``d`` on the infinite chain."""
    return _integrate(m, d, t, False, config)


def infinite_quantum_derivative(m: int, d: int, t, config: QuadratureConfig | None = None):
    amp = _integrate(m, d, t, True, config)
    damp = _integrate(m, d, t, True, config, order=1)
    return 2.0 * np.real(np.conj(amp) * damp)


def infinite_classical_derivative(m: int, d: int, t, config: QuadratureConfig | None = None):
    return _integrate(m, d, t, False, config, order=1)


def bessel_m1(kind: str, d: int, t):
    """Closed forms for the nearest-neighbour chain (m = 1).

    Classical: ``exp(-2t) I_d(2t)``. Quantum: ``J_d(2t)^2``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be non-negative")
    if kind == "classical":
        out = bessel_i_scaled(d, 2.0 * t)
    elif kind == "quantum":
        out = bessel_j(d, 2.0 * t) ** 2
    else:
        raise ValueError(f"unknown walk kind {kind!r}")
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class NoWrapReport:
    m: int
    distance: int
    t: float
    kind: str
    infinite_value: float
    finite_value: float
    n_used: int

    @property
    def discrepancy(self) -> float:
        return abs(self.infinite_value - self.finite_value)


def no_wrap_size(m: int, d: int, t: float) -> int:
    """Ring size large enough that the front cannot wrap around by time ``t``."""
    return 2 * math.ceil(m * (m + 1) * t + abs(d)) + 16


def no_wrap_check(m: int, d: int, t: float, kind: str = "quantum",
                  config: QuadratureConfig | None = None) -> NoWrapReport:
    n = no_wrap_size(m, d, t)
    lattice = LatticeSpec(n, m)
    dd = abs(int(d))
    if kind == "quantum":
        inf_val = float(infinite_quantum(m, dd, t, config))
        fin_val = float(np.abs(amplitude_offset(lattice, dd, np.array([t]))[0]) ** 2)
    elif kind == "classical":
        inf_val = float(infinite_classical(m, dd, t, config))
        fin_val = float(classical_offset(lattice, dd, np.array([t]))[0])
    else:
        raise ValueError(f"unknown walk kind {kind!r}")
    return NoWrapReport(m, dd, float(t), kind, inf_val, fin_val, n)
