"""Classical and quantum transition probabilities on finite rings.

Both walks are evaluated from the Bloch spectrum. The quantum probability is
always the squared modulus of a single Bloch sum for the amplitude.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from .errors import LatticeError, NumericalError
from .lattice import LatticeSpec, bloch_eigenvalues

Kind = Literal["classical", "quantum"]
KINDS = ("classical", "quantum")

#: Largest tolerated imaginary part of a classical Bloch sum.
IMAG_RESIDUE_TOL = 1e-12


@dataclass(frozen=True)
class TimeGrid:
    points: np.ndarray
    spacing_kind: str = "linear"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1)
        if pts.size == 0:
            raise ValueError("time grid is empty")
        if pts[0] < 0:
            raise ValueError("time grid starts before t = 0")
        if pts.size > 1 and np.any(np.diff(pts) <= 0):
            raise ValueError("time grid must be strictly increasing")
        if self.spacing_kind not in ("linear", "logarithmic"):
            raise ValueError(f"unknown spacing kind {self.spacing_kind!r}")
        if self.spacing_kind == "logarithmic" and pts[0] <= 0:
            raise ValueError("logarithmic grids need a positive first point")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    @classmethod
    def linear(cls, t_min: float, t_max: float, count: int) -> "TimeGrid":
        return cls(np.linspace(t_min, t_max, count), "linear")

    @classmethod
    def logarithmic(cls, t_min: float = 0.01, t_max: float = 100.0, count: int = 400) -> "TimeGrid":
        return cls(np.geomspace(t_min, t_max, count), "logarithmic")

    @classmethod
    def resolved(cls, m: int, t_max: float, t_min: float = 0.0, phase_step: float = 0.1) -> "TimeGrid":
        """Linear grid whose step keeps ``E_max * dt <= phase_step`` with ``E_max <= 4m``."""
        dt = phase_step / (4.0 * m)
        count = int(np.ceil((t_max - t_min) / dt)) + 1
        return cls(np.linspace(t_min, t_max, count), "linear")


GridLike = Union[TimeGrid, np.ndarray, list, tuple, float]


def as_grid(grid: GridLike) -> TimeGrid:
    if isinstance(grid, TimeGrid):
        return grid
    return TimeGrid(np.atleast_1d(np.asarray(grid, dtype=float)))


@dataclass(frozen=True)
class AmplitudeSeries:
    lattice: LatticeSpec
    source: int
    target: int
    grid: TimeGrid
    values: np.ndarray


@dataclass(frozen=True)
class ProbabilitySeries:
    lattice: LatticeSpec
    kind: str
    source: int
    target: int
    grid: TimeGrid
    values: np.ndarray

    @property
    def t(self) -> np.ndarray:
        return self.grid.points


def _offset(lattice: LatticeSpec, j: int, k: int) -> int:
    if not lattice.is_finite:
        raise LatticeError("finite-lattice dynamics called with an infinite lattice")
    lattice.check_node(j)
    lattice.check_node(k)
    return (k - j) % lattice.size


def _bloch_phase(n: int, d: int) -> np.ndarray:
    # reduce d*n modulo N before scaling so large offsets keep full precision
    return np.exp(-2j * np.pi * ((d * np.arange(n)) % n) / n)


_CHUNK_ELEMENTS = 1 << 21


def _spectral_sum(t: np.ndarray, energies: np.ndarray, weights: np.ndarray, quantum: bool) -> np.ndarray:
    """``sum_n weights[n] * exp(-c t E_n)`` with ``c = i`` (quantum) or ``1``, chunked over t."""
    t = np.asarray(t, dtype=float).reshape(-1)
    out = np.empty(t.size, dtype=complex)
    step = max(1, _CHUNK_ELEMENTS // max(1, energies.size))
    factor = -1j if quantum else -1.0
    for lo in range(0, t.size, step):
        block = t[lo : lo + step]
        out[lo : lo + step] = np.exp(factor * np.outer(block, energies)) @ weights
    return out


def amplitude_offset(lattice: LatticeSpec, d: int, t: np.ndarray) -> np.ndarray:
    """Quantum amplitude at ring offset ``d`` for every time in ``t``."""
    e = bloch_eigenvalues(lattice).eigenvalues
    n = lattice.size
    return _spectral_sum(t, e, _bloch_phase(n, d % n), quantum=True) / n


def amplitude_offset_derivative(lattice: LatticeSpec, d: int, t: np.ndarray) -> np.ndarray:
    e = bloch_eigenvalues(lattice).eigenvalues
    n = lattice.size
    return _spectral_sum(t, e, -1j * e * _bloch_phase(n, d % n), quantum=True) / n


def _real_part_checked(z: np.ndarray) -> np.ndarray:
    residue = np.max(np.abs(z.imag)) if z.size else 0.0
    if residue > IMAG_RESIDUE_TOL:
        raise NumericalError(f"classical Bloch sum has imaginary residue {residue:.3g}")
    return z.real.copy()


def classical_offset(lattice: LatticeSpec, d: int, t: np.ndarray) -> np.ndarray:
    e = bloch_eigenvalues(lattice).eigenvalues
    n = lattice.size
    return _real_part_checked(_spectral_sum(t, e, _bloch_phase(n, d % n), quantum=False) / n)


def classical_offset_derivative(lattice: LatticeSpec, d: int, t: np.ndarray) -> np.ndarray:
    e = bloch_eigenvalues(lattice).eigenvalues
    n = lattice.size
    return _real_part_checked(_spectral_sum(t, e, -e * _bloch_phase(n, d % n), quantum=False) / n)


def quantum_amplitude(lattice: LatticeSpec, j: int, k: int, grid: GridLike) -> AmplitudeSeries:
    g = as_grid(grid)
    d = _offset(lattice, j, k)
    return AmplitudeSeries(lattice, j, k, g, amplitude_offset(lattice, d, g.points))


def quantum_probability(lattice: LatticeSpec, j: int, k: int, grid: GridLike) -> ProbabilitySeries:
    amp = quantum_amplitude(lattice, j, k, grid)
    return ProbabilitySeries(lattice, "quantum", j, k, amp.grid, np.abs(amp.values) ** 2)


def classical_probability(lattice: LatticeSpec, j: int, k: int, grid: GridLike) -> ProbabilitySeries:
    g = as_grid(grid)
    d = _offset(lattice, j, k)
    return ProbabilitySeries(lattice, "classical", j, k, g, classical_offset(lattice, d, g.points))


def transition_probability(lattice: LatticeSpec, j: int, k: int, kind: Kind, grid: GridLike) -> ProbabilitySeries:
    if kind == "quantum":
        return quantum_probability(lattice, j, k, grid)
    if kind == "classical":
        return classical_probability(lattice, j, k, grid)
    raise ValueError(f"unknown walk kind {kind!r}")


def return_probability(lattice: LatticeSpec, kind: Kind, grid: GridLike, j: int = 0) -> ProbabilitySeries:
    return transition_probability(lattice, j, j, kind, grid)


def distribution_snapshot(lattice: LatticeSpec, j: int, kind: Kind, grid: GridLike) -> np.ndarray:
    """Probabilities for every node, one row per time point, one column per node."""
    g = as_grid(grid)
    _offset(lattice, j, j)
    if kind not in KINDS:
        raise ValueError(f"unknown walk kind {kind!r}")
    spec = bloch_eigenvalues(lattice)
    n = lattice.size
    if kind == "quantum":
        coeff = np.exp(-1j * np.outer(g.points, spec.eigenvalues))
    else:
        coeff = np.exp(-np.outer(g.points, spec.eigenvalues)).astype(complex)
    # column d of the FFT is sum_n c_n exp(-2 pi i d n / N)
    by_offset = np.fft.fft(coeff, axis=1) / n
    if kind == "quantum":
        by_offset = np.abs(by_offset) ** 2
    else:
        by_offset = _real_part_checked(by_offset)
    cols = (np.arange(n) - j) % n
    return by_offset[:, cols]
