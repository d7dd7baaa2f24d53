"""Long-time averages of the quantum walk and mirror-node asymmetry.

The time average only keeps interference between equal eigenvalues, so it is
evaluated class by class from the degeneracy partition::

    chi(d) = (1/N^2) * sum_C |sum_{n in C} exp(-i d theta_n)|^2
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import LatticeError
from .lattice import (
    DegeneracyPartition,
    LatticeSpec,
    bloch_eigenvalues,
    degeneracy_partition,
)

#: |Delta| at or below this counts as symmetric.
DELTA_THRESHOLD = 1e-12


@dataclass(frozen=True)
class LimitingDistribution:
    lattice: LatticeSpec
    source: int
    values: np.ndarray
    partition: DegeneracyPartition | None = None
    exact: tuple[Fraction, ...] | None = None

    def __getitem__(self, k):
        return self.values[k]


def _chi_by_offset(lattice: LatticeSpec, partition: DegeneracyPartition) -> np.ndarray:
    n = lattice.size
    ids = partition.class_ids()
    # phase[d, n] = exp(-2 pi i d n / N); summing columns per class gives the inner sums
    dn = np.outer(np.arange(n), np.arange(n)) % n
    phase = np.exp(-2j * np.pi * dn / n)
    class_sums = np.zeros((n, len(partition.classes)), dtype=complex)
    np.add.at(class_sums.T, ids, phase.T)
    chi = np.sum(class_sums.real**2 + class_sums.imag**2, axis=1) / n**2
    return chi


def limiting_distribution(lattice: LatticeSpec, j: int = 0) -> LimitingDistribution:
    """Long-time averaged quantum probabilities ``chi_{k,j}`` for every node ``k``."""
    if not lattice.is_finite:
        raise LatticeError("the infinite chain has no limiting distribution")
    lattice.check_node(j)
    partition = degeneracy_partition(bloch_eigenvalues(lattice))
    by_offset = _chi_by_offset(lattice, partition)
    n = lattice.size
    values = by_offset[(np.arange(n) - j) % n]
    values.flags.writeable = False
    return LimitingDistribution(lattice, j, values, partition)


def _from_fractions(lattice: LatticeSpec, j: int, fracs: list[Fraction]) -> LimitingDistribution:
    n = lattice.size
    by_node = [fracs[(k - j) % n] for k in range(n)]
    values = np.array([float(f) for f in by_node])
    values.flags.writeable = False
    return LimitingDistribution(lattice, j, values, exact=tuple(by_node))


def closed_form_cycle(n: int, j: int = 0) -> LimitingDistribution:
    """Exact limiting distribution of the nearest-neighbour ring (m = 1)."""
    lattice = LatticeSpec(n, 1)
    lattice.check_node(j)
    nn = n * n
    if n % 2 == 0:
        fracs = [Fraction(n - 2, nn)] * n
        fracs[0] = fracs[n // 2] = Fraction(2 * (n - 1), nn)
    else:
        fracs = [Fraction(n - 1, nn)] * n
        fracs[0] = Fraction(2 * n - 1, nn)
    return _from_fractions(lattice, j, fracs)


def complete_graph_limit(n: int, j: int = 0) -> LimitingDistribution:
    """Exact limiting distribution of the complete graph ``K_N`` (``N = 2m + 1``)."""
    if n % 2 == 0:
        raise LatticeError(f"N={n} is even; a complete ring lattice needs N = 2m + 1")
    lattice = LatticeSpec(n, (n - 1) // 2)
    lattice.check_node(j)
    nn = n * n
    fracs = [Fraction(2, nn)] * n
    fracs[0] = Fraction(nn - 2 * n + 2, nn)
    return _from_fractions(lattice, j, fracs)


def _ratio(a: float, b: float) -> float:
    delta = (a - b) / (a + b)
    return 0.0 if abs(delta) <= DELTA_THRESHOLD else float(delta)


def _require_even(n: int) -> None:
    if n % 2:
        raise LatticeError(f"mirror node undefined for odd N={n}")


def asymmetry_delta(n: int, m: int, j: int = 0) -> float:
    """Normalised difference between chi at node ``j`` and at its opposite node.

    Values within :data:`DELTA_THRESHOLD` of zero are returned as exactly 0.
    """
    _require_even(n)
    chi = limiting_distribution(LatticeSpec(n, m), j).values
    return _ratio(chi[j], chi[(j + n // 2) % n])


def general_mirror_asymmetry(n: int, m: int, j: int = 0, offset: int = 0) -> float:
    """Asymmetry between nodes ``j + offset`` and ``j + N/2 + offset``; ``offset`` must be even."""
    _require_even(n)
    if offset % 2:
        raise ValueError(f"offset must be even, got {offset}")
    chi = limiting_distribution(LatticeSpec(n, m), j).values
    a = (j + offset) % n
    return _ratio(chi[a], chi[(a + n // 2) % n])


@dataclass(frozen=True)
class AsymmetryScan:
    n: int
    m_values: tuple[int, ...]
    deltas: tuple[float, ...]
    threshold: float = DELTA_THRESHOLD

    @property
    def nonzero(self) -> tuple[int, ...]:
        return tuple(m for m, dl in zip(self.m_values, self.deltas) if abs(dl) > self.threshold)


def asymmetry_scan(n: int, m_values=None, j: int = 0) -> AsymmetryScan:
    _require_even(n)
    m_max = (n - 1) // 2
    ms = tuple(range(1, m_max + 1)) if m_values is None else tuple(int(m) for m in m_values)
    for m in ms:
        if not 1 <= m <= m_max:
            raise LatticeError(f"m={m} outside [1, {m_max}] for N={n}")
    return AsymmetryScan(n, ms, tuple(asymmetry_delta(n, m, j) for m in ms))
