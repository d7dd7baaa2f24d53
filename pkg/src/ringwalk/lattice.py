"""Ring lattices with 2m-nearest-neighbour coupling and their Bloch spectra.

Nodes are labelled ``0 .. N-1``. A ring with ``N = 2m + 1`` is the complete
graph on ``N`` nodes.
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import LatticeError

INFINITE = "inf"

#: Eigenvalues closer than this (times ``max(1, 2m)``) share a class.
DEGENERACY_RTOL = 1e-9


class NearDegeneracyWarning(UserWarning):
    """Two distinct eigenvalue classes sit within 10x the degeneracy tolerance."""


@dataclass(frozen=True)
class LatticeSpec:
    """A ring of ``size`` nodes, each linked to ``connectivity`` neighbours per side.

    ``size`` is either a positive integer or :data:`INFINITE`.
    """

    size: int | str
    connectivity: int
    hopping_rate: float = field(default=1.0, init=False)

    def __post_init__(self):
        m = self.connectivity
        if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
            raise LatticeError(f"connectivity m must be a positive integer, got {m!r}")
        object.__setattr__(self, "connectivity", int(m))
        if self.size == INFINITE:
            return
        n = self.size
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise LatticeError(f"size N must be an integer or {INFINITE!r}, got {n!r}")
        n = int(n)
        object.__setattr__(self, "size", n)
        if n < 3:
            raise LatticeError(f"size N must satisfy N >= 3, got N={n}")
        if m > (n - 1) // 2:
            raise LatticeError(
                f"connectivity must satisfy m <= floor((N-1)/2) = {(n - 1) // 2}, got m={m}"
            )

    @property
    def is_finite(self) -> bool:
        return self.size != INFINITE

    @property
    def n(self) -> int:
        if not self.is_finite:
            raise LatticeError("infinite lattice has no node count")
        return self.size

    @property
    def m(self) -> int:
        return self.connectivity

    def is_complete(self) -> bool:
        return self.is_finite and self.size == 2 * self.connectivity + 1

    def ring_distance(self, i: int, j: int) -> int:
        if not self.is_finite:
            return abs(i - j)
        d = (i - j) % self.size
        return min(d, self.size - d)

    def shortest_path_length(self, i: int, j: int) -> int:
        """Hop count between two nodes; one hop spans up to ``m`` sites."""
        return math.ceil(self.ring_distance(i, j) / self.connectivity)

    def check_node(self, k: int) -> int:
        if not self.is_finite:
            return int(k)
        if not 0 <= k < self.size:
            raise LatticeError(f"node {k} out of range [0, {self.size})")
        return int(k)


def _require_finite(lattice: LatticeSpec) -> None:
    if not lattice.is_finite:
        raise LatticeError("operation needs a finite lattice")


def build_laplacian(lattice: LatticeSpec) -> np.ndarray:
    """Integer Laplacian: ``2m`` on the diagonal, ``-1`` for ring distance 1..m."""
    _require_finite(lattice)
    n, m = lattice.size, lattice.connectivity
    idx = np.arange(n)
    sep = (idx[:, None] - idx[None, :]) % n
    dist = np.minimum(sep, n - sep)
    a = np.where((dist >= 1) & (dist <= m), -1, 0).astype(np.int64)
    np.fill_diagonal(a, 2 * m)
    return a


@dataclass(frozen=True)
class Spectrum:
    lattice: LatticeSpec
    eigenvalues: np.ndarray
    phases: np.ndarray

    def __len__(self):
        return len(self.eigenvalues)


@functools.lru_cache(maxsize=256)
def bloch_eigenvalues(lattice: LatticeSpec) -> Spectrum:
    """Eigenvalues ``E_n = 2m - 2 sum_j cos(j theta_n)`` with ``theta_n = 2 pi n / N``.

    Only ``n <= N/2`` is evaluated; the upper half is mirrored so that
    ``E_n == E_{N-n}`` holds bit for bit.
    """
    _require_finite(lattice)
    n, m = lattice.size, lattice.connectivity
    phases = 2.0 * np.pi * np.arange(n) / n
    half = np.arange(n // 2 + 1)
    theta = 2.0 * np.pi * half / n
    cos_sum = np.zeros_like(theta)
    for j in range(1, m + 1):
        cos_sum += np.cos(j * theta)
    e_half = 2.0 * m - 2.0 * cos_sum
    e_half[0] = 0.0
    e = np.empty(n)
    e[: len(half)] = e_half
    upper = np.arange(len(half), n)
    e[upper] = e_half[n - upper]
    e.flags.writeable = False
    phases.flags.writeable = False
    return Spectrum(lattice, e, phases)


@dataclass(frozen=True)
class DegeneracyPartition:
    """Eigenvalue indices grouped into classes of (numerically) equal energy.

    Classes are ordered by ascending eigenvalue, so class 0 always holds ``n = 0``.
    """

    classes: tuple[tuple[int, ...], ...]
    class_value: tuple[float, ...]
    tolerance: float

    @property
    def signature(self) -> tuple[int, ...]:
        return tuple(sorted(len(c) for c in self.classes))

    def class_ids(self) -> np.ndarray:
        n = sum(len(c) for c in self.classes)
        ids = np.empty(n, dtype=np.int64)
        for cid, members in enumerate(self.classes):
            ids[list(members)] = cid
        return ids

    def as_set_partition(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(c) for c in self.classes)


def degeneracy_tolerance(m: int) -> float:
    return DEGENERACY_RTOL * max(1.0, 2.0 * m)


def degeneracy_partition(spectrum: Spectrum) -> DegeneracyPartition:
    """Group eigenvalues whose separation is within the degeneracy tolerance.

    Mirror pairs ``(n, N-n)`` are joined before any comparison is made. A
    :class:`NearDegeneracyWarning` is issued when two neighbouring classes are
    separated by less than ten tolerances.
    """
    e = spectrum.eigenvalues
    n = len(e)
    tol = degeneracy_tolerance(spectrum.lattice.connectivity)

    # one representative per mirror pair
    reps = np.arange(n // 2 + 1)
    order = reps[np.argsort(e[reps], kind="stable")]

    groups: list[list[int]] = [[int(order[0])]]
    near: list[tuple[float, float]] = []
    for prev, cur in zip(order[:-1], order[1:]):
        gap = e[cur] - e[prev]
        lo = e[groups[-1][0]]
        if gap <= tol and e[cur] - lo <= tol:
            groups[-1].append(int(cur))
        else:
            if gap <= 10 * tol:
                near.append((float(e[prev]), float(e[cur])))
            groups.append([int(cur)])

    classes = []
    values = []
    for g in groups:
        members = set(g)
        members.update((n - r) % n for r in g)
        classes.append(tuple(sorted(members)))
        values.append(float(e[g[0]]))

    if near:
        pairs = ", ".join(f"({a:.17g}, {b:.17g})" for a, b in near)
        warnings.warn(
            f"N={n}, m={spectrum.lattice.connectivity}: eigenvalue classes within "
            f"10x tolerance {tol:.3g}: {pairs}",
            NearDegeneracyWarning,
            stacklevel=2,
        )
    return DegeneracyPartition(tuple(classes), tuple(values), tol)


def partition_for(n: int, m: int) -> DegeneracyPartition:
    return degeneracy_partition(bloch_eigenvalues(LatticeSpec(n, m)))


def pattern_equivalent(n: int, m1: int, m2: int) -> bool:
    """True when (n, m1) and (n, m2) split ``{0..n-1}`` into identical classes."""
    return partition_for(n, m1).as_set_partition() == partition_for(n, m2).as_set_partition()
