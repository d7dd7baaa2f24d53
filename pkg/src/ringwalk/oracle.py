"""Brute-force reference paths for small rings.

Nothing here touches the Bloch formulas. The Laplacian is assembled from
shifted identity matrices, then either diagonalised densely or integrated in
time with the classical fourth-order Runge-Kutta scheme.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import LatticeError, NumericalError
from .finite import ProbabilitySeries, as_grid
from .lattice import LatticeSpec

DENSE_LIMIT = 512
ODE_LIMIT = 256
#: Upper bound on ``h * 4m``.
STEP_BOUND = 0.05
#: Global error budget for the RK4 propagator, relative to a unit state.
ODE_TOLERANCE = 1e-11


def explicit_laplacian(lattice: LatticeSpec) -> np.ndarray:
    n, m = lattice.n, lattice.m
    eye = np.eye(n)
    adj = np.zeros((n, n))
    for z in range(1, m + 1):
        adj += np.roll(eye, z, axis=1) + np.roll(eye, -z, axis=1)
    return np.diag(adj.sum(axis=1)) - adj


@dataclass(frozen=True)
class DenseEigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns are eigenvectors

    def reconstruction_error(self, a: np.ndarray) -> float:
        v, lam = self.eigenvectors, self.eigenvalues
        return float(np.max(np.abs(a - (v * lam) @ v.T)))

    def orthonormality_error(self) -> float:
        v = self.eigenvectors
        return float(np.max(np.abs(v.T @ v - np.eye(v.shape[1]))))


def dense_eigensystem(lattice: LatticeSpec) -> DenseEigenSystem:
    if not lattice.is_finite or lattice.n > DENSE_LIMIT:
        raise LatticeError(f"dense oracle limited to finite N <= {DENSE_LIMIT}")
    lam, vec = np.linalg.eigh(explicit_laplacian(lattice))
    return DenseEigenSystem(lam, vec)


def oracle_probabilities(lattice: LatticeSpec, j: int, kind: str, grid) -> np.ndarray:
    """Probabilities for all nodes from dense eigenpairs; rows are times, columns nodes."""
    g = as_grid(grid)
    lattice.check_node(j)
    sys = dense_eigensystem(lattice)
    v = sys.eigenvectors
    overlap = v * v[j][None, :]  # <k|q_n><q_n|j>
    t = g.points
    if kind == "classical":
        return np.exp(-np.outer(t, sys.eigenvalues)) @ overlap.T
    if kind == "quantum":
        amp = np.exp(-1j * np.outer(t, sys.eigenvalues)) @ overlap.T
        return amp.real**2 + amp.imag**2
    raise ValueError(f"unknown walk kind {kind!r}")


def oracle_series(lattice: LatticeSpec, j: int, k: int, kind: str, grid) -> ProbabilitySeries:
    g = as_grid(grid)
    lattice.check_node(k)
    return ProbabilitySeries(lattice, kind, j, k, g, oracle_probabilities(lattice, j, kind, g)[:, k])


def _rk4_step_matrix(gen: np.ndarray, h: float) -> np.ndarray:
    """One RK4 step for ``y' = gen @ y`` written as a matrix acting on ``y``."""
    n = gen.shape[0]
    eye = np.eye(n, dtype=gen.dtype)
    hg = h * gen
    k1 = hg
    k2 = hg @ (eye + 0.5 * k1)
    k3 = hg @ (eye + 0.5 * k2)
    k4 = hg @ (eye + k3)
    return eye + (k1 + 2 * k2 + 2 * k3 + k4) / 6.0


def _propagator(gen: np.ndarray, interval: float, h_max: float) -> tuple[np.ndarray, float]:
    """Compose ``2**p`` RK4 steps covering ``interval`` by repeated squaring."""
    if interval == 0:
        return np.eye(gen.shape[0], dtype=gen.dtype), 0.0
    p = max(0, math.ceil(math.log2(interval / h_max)))
    h = interval / 2**p
    prop = _rk4_step_matrix(gen, h)
    for _ in range(p):
        prop = prop @ prop
    return prop, h


def ode_step_size(lattice: LatticeSpec, horizon: float) -> float:
    """Largest RK4 step meeting both the stability bound and the error budget over ``horizon``."""
    rho = 4.0 * lattice.m
    h = STEP_BOUND / rho
    span = rho * max(horizon, 1.0)
    # global RK4 phase error is about span * (h rho)^4 / 120
    h_acc = (120.0 * ODE_TOLERANCE / span) ** 0.25 / rho
    return min(h, h_acc)


def oracle_ode(lattice: LatticeSpec, j: int, kind: str, grid, step: float | None = None,
               return_norm: bool = False):
    """Integrate the master / Schrodinger equation with RK4 from ``|j>``.

    Returns a (time x node) probability matrix; with ``return_norm`` the
    quantum norm at each grid point is returned too.
    """
    g = as_grid(grid)
    if not lattice.is_finite or lattice.n > ODE_LIMIT:
        raise LatticeError(f"ODE oracle limited to finite N <= {ODE_LIMIT}")
    lattice.check_node(j)
    if kind not in ("classical", "quantum"):
        raise ValueError(f"unknown walk kind {kind!r}")
    bound = STEP_BOUND / (4.0 * lattice.m)
    if step is None:
        step = ode_step_size(lattice, float(g.points[-1]))
    elif step > bound:
        raise NumericalError(f"step {step:g} exceeds the stability bound {bound:g}")

    a = explicit_laplacian(lattice)
    gen = -1j * a.astype(complex) if kind == "quantum" else -a
    state = np.zeros(lattice.n, dtype=gen.dtype)
    state[j] = 1.0

    rows = np.empty((len(g), lattice.n))
    norms = np.empty(len(g))
    cache: dict[float, np.ndarray] = {}
    t_prev = 0.0
    for i, t in enumerate(g.points):
        dt = float(t - t_prev)
        key = round(dt, 12)
        if key not in cache:
            cache[key], _ = _propagator(gen, dt, step)
        state = cache[key] @ state
        t_prev = float(t)
        if kind == "quantum":
            prob = state.real**2 + state.imag**2
        else:
            prob = state.real.copy()
        rows[i] = prob
        norms[i] = prob.sum()
    return (rows, norms) if return_norm else rows


@dataclass(frozen=True)
class AgreementReport:
    n: int
    m: int
    kind: str
    bloch_vs_dense: float
    bloch_vs_ode: float
    dense_vs_ode: float

    @property
    def worst(self) -> float:
        return max(self.bloch_vs_dense, self.bloch_vs_ode, self.dense_vs_ode)


def three_way_agreement(lattice: LatticeSpec, kind: str, grid, j: int = 0) -> AgreementReport:
    from .finite import distribution_snapshot

    g = as_grid(grid)
    bloch = distribution_snapshot(lattice, j, kind, g)
    dense = oracle_probabilities(lattice, j, kind, g)
    ode = oracle_ode(lattice, j, kind, g)
    return AgreementReport(
        lattice.n, lattice.m, kind,
        float(np.max(np.abs(bloch - dense))),
        float(np.max(np.abs(bloch - ode))),
        float(np.max(np.abs(dense - ode))),
    )
