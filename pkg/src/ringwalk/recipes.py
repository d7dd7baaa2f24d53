"""Canned parameter sweeps for the `figure` subcommand, one table per curve."""
from __future__ import annotations

import numpy as np

from .finite import TimeGrid, transition_probability
from .infinite import QuadratureConfig, infinite_classical, infinite_quantum
from .lattice import LatticeSpec
from .limiting import asymmetry_delta, limiting_distribution
from .transport import fit_linear_velocity, fit_quadratic, transport_samples

N_RING = 100
WALK_M = (1, 2, 3)


def _series_rows(t, values):
    return list(zip(np.asarray(t).tolist(), np.asarray(values).tolist()))


def _finite(kind, m, d, grid):
    return transition_probability(LatticeSpec(N_RING, m), 0, d % N_RING, kind, grid).values


def _infinite(kind, m, d, grid, quad):
    fn = infinite_quantum if kind == "quantum" else infinite_classical
    return np.atleast_1d(fn(m, d, grid.points, quad))


def fig1(quad):
    out = []
    slow = TimeGrid.logarithmic(0.01, 1e4, 400)
    for m in (1, 2, 3, 4, 5):
        out.append((f"fig1_classical_m{m}", ("t", "value"), _series_rows(slow.points, _finite("classical", m, 0, slow))))
    grid = TimeGrid.logarithmic(0.01, 100.0, 400)
    for m in WALK_M:
        out.append((f"fig1_quantum_m{m}_finite", ("t", "value"), _series_rows(grid.points, _finite("quantum", m, 0, grid))))
        out.append((f"fig1_quantum_m{m}_infinite", ("t", "value"), _series_rows(grid.points, _infinite("quantum", m, 0, grid, quad))))
    return out


def fig2(quad):
    out = []
    d = N_RING // 2
    slow = TimeGrid.logarithmic(0.01, 1e4, 400)
    fast = TimeGrid.linear(0.0, 60.0, 1201)
    for m in WALK_M:
        out.append((f"fig2_classical_m{m}_finite", ("t", "value"), _series_rows(slow.points, _finite("classical", m, d, slow))))
        out.append((f"fig2_classical_m{m}_infinite", ("t", "value"), _series_rows(slow.points, _infinite("classical", m, d, slow, quad))))
        out.append((f"fig2_quantum_m{m}_finite", ("t", "value"), _series_rows(fast.points, _finite("quantum", m, d, fast))))
        out.append((f"fig2_quantum_m{m}_infinite", ("t", "value"), _series_rows(fast.points, _infinite("quantum", m, d, fast, quad))))
    return out


def fig4(quad):
    out = []
    grids = {"classical": TimeGrid.linear(0.0, 150.0, 601), "quantum": TimeGrid.linear(0.0, 15.0, 601)}
    for kind, grid in grids.items():
        for m in WALK_M:
            d = 10 * m
            out.append((f"fig4_{kind}_m{m}_d{d}", ("t", "value"), _series_rows(grid.points, _infinite(kind, m, d, grid, quad))))
    return out


def fig5(quad):
    out = []
    fits = []
    for kind in ("classical", "quantum"):
        for m in WALK_M:
            samples = transport_samples(kind, m, config=quad)
            out.append((f"fig5_{kind}_m{m}", ("L", "d", "t_c", "v"),
                        [(s.length, s.distance, s.t_c, s.velocity) for s in samples]))
            fit = fit_quadratic(samples) if kind == "classical" else fit_linear_velocity(samples)
            fits += [(kind, m, fit.model, k, v, fit.r_squared) for k, v in fit.params.items()]
    out.append(("fig5_fits", ("kind", "m", "model", "param", "value", "r_squared"), fits))
    return out


def fig6(quad, m_values=(1, 3, 6, 8, 12)):
    return [(f"fig6_m{m}", ("k", "chi"), list(enumerate(limiting_distribution(LatticeSpec(N_RING, m), 0).values.tolist())))
            for m in m_values]


def fig8(quad):
    rows = []
    for m in range(1, (N_RING - 1) // 2 + 1):
        dl = asymmetry_delta(N_RING, m)
        rows.append((m, dl, dl != 0.0))
    out = [("fig8_a", ("m", "delta", "nonzero"), rows)]
    for m in (2, 3, 4):
        rows = []
        for n in range(20, 201, 2):
            dl = asymmetry_delta(n, m)
            rows.append((n, dl, dl != 0.0))
        out.append((f"fig8_b_m{m}", ("N", "delta", "nonzero"), rows))
    return out


RECIPES = {"fig1": fig1, "fig2": fig2, "fig4": fig4, "fig5": fig5, "fig6": fig6, "fig8": fig8}


def run_recipe(name: str, cfg) -> list[tuple[str, tuple, list]]:
    quad = QuadratureConfig(cfg.quad_error, cfg.max_subdivisions)
    return RECIPES[name](quad)
