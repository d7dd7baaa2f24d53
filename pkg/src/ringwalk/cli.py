"""Command-line entry point.

Every subcommand writes one table (CSV by default, JSON on request) whose
comment header records the full run configuration. Exit status is 0 on
success, 2 on usage errors and 1 on numerical failures.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .errors import LatticeError, NumericalError
from .finite import TimeGrid, distribution_snapshot, transition_probability
from .infinite import (
    QuadratureConfig,
    infinite_classical,
    infinite_quantum,
    no_wrap_check,
)
from .lattice import INFINITE, LatticeSpec, bloch_eigenvalues, degeneracy_partition
from .limiting import asymmetry_delta, general_mirror_asymmetry, limiting_distribution
from .oracle import three_way_agreement
from .report import RunConfig, parse_config_text, write_table
from .transport import (
    delta_scaling,
    fit_linear_velocity,
    fit_quadratic,
    scaling_exponent,
    transport_samples,
)

COMMANDS = ("spectrum", "evolve", "snapshot", "infinite", "limiting", "asymmetry",
            "transport", "scaling", "verify", "figure")
FIGURES = ("fig1", "fig2", "fig4", "fig5", "fig6", "fig8")
VERIFY_TOLERANCE = 1e-8
FIT_COLUMNS = ("model", "param", "value", "r_squared", "residual_max")


class UsageError(Exception):
    pass


def parse_range(text: str, name: str) -> list[int]:
    """``a:b`` or ``a:b:step``, both ends inclusive."""
    try:
        parts = [int(p) for p in text.split(":")]
    except ValueError:
        raise UsageError(f"--{name}: expected a:b or a:b:step, got {text!r}") from None
    if len(parts) == 1:
        return parts
    if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] <= 0) or parts[1] < parts[0]:
        raise UsageError(f"--{name}: bad range {text!r}")
    step = parts[2] if len(parts) == 3 else 1
    return list(range(parts[0], parts[1] + 1, step))


def parse_window(text: str) -> tuple[float, float]:
    try:
        a, b = (float(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"--window: expected a:b, got {text!r}") from None
    if not 0 < a < b:
        raise UsageError(f"--window: need 0 < a < b, got {text!r}")
    return a, b


def _require(cfg: RunConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise UsageError(f"{cfg.command}: missing --{', --'.join(m.replace('_', '-') for m in missing)}")


def _kind(cfg: RunConfig) -> str:
    kind = cfg.kind or "quantum"
    if kind not in ("classical", "quantum"):
        raise UsageError(f"--kind must be classical or quantum, got {kind!r}")
    return kind


def _size(cfg: RunConfig):
    _require(cfg, "n")
    if cfg.n == INFINITE:
        return INFINITE
    try:
        return int(cfg.n)
    except ValueError:
        raise UsageError(f"--n must be an integer or 'inf', got {cfg.n!r}") from None


def _lattice(cfg: RunConfig, finite: bool = True) -> LatticeSpec:
    _require(cfg, "m")
    size = _size(cfg)
    if finite and size == INFINITE:
        raise UsageError(f"{cfg.command} needs a finite --n")
    return LatticeSpec(size, cfg.m)


def _node_in(cfg: RunConfig, k: int) -> int:
    return k - 1 if cfg.one_based else k


def _node_out(cfg: RunConfig, k: int) -> int:
    return k + 1 if cfg.one_based else k


def _grid(cfg: RunConfig) -> TimeGrid:
    spacing = cfg.spacing or "linear"
    count = 201 if cfg.count is None else cfg.count
    t_max = 20.0 if cfg.t_max is None else cfg.t_max
    if count < 1:
        raise UsageError("--count must be positive")
    if spacing in ("log", "logarithmic"):
        t_min = 0.01 if cfg.t_min is None else cfg.t_min
        if t_min <= 0:
            raise UsageError("logarithmic grids need --t-min > 0")
        return TimeGrid(np.geomspace(t_min, t_max, count), "logarithmic")
    if spacing != "linear":
        raise UsageError(f"--spacing must be linear or log, got {spacing!r}")
    t_min = 0.0 if cfg.t_min is None else cfg.t_min
    if count == 1:
        return TimeGrid(np.array([t_min]))
    return TimeGrid(np.linspace(t_min, t_max, count), "linear")


def _quad(cfg: RunConfig) -> QuadratureConfig:
    return QuadratureConfig(cfg.quad_error, cfg.max_subdivisions)


def _fit_rows(fit) -> list[tuple]:
    return [(fit.model, k, v, fit.r_squared, fit.residual_max) for k, v in fit.params.items()]


# each handler returns a list of (suffix, columns, rows) plus a success flag;
# suffix "" is the main output


def cmd_spectrum(cfg):
    lattice = _lattice(cfg)
    spec = bloch_eigenvalues(lattice)
    ids = degeneracy_partition(spec).class_ids()
    rows = [(n, float(spec.phases[n]), float(spec.eigenvalues[n]), int(ids[n])) for n in range(lattice.n)]
    return [("", ("n", "theta", "E", "class_id"), rows)], True


def _infinite_series(kind, m, d, t, cfg):
    fn = infinite_quantum if kind == "quantum" else infinite_classical
    return np.atleast_1d(fn(m, d, t, _quad(cfg)))


def cmd_evolve(cfg):
    kind = _kind(cfg)
    lattice = _lattice(cfg, finite=False)
    grid = _grid(cfg)
    j = _node_in(cfg, cfg.source)
    k = _node_in(cfg, cfg.target if cfg.target is not None else cfg.source)
    if lattice.is_finite:
        values = transition_probability(lattice, j, k, kind, grid).values
    else:
        values = _infinite_series(kind, lattice.m, k - j, grid.points, cfg)
    rows = list(zip(grid.points.tolist(), values.tolist()))
    return [("", ("t", "value"), rows)], True


def cmd_snapshot(cfg):
    kind = _kind(cfg)
    lattice = _lattice(cfg)
    grid = _grid(cfg)
    snap = distribution_snapshot(lattice, _node_in(cfg, cfg.source), kind, grid)
    rows = [(float(t), _node_out(cfg, k), float(snap[i, k]))
            for i, t in enumerate(grid.points) for k in range(lattice.n)]
    return [("", ("t", "k", "value"), rows)], True


def cmd_infinite(cfg):
    kind = _kind(cfg)
    _require(cfg, "m")
    d = cfg.distance
    if d is None:
        d = (cfg.target if cfg.target is not None else cfg.source) - cfg.source
    grid = _grid(cfg)
    values = _infinite_series(kind, cfg.m, d, grid.points, cfg)
    if not cfg.no_wrap:
        return [("", ("t", "value"), list(zip(grid.points.tolist(), values.tolist())))], True
    rows = []
    for t, v in zip(grid.points.tolist(), values.tolist()):
        rep = no_wrap_check(cfg.m, d, t, kind, _quad(cfg))
        rows.append((t, v, rep.finite_value, rep.n_used, rep.discrepancy))
    return [("", ("t", "value", "finite", "n_used", "discrepancy"), rows)], True


def cmd_limiting(cfg):
    lattice = _lattice(cfg)
    dist = limiting_distribution(lattice, _node_in(cfg, cfg.source))
    rows = [(_node_out(cfg, k), float(v)) for k, v in enumerate(dist.values)]
    return [("", ("k", "chi"), rows)], True


def _delta(n, m, j, offset):
    if offset:
        return general_mirror_asymmetry(n, m, j, offset)
    return asymmetry_delta(n, m, j)


def cmd_asymmetry(cfg):
    j = _node_in(cfg, cfg.source)
    if cfg.n_range is not None:
        _require(cfg, "m")
        rows = []
        for n in parse_range(cfg.n_range, "n-range"):
            if n % 2 or n < 2 * cfg.m + 1:
                continue
            dl = _delta(n, cfg.m, j, cfg.offset)
            rows.append((n, dl, dl != 0.0))
        return [("", ("N", "delta", "nonzero"), rows)], True
    n = _size(cfg)
    if n == INFINITE:
        raise UsageError("asymmetry needs a finite --n")
    ms = parse_range(cfg.m_range, "m-range") if cfg.m_range else [cfg.m] if cfg.m else None
    if ms is None:
        ms = list(range(1, (n - 1) // 2 + 1))
    rows = []
    for m in ms:
        dl = _delta(n, m, j, cfg.offset)
        rows.append((m, dl, dl != 0.0))
    return [("", ("m", "delta", "nonzero"), rows)], True


def cmd_transport(cfg):
    kind = _kind(cfg)
    _require(cfg, "m")
    lengths = parse_range(cfg.distances or "5:30", "distances")
    samples = transport_samples(kind, cfg.m, lengths, _quad(cfg))
    rows = [(s.length, s.distance, s.t_c, s.velocity) for s in samples]
    fits = _fit_rows(fit_quadratic(samples) if kind == "classical" else fit_linear_velocity(samples))
    return [("", ("L", "d", "t_c", "v"), rows), ("fit", FIT_COLUMNS, fits)], True


def cmd_scaling(cfg):
    _require(cfg, "m")
    if cfg.delta:
        sizes = parse_range(cfg.n_range or "20:200:2", "n-range")
        try:
            fit = delta_scaling(cfg.m, sizes)
        except ValueError as exc:
            raise NumericalError(str(exc)) from None
        return [("", FIT_COLUMNS, _fit_rows(fit))], True
    kind = _kind(cfg)
    window = parse_window(cfg.window or ("20:80" if kind == "classical" else "10:100"))
    size = _size(cfg) if cfg.n is not None else INFINITE
    d = 0 if cfg.distance is None else cfg.distance
    grid = TimeGrid.resolved(cfg.m, window[1], t_min=window[0])
    if size == INFINITE:
        values = _infinite_series(kind, cfg.m, d, grid.points, cfg)
    else:
        lattice = LatticeSpec(size, cfg.m)
        values = transition_probability(lattice, 0, d % lattice.n, kind, grid).values
    use_env = cfg.envelope or kind == "quantum"
    fit = scaling_exponent(grid.points, values, window, use_envelope=use_env)
    return [("", FIT_COLUMNS, _fit_rows(fit))], True


def cmd_verify(cfg):
    if cfg.n is not None:
        _require(cfg, "m")
        lattices = [_lattice(cfg)]
    else:
        n_max = 32 if cfg.n_max is None else cfg.n_max
        lattices = [LatticeSpec(n, m) for n in range(3, n_max + 1) for m in range(1, (n - 1) // 2 + 1)]
    grid = _grid(cfg)
    kinds = [cfg.kind] if cfg.kind else ["classical", "quantum"]
    rows = []
    ok = True
    for lat in lattices:
        for kind in kinds:
            rep = three_way_agreement(lat, kind, grid)
            passed = rep.worst <= VERIFY_TOLERANCE
            ok &= passed
            rows.append((lat.n, lat.m, kind, rep.bloch_vs_dense, rep.bloch_vs_ode, rep.dense_vs_ode, passed))
    cols = ("N", "m", "kind", "bloch_vs_dense", "bloch_vs_ode", "dense_vs_ode", "pass")
    return [("", cols, rows)], ok


def cmd_figure(cfg):
    from .recipes import run_recipe

    _require(cfg, "figure")
    if cfg.figure not in FIGURES:
        raise UsageError(f"unknown figure {cfg.figure!r}; choose from {', '.join(FIGURES)}")
    return run_recipe(cfg.figure, cfg), True


HANDLERS = {
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "snapshot": cmd_snapshot,
    "infinite": cmd_infinite,
    "limiting": cmd_limiting,
    "asymmetry": cmd_asymmetry,
    "transport": cmd_transport,
    "scaling": cmd_scaling,
    "verify": cmd_verify,
    "figure": cmd_figure,
}


def _extra_path(main: Path, suffix: str) -> Path:
    return main.with_name(f"{main.stem}_{suffix}{main.suffix}")


def execute(cfg: RunConfig) -> tuple[list[Path], bool]:
    """Run one configuration and write its outputs; returns written paths and success."""
    tables, ok = HANDLERS[cfg.command](cfg)
    written = []
    ext = ".json" if cfg.format == "json" else ".csv"
    if cfg.command == "figure":
        out_dir = Path(cfg.out_dir or ".")
        for name, cols, rows in tables:
            written.append(write_table(out_dir / f"{name}{ext}", cols, rows, cfg))
        return written, ok
    main_path = Path(cfg.out) if cfg.out else Path(f"{cfg.command}{ext}")
    for suffix, cols, rows in tables:
        if not suffix:
            path = main_path
        elif suffix == "fit" and cfg.fit_out:
            path = Path(cfg.fit_out)
        else:
            path = _extra_path(main_path, suffix)
        written.append(write_table(path, cols, rows, cfg))
    return written, ok


def _add_common(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="key = value file; flags override it")
    p.add_argument("--out", default=S)
    p.add_argument("--format", choices=("csv", "json"), default=S)
    p.add_argument("--one-based", action="store_true", default=S, help="node labels start at 1")
    p.add_argument("--quad-error", type=float, default=S)
    p.add_argument("--max-subdivisions", type=int, default=S)


def _add_lattice(p):
    S = argparse.SUPPRESS
    p.add_argument("--n", default=S, help="ring size or 'inf'")
    p.add_argument("--m", type=int, default=S)


def _add_grid(p):
    S = argparse.SUPPRESS
    p.add_argument("--t-min", type=float, default=S)
    p.add_argument("--t-max", type=float, default=S)
    p.add_argument("--count", type=int, default=S)
    p.add_argument("--spacing", choices=("linear", "log"), default=S)


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="ringwalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="Bloch eigenvalues and degeneracy classes")
    _add_lattice(p)

    p = sub.add_parser("evolve", help="transition probability for one node pair")
    _add_lattice(p)
    p.add_argument("--kind", choices=("classical", "quantum"), default=S)
    p.add_argument("--source", type=int, default=S)
    p.add_argument("--target", type=int, default=S)
    _add_grid(p)

    p = sub.add_parser("snapshot", help="probabilities at every node over time")
    _add_lattice(p)
    p.add_argument("--kind", choices=("classical", "quantum"), default=S)
    p.add_argument("--source", type=int, default=S)
    _add_grid(p)

    p = sub.add_parser("infinite", help="infinite-chain probability by quadrature")
    p.add_argument("--m", type=int, default=S)
    p.add_argument("--kind", choices=("classical", "quantum"), default=S)
    p.add_argument("--distance", type=int, default=S)
    p.add_argument("--no-wrap", action="store_true", default=S, help="add the finite-ring cross-check")
    _add_grid(p)

    p = sub.add_parser("limiting", help="long-time averaged distribution")
    _add_lattice(p)
    p.add_argument("--source", type=int, default=S)

    p = sub.add_parser("asymmetry", help="mirror-node asymmetry over m or N")
    _add_lattice(p)
    p.add_argument("--m-range", default=S)
    p.add_argument("--n-range", default=S)
    p.add_argument("--source", type=int, default=S)
    p.add_argument("--offset", type=int, default=S)

    p = sub.add_parser("transport", help="character times and velocity fits")
    p.add_argument("--m", type=int, default=S)
    p.add_argument("--kind", choices=("classical", "quantum"), default=S)
    p.add_argument("--distances", default=S, help="path lengths L as a:b")
    p.add_argument("--fit-out", default=S)

    p = sub.add_parser("scaling", help="power-law exponents")
    _add_lattice(p)
    p.add_argument("--kind", choices=("classical", "quantum"), default=S)
    p.add_argument("--distance", type=int, default=S)
    p.add_argument("--window", default=S)
    p.add_argument("--envelope", action="store_true", default=S)
    p.add_argument("--delta", action="store_true", default=S, help="fit the asymmetry decay in N")
    p.add_argument("--n-range", default=S)

    p = sub.add_parser("verify", help="Bloch / dense / ODE agreement report")
    _add_lattice(p)
    p.add_argument("--n-max", type=int, default=S)
    p.add_argument("--kind", choices=("classical", "quantum"), default=S)
    _add_grid(p)

    p = sub.add_parser("figure", help="write the data behind one figure")
    p.add_argument("figure", help=", ".join(FIGURES))
    p.add_argument("--out-dir", default=S)

    for name, child in sub.choices.items():
        _add_common(child)
    return parser


def config_from_argv(argv) -> RunConfig:
    parser = build_parser()
    ns = vars(parser.parse_args(argv))
    values = {}
    cfg_path = ns.pop("config", None)
    if cfg_path is not None:
        try:
            values.update(parse_config_text(Path(cfg_path).read_text()))
        except OSError as exc:
            raise UsageError(f"cannot read config {cfg_path}: {exc}") from None
    values.pop("command", None)
    values.update({k: v for k, v in ns.items()})
    try:
        return RunConfig.from_mapping(values)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def main(argv=None) -> int:
    try:
        cfg = config_from_argv(sys.argv[1:] if argv is None else argv)
        _, ok = execute(cfg)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    except (UsageError, LatticeError, ValueError) as exc:
        print(f"ringwalk: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"ringwalk: numerical failure: {exc}", file=sys.stderr)
        return 1
    if not ok:
        print(f"ringwalk: {cfg.command}: agreement above {VERIFY_TOLERANCE:g}", file=sys.stderr)
        return 1
    return 0


run = main

if __name__ == "__main__":
    sys.exit(main())
