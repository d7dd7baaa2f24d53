"""Run configuration and deterministic CSV / JSON emission."""
from __future__ import annotations

import dataclasses
import json
import os
import tempfile
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__


@dataclass
class RunConfig:
    command: str
    n: str | None = None
    m: int | None = None
    m_range: str | None = None
    n_range: str | None = None
    kind: str | None = None
    source: int = 0
    target: int | None = None
    distance: int | None = None
    offset: int = 0
    t_min: float | None = None
    t_max: float | None = None
    count: int | None = None
    spacing: str | None = None
    distances: str | None = None
    window: str | None = None
    envelope: bool = False
    delta: bool = False
    no_wrap: bool = False
    n_max: int | None = None
    figure: str | None = None
    out: str | None = None
    out_dir: str | None = None
    fit_out: str | None = None
    format: str = "csv"
    quad_error: float = 1e-10
    max_subdivisions: int = 2**20
    one_based: bool = False

    def items(self) -> list[tuple[str, object]]:
        return [(f.name, getattr(self, f.name)) for f in fields(self) if getattr(self, f.name) is not None]

    def to_text(self) -> str:
        return "".join(f"{k} = {format_value(v)}\n" for k, v in self.items())

    @classmethod
    def field_names(cls) -> set[str]:
        return {f.name for f in fields(cls)}

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        kwargs = {}
        types = {f.name: f.type for f in fields(cls)}
        for key, raw in data.items():
            name = key.replace("-", "_")
            if name not in types:
                raise ValueError(f"unknown config key {key!r}")
            kwargs[name] = coerce(types[name], raw)
        if "command" not in kwargs:
            raise ValueError("config has no command")
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        return cls.from_mapping(parse_config_text(text))

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ValueError(f"config line {lineno}: empty key")
        out[key.replace("-", "_")] = value
    return out


def coerce(annotation: str, raw):
    if not isinstance(raw, str):
        return raw
    base = annotation.replace(" | None", "").strip()
    if base == "bool":
        low = raw.lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if base == "int":
        return int(raw)
    if base == "float":
        return float(raw)
    return raw


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_cell(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    try:
        import numpy as np

        if isinstance(v, np.floating):
            return repr(float(v))
        if isinstance(v, np.integer):
            return str(int(v))
    except ImportError:  # pragma: no cover
        pass
    return str(v)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_csv(columns: Sequence[str], rows: Iterable[Sequence], config: RunConfig) -> str:
    lines = [f"# ringwalk {__version__}"]
    lines += [f"# {k} = {format_value(v)}" for k, v in config.items()]
    lines.append(",".join(columns))
    lines += [",".join(format_cell(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


def _json_cell(v):
    if isinstance(v, bool):
        return v
    try:
        import numpy as np

        if isinstance(v, np.floating):
            return float(v)
        if isinstance(v, np.integer):
            return int(v)
        if isinstance(v, np.bool_):
            return bool(v)
    except ImportError:  # pragma: no cover
        pass
    return v


def render_json(columns: Sequence[str], rows: Iterable[Sequence], config: RunConfig) -> str:
    doc = {
        "version": __version__,
        "config": {k: v for k, v in config.items()},
        "columns": list(columns),
        "records": [{c: _json_cell(v) for c, v in zip(columns, row)} for row in rows],
    }
    return json.dumps(doc, indent=1) + "\n"


def write_table(path: str | Path, columns: Sequence[str], rows: Iterable[Sequence],
                config: RunConfig, fmt: str | None = None) -> Path:
    fmt = fmt or config.format
    rows = list(rows)
    if fmt == "csv":
        text = render_csv(columns, rows, config)
    elif fmt == "json":
        text = render_json(columns, rows, config)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    path = Path(path)
    _atomic_write(path, text)
    return path


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    """Read back a table written by :func:`write_table`, skipping the comment block."""
    body = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    header = body[0].split(",")
    return header, [ln.split(",") for ln in body[1:]]
