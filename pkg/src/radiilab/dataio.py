"""CSV and key-value file formats.

Numeric CSV fields serialize with 17 significant digits, which round-trips
float64 exactly.  Output files start with ``# key: value`` comment lines
(generator, config hash, seed, timestamp); the body below the header is
deterministic for a fixed config and seed.

Measure files carry the header ``# d=<int> resolution=<real>`` followed by
``x_1,...,x_d,mass`` rows.  Config and spec files are flat ``key = value``
text with dotted-key nesting; grids are ``start:stop:factor`` (geometric) or
comma lists, and numbers accept ``2^-12`` and ``1/8`` conveniences.
"""
from __future__ import annotations

import re

import numpy as np

from .errors import InputError
from .measures import DiscreteMeasure


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, columns, rows, header: dict | None = None) -> None:
    lines = []
    for key, value in (header or {}).items():
        lines.append(f"# {key}: {value}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path):
    """Returns (header dict, column names, rows of strings)."""
    header: dict[str, str] = {}
    columns: list[str] | None = None
    rows: list[list[str]] = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if ":" in body:
                    key, value = body.split(":", 1)
                    header[key.strip()] = value.strip()
                continue
            if columns is None:
                columns = line.split(",")
            else:
                rows.append(line.split(","))
    if columns is None:
        raise InputError(f"no column header found in {path}")
    return header, columns, rows


def csv_body(path) -> str:
    """The deterministic part of an output file (everything below # lines)."""
    with open(path) as fh:
        return "".join(line for line in fh if not line.startswith("#"))


# ---------------------------------------------------------------------------
# measure files
# ---------------------------------------------------------------------------
def write_measure(path, measure: DiscreteMeasure) -> None:
    with open(path, "w") as fh:
        fh.write(f"# d={measure.dimension} resolution={format_value(measure.resolution)}\n")
        for atom, mass in zip(measure.atoms, measure.masses):
            cells = [format_value(c) for c in atom] + [format_value(mass)]
            fh.write(",".join(cells) + "\n")


def read_measure(path) -> DiscreteMeasure:
    d = None
    resolution = None
    atoms, masses = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = re.search(r"d=(\d+)\s+resolution=([^\s]+)", line)
                if m:
                    d = int(m.group(1))
                    resolution = float(m.group(2))
                continue
            parts = [float(p) for p in line.split(",")]
            atoms.append(parts[:-1])
            masses.append(parts[-1])
    if d is None or resolution is None:
        raise InputError(f"measure file {path} is missing the '# d=.. resolution=..' header")
    return DiscreteMeasure(d, np.asarray(atoms), np.asarray(masses), resolution)


# ---------------------------------------------------------------------------
# key-value config text
# ---------------------------------------------------------------------------
def parse_kv(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise InputError(f"line {lineno}: empty key")
        if key in out:
            raise InputError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def format_kv(items: dict) -> str:
    return "\n".join(f"{k} = {format_value(v)}" for k, v in items.items()) + "\n"


_POW = re.compile(r"^([+-]?\d+(?:\.\d+)?)\^([+-]?\d+(?:\.\d+)?)$")
_FRAC = re.compile(r"^([+-]?\d+(?:\.\d+)?)/(\d+(?:\.\d+)?)$")


def parse_number(token: str) -> float:
    token = token.strip()
    m = _POW.match(token)
    if m:
        return float(m.group(1)) ** float(m.group(2))
    m = _FRAC.match(token)
    if m:
        return float(m.group(1)) / float(m.group(2))
    try:
        return float(token)
    except ValueError:
        raise InputError(f"not a number: {token!r}") from None


def parse_grid(token: str, max_points: int = 100_000) -> list[float]:
    """Geometric ``start:stop:factor`` grid, or a comma list of numbers."""
    token = token.strip()
    if ":" in token:
        parts = token.split(":")
        if len(parts) != 3:
            raise InputError(f"grid must be start:stop:factor, got {token!r}")
        start, stop, factor = (parse_number(p) for p in parts)
        if start <= 0 or stop <= 0 or factor <= 0 or factor == 1.0:
            raise InputError("geometric grid needs positive start/stop and factor != 1")
        if (factor > 1.0) != (stop > start):
            raise InputError(f"grid {token!r} never reaches its stop value")
        values = [start]
        while len(values) < max_points:
            nxt = values[-1] * factor
            if (factor > 1.0 and nxt > stop * (1.0 + 1e-12)) or (
                factor < 1.0 and nxt < stop * (1.0 - 1e-12)
            ):
                break
            values.append(nxt)
        return values
    return [parse_number(p) for p in token.split(",") if p.strip()]
