"""Output writers (legacy VTK, CSV) and key = value run configuration."""
from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

CONVERGENCE_COLUMNS = ("scheme", "cells", "l1_error", "observed_order")
DIAGNOSTIC_COLUMNS = ("step", "time", "dt", "mass", "momentum_x", "momentum_y",
                      "max_froude", "min_h", "max_h")


class ConfigError(ValueError):
    pass


@dataclass
class OutputFrame:
    """Per-cell fields at one output instant."""

    time: float
    h: np.ndarray
    u: np.ndarray
    v: np.ndarray
    froude: np.ndarray

    def __post_init__(self):
        n = len(self.h)
        for name in ("u", "v", "froude"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"frame field {name} has length {len(getattr(self, name))}, expected {n}")

    @classmethod
    def from_field(cls, field, g):
        h = field.w[:, 0]
        u, v = field.velocities()
        return cls(field.time, h.copy(), u, v, np.sqrt(u * u + v * v) / np.sqrt(g * h))


def _num(x):
    return format(float(x), ".17g")


def write_vtk(mesh, frame: OutputFrame, path):
    """Write ``frame`` on ``mesh`` as a legacy ASCII VTK unstructured grid."""
    path = Path(path)
    if len(frame.h) != mesh.n_cells:
        raise ValueError(f"frame has {len(frame.h)} cells, mesh has {mesh.n_cells}")
    lines = ["# vtk DataFile Version 3.0",
             f"shallow water t={_num(frame.time)}",
             "ASCII",
             "DATASET UNSTRUCTURED_GRID",
             f"POINTS {mesh.n_vertices} double"]
    lines += [f"{_num(x)} {_num(y)} 0" for x, y in mesh.vertices]
    lines.append(f"CELLS {mesh.n_cells} {4 * mesh.n_cells}")
    lines += [f"3 {a} {b} {c}" for a, b, c in mesh.triangles]
    lines.append(f"CELL_TYPES {mesh.n_cells}")
    lines += ["5"] * mesh.n_cells
    lines.append(f"CELL_DATA {mesh.n_cells}")
    for name in ("h", "froude"):
        lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        lines += [_num(x) for x in getattr(frame, name)]
    lines.append("VECTORS velocity double")
    lines += [f"{_num(a)} {_num(b)} 0" for a, b in zip(frame.u, frame.v)]
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write VTK file {path}: {exc.strerror or exc}") from exc


class DiagnosticsWriter:
    """Appends one CSV row per step and flushes, so partial runs keep their data."""

    def __init__(self, path):
        self.path = Path(path)
        self._fh = open(self.path, "w", newline="")
        self._csv = csv.writer(self._fh)
        self._csv.writerow(DIAGNOSTIC_COLUMNS)
        self._fh.flush()

    def write(self, step, time, dt, mass, momentum_x, momentum_y, max_froude, min_h, max_h):
        self._csv.writerow([step] + [_num(x) for x in
                                     (time, dt, mass, momentum_x, momentum_y, max_froude, min_h, max_h)])
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_convergence_csv(rows, out):
    """Write (scheme, cells, l1_error, observed_order) rows to a path or text stream.

    A missing order (first mesh of a sequence) is written as an empty field.
    """
    def emit(fh):
        w = csv.writer(fh)
        w.writerow(CONVERGENCE_COLUMNS)
        for scheme, cells, err, order in rows:
            o = "" if order is None or not math.isfinite(order) else _num(order)
            w.writerow([scheme, int(cells), _num(err), o])

    if hasattr(out, "write"):
        emit(out)
    else:
        with open(out, "w", newline="") as fh:
            emit(fh)


def read_config_file(path):
    """Parse ``key = value`` lines into a dict of strings.

    Blank lines and ``#`` comments are skipped; a repeated key keeps the last value.
    """
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            if not key:
                raise ConfigError(f"{path}:{lineno}: empty key")
            out[key] = (value, f"{path}:{lineno}")
    return out


def _convert(name, ftype, text, where):
    text = text.strip()
    try:
        if text.lower() in ("none", "") and "None" in str(ftype):
            return None
        if "tuple" in str(ftype):
            return tuple(float(t) for t in text.replace(",", " ").split())
        if "float" in str(ftype):
            return float(text)
        if "int" in str(ftype):
            return int(text)
        return text
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {text!r} for {name}") from None


def parse_config(path=None, overrides=None):
    """Build a ``RunConfig`` from defaults, then a config file, then ``overrides``.

    ``overrides`` maps field names to values (already typed or strings);
    entries that are ``None`` are ignored.
    """
    from .driver import RunConfig

    fields = {f.name: f.type for f in dataclasses.fields(RunConfig)}
    values = {}
    if path is not None:
        for key, (text, where) in read_config_file(path).items():
            if key not in fields:
                raise ConfigError(f"{where}: unknown key {key!r}")
            values[key] = _convert(key, fields[key], text, where)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in fields:
            raise ConfigError(f"unknown option {key!r}")
        values[key] = _convert(key, fields[key], value, "command line") if isinstance(value, str) else value
    if "case" not in values:
        raise ConfigError("missing required key 'case'")
    try:
        return RunConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
