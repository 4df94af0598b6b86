"""Time loop, benchmark cases, error norms and convergence studies."""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace
from pathlib import Path

import numpy as np

from . import exact
from .bc import KINDS, TRANSMISSIVE, WALL, BoundarySpec
from .fvc import DIAMOND, BARYCENTRIC, NEAREST, PredictorConfig, fvc_step
from .io import DiagnosticsWriter, OutputFrame, write_vtk
from .mesh import generate_rect_mesh, generate_tensor_mesh, graded_coords, load_mesh
from .roe import RoeConfig, roe_step
from .swe import CENTROID_SPACING, EDGE_LENGTH, ConservedField, PhysParams, compute_time_step

SCHEMES = ("fvc", "roe")
CASES = ("accuracy_dam", "circular_dam", "partial_dam", "from_file")

# per-case defaults: end time, boundary kind, generated-mesh resolution
CASE_DEFAULTS = {
    "accuracy_dam": dict(t_end=5.5, boundary=WALL, resolution=36.0),
    "circular_dam": dict(t_end=16.0, boundary=TRANSMISSIVE, resolution=70.0),
    "partial_dam": dict(t_end=8.2, boundary=WALL, resolution=2.0, output_times=(2.2, 6.2, 8.2)),
    "from_file": dict(t_end=1.0, boundary=WALL, resolution=None),
}


@dataclass
class RunConfig:
    """Everything needed to reproduce one run.

    ``resolution`` is the number of quads per side for ``accuracy_dam`` and
    ``circular_dam`` and the target spacing in metres for ``partial_dam``.
    Fields left as ``None`` take the case default.  ``dt_length`` selects the
    length scale of the stability condition (``centroid`` or ``edge``).
    """

    case: str
    scheme: str = "fvc"
    cfl: float = 0.8
    alpha: float = 1.2
    g: float = 9.81
    f_c: float = 0.0
    t_end: float | None = None
    mesh: str | None = None
    resolution: float | None = None
    boundary: str | None = None
    interpolation: str = DIAMOND
    dt_length: str = CENTROID_SPACING
    h_left: float = 4.0
    h_right: float = 2.0
    dam_x: float = 50.0
    dam_x0: float = 95.0
    dam_x1: float = 105.0
    breach_y0: float = 95.0
    breach_y1: float = 170.0
    output_dir: str | None = None
    output_every: float | None = None
    output_times: tuple[float, ...] | None = None
    max_steps: int | None = None

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"unknown case {self.case!r}; expected one of {CASES}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        PhysParams(self.g, self.f_c)
        defaults = CASE_DEFAULTS[self.case]
        for key in ("t_end", "boundary", "resolution", "output_times"):
            if getattr(self, key) is None and key in defaults:
                setattr(self, key, defaults[key])
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if self.boundary not in KINDS:
            raise ValueError(f"unknown boundary {self.boundary!r}; expected one of {KINDS}")
        if self.interpolation not in (DIAMOND, BARYCENTRIC, NEAREST):
            raise ValueError(f"unknown interpolation {self.interpolation!r}")
        if self.dt_length not in (CENTROID_SPACING, EDGE_LENGTH):
            raise ValueError(f"unknown dt_length {self.dt_length!r}")
        if self.case == "from_file" and not self.mesh:
            raise ValueError("case from_file needs a mesh file")
        if not (self.h_left > 0 and self.h_right > 0):
            raise ValueError("initial depths must be positive")
        if self.output_every is not None and not self.output_every > 0:
            raise ValueError("output_every must be positive")

    @property
    def params(self):
        return PhysParams(self.g, self.f_c)


@dataclass
class Diagnostics:
    """Per-step time series; entry 0 is the initial state."""

    time: list = dc_field(default_factory=list)
    dt: list = dc_field(default_factory=list)
    mass: list = dc_field(default_factory=list)
    momentum_x: list = dc_field(default_factory=list)
    momentum_y: list = dc_field(default_factory=list)
    max_froude: list = dc_field(default_factory=list)
    min_h: list = dc_field(default_factory=list)
    max_h: list = dc_field(default_factory=list)

    def record(self, mesh, field, params, dt=0.0):
        a = mesh.areas
        self.time.append(field.time)
        self.dt.append(dt)
        self.mass.append(float(a @ field.w[:, 0]))
        self.momentum_x.append(float(a @ field.w[:, 1]))
        self.momentum_y.append(float(a @ field.w[:, 2]))
        self.max_froude.append(float(froude_field(field, params).max()))
        self.min_h.append(float(field.w[:, 0].min()))
        self.max_h.append(float(field.w[:, 0].max()))
        return self.row(-1)

    def row(self, k):
        return (self.time[k], self.dt[k], self.mass[k], self.momentum_x[k], self.momentum_y[k],
                self.max_froude[k], self.min_h[k], self.max_h[k])

    def __len__(self):
        return len(self.time)


# -- cases -------------------------------------------------------------------

def partial_dam_mesh(spacing=2.0, dam_x0=95.0, dam_x1=105.0, breach_y0=95.0, breach_y1=170.0,
                     size=200.0):
    """Square basin with a dam across ``[dam_x0, dam_x1]`` open only on the breach."""
    if not (0 < dam_x0 < dam_x1 < size and 0 <= breach_y0 < breach_y1 <= size):
        raise ValueError("dam geometry must lie inside the basin")
    xs = graded_coords([0.0, dam_x0, dam_x1, size], spacing)
    ys = graded_coords(sorted({0.0, breach_y0, breach_y1, size}), spacing)

    def keep(cx, cy):
        in_dam = (cx > dam_x0) & (cx < dam_x1)
        in_breach = (cy > breach_y0) & (cy < breach_y1)
        return ~in_dam | in_breach

    return generate_tensor_mesh(xs, ys, "alternating", keep)


def build_mesh(config: RunConfig):
    c = config
    if c.mesh:
        return load_mesh(c.mesh)
    if c.case == "accuracy_dam":
        n = int(c.resolution)
        return generate_rect_mesh((0.0, 100.0), (0.0, 100.0), n, n, "alternating")
    if c.case == "circular_dam":
        n = int(c.resolution)
        return generate_rect_mesh((-10.0, 10.0), (-10.0, 10.0), n, n, "alternating")
    if c.case == "partial_dam":
        return partial_dam_mesh(c.resolution, c.dam_x0, c.dam_x1, c.breach_y0, c.breach_y1)
    raise ValueError(f"case {c.case!r} needs a mesh file")


def circular_dam_depth(x, y, a=2.5, b=0.4, c=0.1):
    return 1.0 + 0.25 * (1.0 - np.tanh((np.sqrt(a * x * x + b * y * y) - 1.0) / c))


def init_case(case, mesh, params=None, config: RunConfig | None = None) -> ConservedField:
    """Initial field of ``case`` at the cell centroids (fluid at rest)."""
    config = config if config is not None else RunConfig(case)
    cx, cy = mesh.centroids[:, 0], mesh.centroids[:, 1]
    (x_lo, y_lo), (x_hi, y_hi) = mesh.bounding_box()
    if case in ("accuracy_dam", "from_file"):
        split = config.dam_x
        if case == "accuracy_dam" and not x_lo < split < x_hi:
            raise ValueError(f"dam position x={split} lies outside the mesh [{x_lo}, {x_hi}]")
        h = np.where(cx < split, config.h_left, config.h_right)
    elif case == "circular_dam":
        if not (x_lo < 0 < x_hi and y_lo < 0 < y_hi):
            raise ValueError("circular dam is centred at the origin, which lies outside the mesh")
        h = circular_dam_depth(cx, cy)
    elif case == "partial_dam":
        if not (x_lo <= config.dam_x0 and config.dam_x1 <= x_hi
                and y_lo <= config.breach_y0 and config.breach_y1 <= y_hi):
            raise ValueError("dam geometry lies outside the mesh")
        h = np.where(cx < 0.5 * (config.dam_x0 + config.dam_x1), config.h_left, config.h_right)
    else:
        raise ValueError(f"unknown case {case!r}")
    return ConservedField.from_primitives(h, 0.0, 0.0)


def exact_sampler(config: RunConfig):
    """Exact depth h(x, y, t) for the planar dam break of ``config``."""
    prob = exact.DamBreakProblem(config.h_left, config.h_right, config.g, config.dam_x)

    def sampler(x, y, t):
        return exact.sample(prob, x, t)[0]

    return sampler


# -- diagnostics ---------------------------------------------------------------

def froude_field(field, params):
    h = field.w[:, 0]
    u, v = field.velocities()
    return np.sqrt(u * u + v * v) / np.sqrt(params.g * h)


def l1_relative_error(mesh, computed, sampler, t):
    """Area-weighted relative L1 error of the depth against ``sampler(x, y, t)``."""
    c = mesh.centroids
    h_ex = np.asarray(sampler(c[:, 0], c[:, 1], t), dtype=float)
    den = float(mesh.areas @ np.abs(h_ex))
    if den == 0:
        raise ZeroDivisionError("exact depth vanishes everywhere; relative error undefined")
    return float(mesh.areas @ np.abs(computed.w[:, 0] - h_ex)) / den


def mirror_map(mesh, axis=0, tol=1e-9):
    """Index of the mirror image of every cell under x -> -x (axis 0) or y -> -y."""
    c = mesh.centroids.copy()
    m = c.copy()
    m[:, axis] = -m[:, axis]
    scale = max(1.0, float(np.abs(c).max()))
    key_c = np.round(c / (tol * scale)).astype(np.int64)
    key_m = np.round(m / (tol * scale)).astype(np.int64)
    lookup = {tuple(k): i for i, k in enumerate(key_c)}
    out = np.array([lookup.get(tuple(k), -1) for k in key_m])
    if np.any(out < 0):
        raise ValueError("mesh is not mirror symmetric")
    return out


def mirror_asymmetry(field, mirror, axis=0):
    """Max deviation from mirror symmetry; the momentum normal to the mirror flips sign."""
    w = field.w
    sign = np.ones(3)
    sign[1 + axis] = -1.0
    return float(np.abs(w - sign * w[mirror]).max())


# -- time loop ---------------------------------------------------------------

def _output_instants(config):
    times = set()
    if config.output_times:
        times.update(t for t in config.output_times if 0 < t <= config.t_end)
    if config.output_every:
        k = 1
        while k * config.output_every < config.t_end * (1 - 1e-12):
            times.add(k * config.output_every)
            k += 1
    if config.output_dir:
        times.add(config.t_end)
    return sorted(times)


class Stepper:
    """Scheme-specific single step with the run's fixed settings."""

    def __init__(self, config, mesh, field0):
        self.config = config
        self.mesh = mesh
        self.params = config.params
        self.bc = BoundarySpec(config.boundary)
        self.pred = PredictorConfig(config.alpha, config.interpolation)
        self.roe = RoeConfig.for_depth(config.g, float(field0.w[:, 0].max()))

    def time_step(self, field, t_stop):
        c = self.config
        return compute_time_step(self.mesh, field, c.cfl, c.alpha, c.g, t_end=t_stop, length=c.dt_length)

    def __call__(self, field, dt):
        if self.config.scheme == "fvc":
            return fvc_step(self.mesh, field, self.params, self.pred, self.bc, dt)
        return roe_step(self.mesh, field, self.params, self.bc, dt, self.roe)


def run(config: RunConfig, mesh=None, field=None, progress=None):
    """Integrate ``config`` to ``t_end``.

    Returns ``(final field, Diagnostics)``.  With ``output_dir`` set, a
    diagnostics CSV is appended every step and a VTK frame is written at
    every output instant, which the step size is clipped to hit exactly.
    """
    mesh = build_mesh(config) if mesh is None else mesh
    field = init_case(config.case, mesh, config.params, config) if field is None else field.copy()
    step = Stepper(config, mesh, field)
    diag = Diagnostics()
    diag.record(mesh, field, step.params)
    instants = _output_instants(config)
    writer = None
    out = None
    if config.output_dir:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        writer = DiagnosticsWriter(out / "diagnostics.csv")
        writer.write(0, *diag.row(-1))
        write_vtk(mesh, OutputFrame.from_field(field, config.g), out / "frame_0000.vtk")
    stops = [t for t in instants if t > field.time] + [config.t_end]
    frame_no = 1
    n = 0
    try:
        for stop in sorted(set(stops)):
            while field.time < stop:
                if config.max_steps is not None and n >= config.max_steps:
                    return field, diag
                dt = step.time_step(field, stop)
                landing = field.time + dt >= stop
                field = step(field, dt)
                if landing:
                    field.time = stop
                n += 1
                row = diag.record(mesh, field, step.params, dt)
                if not np.all(np.isfinite(field.w)):
                    raise FloatingPointError(f"NaN in solution at step {n}, t={field.time:.6g}")
                if writer is not None:
                    writer.write(n, *row)
                if progress is not None:
                    progress(n, field, dt)
            if out is not None and stop in instants:
                write_vtk(mesh, OutputFrame.from_field(field, config.g), out / f"frame_{frame_no:04d}.vtk")
                frame_no += 1
    finally:
        if writer is not None:
            writer.close()
    return field, diag


# -- convergence ---------------------------------------------------------------

def observed_orders(cells, errors):
    """Per-pair orders log(e_k/e_k+1) / log(sqrt(N_k+1/N_k)).

    The first entry is None, as is any pair with a zero error.
    """
    out = [None]
    for k in range(len(cells) - 1):
        if errors[k] <= 0 or errors[k + 1] <= 0:
            out.append(None)
            continue
        out.append(math.log(errors[k] / errors[k + 1]) / math.log(math.sqrt(cells[k + 1] / cells[k])))
    return out


def fitted_order(cells, errors):
    """Least-squares slope of -log(error) against log(sqrt(cells))."""
    x = 0.5 * np.log(np.asarray(cells, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    return float(-np.polyfit(x, y, 1)[0])


def convergence_study(config: RunConfig, meshes, sampler=None):
    """Run ``config`` on each mesh and tabulate (cells, error, order).

    ``meshes`` holds Mesh objects or resolutions.  Returns a list of
    ``(cells, l1_error, observed_order)`` rows.
    """
    meshes = list(meshes)
    if len(meshes) < 2:
        raise ValueError("a convergence study needs at least two meshes")
    sampler = sampler if sampler is not None else exact_sampler(config)
    cells, errors = [], []
    for m in meshes:
        if not hasattr(m, "n_cells"):
            m = build_mesh(replace(config, resolution=float(m)))
        final, _ = run(config, mesh=m)
        cells.append(m.n_cells)
        errors.append(l1_relative_error(m, final, sampler, final.time))
    if any(b <= a for a, b in zip(cells, cells[1:])):
        raise ValueError(f"meshes must be of increasing size, got {cells}")
    return list(zip(cells, errors, observed_orders(cells, errors)))
