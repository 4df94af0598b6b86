"""State algebra for the rotating shallow water equations.

Conserved states are arrays whose last axis is ``(h, hu, hv)``; unit normals
have last axis ``(n_x, n_y)``.  Every function broadcasts over leading axes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

H_MIN = 1e-12


class PositivityError(FloatingPointError):
    """A depth at or below ``H_MIN`` was encountered."""

    def __init__(self, msg, where=None, time=None):
        self.where = where
        self.time = time
        super().__init__(msg)


@dataclass(frozen=True)
class PhysParams:
    g: float = 9.81
    f_c: float = 0.0

    def __post_init__(self):
        if not (self.g > 0 and np.isfinite(self.g)):
            raise ValueError(f"g must be positive, got {self.g}")
        if not np.isfinite(self.f_c):
            raise ValueError(f"f_c must be finite, got {self.f_c}")


@dataclass
class ConservedField:
    """Cell averages ``w`` of shape (n_cells, 3) at ``time``."""

    w: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)
        if self.w.ndim != 2 or self.w.shape[1] != 3:
            raise ValueError(f"field must have shape (n_cells, 3), got {self.w.shape}")

    @property
    def h(self):
        return self.w[:, 0]

    def velocities(self):
        return self.w[:, 1] / self.w[:, 0], self.w[:, 2] / self.w[:, 0]

    def copy(self):
        return ConservedField(self.w.copy(), self.time)

    @classmethod
    def from_primitives(cls, h, u, v, time=0.0):
        h = np.asarray(h, dtype=float)
        return cls(np.column_stack([h, h * u, h * v]), time)


def check_positive(h, what="state"):
    h = np.asarray(h)
    bad = ~(h > H_MIN)
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        loc = tuple(int(i) for i in idx) if idx.size else None
        val = h[tuple(idx)] if idx.size else h
        raise PositivityError(f"non-positive depth h={float(val):.6g} in {what} at index {loc}",
                              where=loc)


def physical_flux(w, n, g):
    """Normal flux F(W).n of conserved state(s) ``w`` through unit normal(s) ``n``."""
    w = np.asarray(w, dtype=float)
    n = np.asarray(n, dtype=float)
    h = w[..., 0]
    check_positive(h)
    un = (w[..., 1] * n[..., 0] + w[..., 2] * n[..., 1]) / h
    p = 0.5 * g * h * h
    return np.stack([h * un, w[..., 1] * un + p * n[..., 0], w[..., 2] * un + p * n[..., 1]], axis=-1)


def rotate_to_normal(u, v, n):
    """Velocity components ``(u_eta, u_tau)`` along and across the normal."""
    n = np.asarray(n, dtype=float)
    nx, ny = n[..., 0], n[..., 1]
    return u * nx + v * ny, v * nx - u * ny


def rotate_from_normal(u_eta, u_tau, n):
    n = np.asarray(n, dtype=float)
    nx, ny = n[..., 0], n[..., 1]
    return u_eta * nx - u_tau * ny, u_tau * nx + u_eta * ny


def max_wave_speed(w, g):
    """max(|u| + sqrt(g h), |v| + sqrt(g h)) per state."""
    w = np.asarray(w, dtype=float)
    h = w[..., 0]
    check_positive(h)
    c = np.sqrt(g * h)
    return np.maximum(np.abs(w[..., 1] / h) + c, np.abs(w[..., 2] / h) + c)


EDGE_LENGTH = "edge"
CENTROID_SPACING = "centroid"


def step_lengths(mesh, kind=EDGE_LENGTH):
    """Per-edge length scale for the stability condition.

    ``edge`` is the edge length.  ``centroid`` is the distance between the two
    cell centroids across the edge (on the boundary, twice the distance from
    the centroid to the edge line).  Both agree on square cells; on triangles
    the centroid spacing follows the actual stencil width.
    """
    if kind == EDGE_LENGTH:
        return mesh.edge_lengths
    if kind != CENTROID_SPACING:
        raise ValueError(f"unknown step length {kind!r}")
    left, right = mesh.edge_cells[:, 0], mesh.edge_cells[:, 1]
    c_l = mesh.centroids[left]
    c_r = mesh.centroids[np.maximum(right, 0)]
    inner = np.linalg.norm(c_r - c_l, axis=1)
    outer = 2.0 * np.abs(np.einsum("ij,ij->i", mesh.edge_midpoints - c_l, mesh.edge_normals))
    return np.where(right >= 0, inner, outer)


def compute_time_step(mesh, field, cfl, alpha, g, t_end=None, length=EDGE_LENGTH):
    """Stable explicit step from per-edge lengths and adjacent-cell wave speeds.

    ``length`` selects the length scale (see ``step_lengths``).  When
    ``t_end`` is given the step is clipped so the run lands on it.
    """
    if not (0 < cfl <= 1):
        raise ValueError(f"cfl must lie in (0, 1], got {cfl}")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    w = field.w if isinstance(field, ConservedField) else np.asarray(field)
    speed = max_wave_speed(w, g)
    left, right = mesh.edge_cells[:, 0], mesh.edge_cells[:, 1]
    lam = np.where(right >= 0, np.maximum(speed[left], speed[np.maximum(right, 0)]), speed[left])
    if not np.all(np.isfinite(lam)):
        raise FloatingPointError("non-finite wave speed in time-step computation")
    lam_max_ratio = np.max(lam / step_lengths(mesh, length))
    if not lam_max_ratio > 0:
        raise FloatingPointError("all wave speeds vanish; time step is unbounded")
    dt = cfl / (np.sqrt(2.0 * alpha) * lam_max_ratio)
    if t_end is not None:
        t = field.time if isinstance(field, ConservedField) else 0.0
        dt = min(dt, t_end - t)
    return float(dt)


def coriolis_source(w, f_c):
    """Source (0, f_c hv, -f_c hu) for each state."""
    w = np.asarray(w, dtype=float)
    return np.stack([np.zeros_like(w[..., 0]), f_c * w[..., 2], -f_c * w[..., 1]], axis=-1)


def fv_update(mesh, field, edge_flux, f_c, dt):
    """Explicit Euler finite-volume update from per-edge normal fluxes.

    ``edge_flux`` has shape (n_edges, 3), oriented along the edge normal
    (left to right).  Each cell sums its three edges in local order, so the
    result does not depend on how the edge fluxes were produced.
    """
    weighted = edge_flux * mesh.edge_lengths[:, None]
    ce, sg = mesh.cell_edges, mesh.cell_edge_signs
    net = (sg[:, 0, None] * weighted[ce[:, 0]]
           + sg[:, 1, None] * weighted[ce[:, 1]]
           + sg[:, 2, None] * weighted[ce[:, 2]])
    w = field.w - (dt / mesh.areas)[:, None] * net + dt * coriolis_source(field.w, f_c)
    bad = ~(w[:, 0] > H_MIN) | ~np.all(np.isfinite(w), axis=1)
    if np.any(bad):
        c = int(np.nonzero(bad)[0][0])
        raise PositivityError(
            f"invalid state {w[c].tolist()} in cell {c} at t={field.time + dt:.6g}",
            where=c, time=field.time + dt)
    return ConservedField(w, field.time + dt)
