"""First-order Roe flux, the Riemann-solver baseline."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .swe import check_positive, fv_update, rotate_from_normal, rotate_to_normal


@dataclass(frozen=True)
class RoeConfig:
    entropy_fix_delta: float = 0.0

    def __post_init__(self):
        if not self.entropy_fix_delta >= 0:
            raise ValueError("entropy_fix_delta must be non-negative")

    @classmethod
    def for_depth(cls, g, h_ref):
        return cls(1e-6 * np.sqrt(g * h_ref))


def _abs_fixed(lam, delta):
    a = np.abs(lam)
    if delta > 0:
        a = np.where(a < delta, (lam * lam + delta * delta) / (2 * delta), a)
    return a


def roe_flux_frame(hl, ul, vl, hr, ur, vr, g, delta=0.0):
    """Roe flux of the 1D rotated system.

    ``u`` is the velocity along the normal, ``v`` the passively transported
    tangential velocity.  Returns (mass, normal momentum, tangential momentum).
    """
    sl, sr = np.sqrt(hl), np.sqrt(hr)
    ut = (sl * ul + sr * ur) / (sl + sr)
    vt = (sl * vl + sr * vr) / (sl + sr)
    ct = np.sqrt(0.5 * g * (hl + hr))
    dh = hr - hl
    dq = hr * ur - hl * ul
    dp = hr * vr - hl * vl
    a1 = ((ut + ct) * dh - dq) / (2 * ct)
    a2 = dp - vt * dh
    a3 = (dq - (ut - ct) * dh) / (2 * ct)
    l1 = _abs_fixed(ut - ct, delta) * a1
    l2 = _abs_fixed(ut, delta) * a2
    l3 = _abs_fixed(ut + ct, delta) * a3
    fl0, fr0 = hl * ul, hr * ur
    f0 = 0.5 * (fl0 + fr0) - 0.5 * (l1 + l3)
    f1 = 0.5 * (fl0 * ul + 0.5 * g * hl * hl + fr0 * ur + 0.5 * g * hr * hr) - 0.5 * (
        l1 * (ut - ct) + l3 * (ut + ct))
    f2 = 0.5 * (fl0 * vl + fr0 * vr) - 0.5 * ((l1 + l3) * vt + l2)
    return f0, f1, f2


def roe_flux(w_l, w_r, n, g, cfg=None):
    """Roe numerical flux between conserved states ``w_l`` and ``w_r`` across ``n``."""
    delta = 0.0 if cfg is None else cfg.entropy_fix_delta
    w_l = np.asarray(w_l, dtype=float)
    w_r = np.asarray(w_r, dtype=float)
    n = np.asarray(n, dtype=float)
    check_positive(w_l[..., 0], "left state")
    check_positive(w_r[..., 0], "right state")
    ul, vl = rotate_to_normal(w_l[..., 1] / w_l[..., 0], w_l[..., 2] / w_l[..., 0], n)
    ur, vr = rotate_to_normal(w_r[..., 1] / w_r[..., 0], w_r[..., 2] / w_r[..., 0], n)
    f0, fn, ft = roe_flux_frame(w_l[..., 0], ul, vl, w_r[..., 0], ur, vr, g, delta)
    fx, fy = rotate_from_normal(fn, ft, n)
    return np.stack(np.broadcast_arrays(f0, fx, fy), axis=-1)


def roe_edge_fluxes(mesh, field, params, bc, cfg=None):
    from .bc import boundary_fluxes

    flux = np.empty((mesh.n_edges, 3))
    ie = mesh.interior_edges
    left, right = mesh.edge_cells[ie, 0], mesh.edge_cells[ie, 1]
    flux[ie] = roe_flux(field.w[left], field.w[right], mesh.edge_normals[ie], params.g, cfg)
    be = mesh.boundary_edges
    flux[be] = boundary_fluxes(field.w[mesh.edge_cells[be, 0]], mesh.edge_normals[be],
                               bc.wall_mask(mesh), params.g, "roe", cfg)
    return flux


def roe_step(mesh, field, params, bc, dt, cfg=None):
    """One explicit step of the finite-volume scheme with Roe fluxes."""
    return fv_update(mesh, field, roe_edge_fluxes(mesh, field, params, bc, cfg), params.f_c, dt)
