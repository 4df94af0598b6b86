"""Unstructured triangular meshes.

A :class:`Mesh` stores everything in flat numpy arrays (structure of arrays).
Local edge ``k`` of a cell is the edge opposite its local vertex ``k``, so
``cell_neighbors[c, k]`` is the cell reached by crossing that edge.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

BARY_TOL = 1e-12
DEGENERATE_DIAMOND = 1e-14


class MeshError(ValueError):
    """Invalid mesh topology or geometry."""


class MeshFormatError(ValueError):
    """Malformed mesh file; the message carries the file line number."""

    def __init__(self, path, lineno, msg):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {msg}")


class Vertex(NamedTuple):
    id: int
    position: np.ndarray


class Cell(NamedTuple):
    id: int
    vertex_ids: tuple
    centroid: np.ndarray
    area: float


class Edge(NamedTuple):
    id: int
    vertex_ids: tuple  # (S, N)
    left_cell: int
    right_cell: Optional[int]
    midpoint: np.ndarray
    length: float
    normal: np.ndarray


class DiamondCell(NamedTuple):
    edge_id: int
    s_vertex: int
    n_vertex: int
    l_center: np.ndarray
    r_center: np.ndarray
    lr_length: float
    lr_normal: np.ndarray
    area: float


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


class Mesh:
    """Immutable triangle mesh with edge, cell and vertex connectivity.

    Built from raw vertices and triangles; winding is corrected to
    counter-clockwise.  Edges are numbered by their sorted vertex pair.  The
    left cell of an edge is the lower-indexed adjacent cell and the edge
    normal points from left to right (outward on the boundary).

    Parameters
    ----------
    vertices : array_like, shape (n_vertices, 2)
    triangles : array_like of int, shape (n_cells, 3)
    edge_tags : dict, optional
        Maps a vertex pair ``(a, b)`` (any order) to an integer boundary tag.
    """

    def __init__(self, vertices, triangles, edge_tags=None):
        pts = np.asarray(vertices, dtype=float)
        tris = np.array(triangles, dtype=np.int64, copy=True)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise MeshError(f"vertices must have shape (n, 2), got {pts.shape}")
        if tris.ndim != 2 or tris.shape[1] != 3 or len(tris) == 0:
            raise MeshError(f"triangles must have shape (m>0, 3), got {tris.shape}")
        if not np.all(np.isfinite(pts)):
            raise MeshError("vertex coordinates must be finite")
        nv = len(pts)
        if tris.min() < 0 or tris.max() >= nv:
            raise MeshError("triangle references a vertex index out of range")
        if np.any(tris[:, 0] == tris[:, 1]) or np.any(tris[:, 1] == tris[:, 2]) or np.any(
            tris[:, 0] == tris[:, 2]
        ):
            raise MeshError("triangle with repeated vertex")
        used = np.zeros(nv, dtype=bool)
        used[tris.ravel()] = True
        if not used.all():
            raise MeshError(f"vertex {int(np.argmin(used))} belongs to no triangle")

        signed = 0.5 * _cross(pts[tris[:, 1]] - pts[tris[:, 0]], pts[tris[:, 2]] - pts[tris[:, 0]])
        bad = np.nonzero(signed == 0.0)[0]
        if bad.size:
            raise MeshError(f"cell {int(bad[0])} has zero area")
        flip = signed < 0
        tris[flip, 1], tris[flip, 2] = tris[flip, 2].copy(), tris[flip, 1].copy()
        nc = len(tris)

        # half-edges in cell-major order; local edge k is opposite vertex k
        ha = tris[:, [1, 2, 0]].ravel()
        hb = tris[:, [2, 0, 1]].ravel()
        keys = np.minimum(ha, hb) * nv + np.maximum(ha, hb)
        _, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
        inverse = inverse.ravel()
        if np.any(counts > 2):
            e = int(np.nonzero(counts > 2)[0][0])
            h = int(np.nonzero(inverse == e)[0][0])
            raise MeshError(
                f"non-manifold edge ({int(min(ha[h], hb[h]))}, {int(max(ha[h], hb[h]))}) "
                f"shared by {int(counts[e])} triangles"
            )
        order = np.argsort(inverse, kind="stable")
        starts = np.cumsum(counts) - counts
        left_half = order[starts]
        interior = counts == 2
        right_half = np.full(len(counts), -1, dtype=np.int64)
        right_half[interior] = order[starts[interior] + 1]

        left = left_half // 3
        right = np.where(interior, right_half // 3, -1)
        s_v = ha[left_half]
        n_v = hb[left_half]
        d = pts[n_v] - pts[s_v]
        length = np.hypot(d[:, 0], d[:, 1])
        normal = np.column_stack([d[:, 1], -d[:, 0]]) / length[:, None]

        cell_edges = inverse.reshape(nc, 3)
        owner = np.repeat(np.arange(nc), 3).reshape(nc, 3)
        is_left = left[cell_edges] == owner
        cell_sign = np.where(is_left, 1.0, -1.0)
        cell_nb = np.where(is_left, right[cell_edges], left[cell_edges])

        centroids = pts[tris].mean(axis=1)

        # diamonds on interior edges
        iedges = np.nonzero(interior)[0]
        lc = centroids[left[iedges]]
        rc = centroids[right[iedges]]
        lr = rc - lc
        lr_len = np.hypot(lr[:, 0], lr[:, 1])
        lr_normal = np.column_stack([lr[:, 1], -lr[:, 0]]) / lr_len[:, None]
        mu = 0.5 * _cross(lr, pts[n_v[iedges]] - pts[s_v[iedges]])
        thin = mu <= DEGENERATE_DIAMOND * length[iedges] ** 2
        if np.any(thin):
            e = int(iedges[np.nonzero(thin)[0][0]])
            raise MeshError(f"degenerate diamond cell on edge {e} (area {mu[thin][0]:.3e})")
        diamond_index = np.full(len(counts), -1, dtype=np.int64)
        diamond_index[iedges] = np.arange(len(iedges))

        # vertex -> cell adjacency (CSR) and inverse-distance weights
        vc_vertex = tris.ravel()
        vc_cell = np.repeat(np.arange(nc), 3)
        perm = np.argsort(vc_vertex, kind="stable")
        vc_vertex = vc_vertex[perm]
        vc_cell = vc_cell[perm]
        vptr = np.zeros(nv + 1, dtype=np.int64)
        vptr[1:] = np.cumsum(np.bincount(vc_vertex, minlength=nv))
        dist = np.linalg.norm(pts[vc_vertex] - centroids[vc_cell], axis=1)
        w = 1.0 / np.maximum(dist, 1e-12)
        w /= np.bincount(vc_vertex, weights=w, minlength=nv)[vc_vertex]

        tags = np.zeros(len(counts), dtype=np.int64)
        if edge_tags:
            lookup = {}
            for e, (a, b) in enumerate(zip(np.minimum(s_v, n_v), np.maximum(s_v, n_v))):
                lookup[(int(a), int(b))] = e
            for (a, b), tag in edge_tags.items():
                e = lookup.get((min(a, b), max(a, b)))
                if e is not None:
                    tags[e] = tag

        self.vertices = _frozen(pts)
        self.triangles = _frozen(tris)
        self.areas = _frozen(np.abs(signed))
        self.centroids = _frozen(centroids)
        self.edge_vertices = _frozen(np.column_stack([s_v, n_v]))
        self.edge_cells = _frozen(np.column_stack([left, right]))
        self.edge_lengths = _frozen(length)
        self.edge_normals = _frozen(normal)
        self.edge_midpoints = _frozen(0.5 * (pts[s_v] + pts[n_v]))
        self.edge_tags = _frozen(tags)
        self.cell_edges = _frozen(cell_edges)
        self.cell_edge_signs = _frozen(cell_sign)
        self.cell_neighbors = _frozen(cell_nb)
        self.interior_edges = _frozen(iedges)
        self.boundary_edges = _frozen(np.nonzero(~interior)[0])
        self.diamond_index = _frozen(diamond_index)
        self.diamond_lr_length = _frozen(lr_len)
        self.diamond_lr_normal = _frozen(lr_normal)
        self.diamond_area = _frozen(mu)
        self.vertex_cell_ptr = _frozen(vptr)
        self.vertex_cells = _frozen(vc_cell)
        self._idw_vertex = _frozen(vc_vertex)
        self._idw_weight = _frozen(w)

    # -- sizes -------------------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_cells(self) -> int:
        return len(self.triangles)

    @property
    def n_edges(self) -> int:
        return len(self.edge_lengths)

    @property
    def area(self) -> float:
        return float(self.areas.sum())

    def bounding_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    # -- record views --------------------------------------------------------
    def vertex(self, i) -> Vertex:
        return Vertex(int(i), self.vertices[i])

    def cell(self, i) -> Cell:
        return Cell(int(i), tuple(int(v) for v in self.triangles[i]), self.centroids[i],
                    float(self.areas[i]))

    def edge(self, i) -> Edge:
        r = int(self.edge_cells[i, 1])
        return Edge(int(i), tuple(int(v) for v in self.edge_vertices[i]), int(self.edge_cells[i, 0]),
                    None if r < 0 else r, self.edge_midpoints[i], float(self.edge_lengths[i]),
                    self.edge_normals[i])

    def diamond(self, edge) -> DiamondCell:
        k = int(self.diamond_index[edge])
        if k < 0:
            raise MeshError(f"edge {edge} is a boundary edge and has no diamond cell")
        left, right = self.edge_cells[edge]
        s, n = self.edge_vertices[edge]
        return DiamondCell(int(edge), int(s), int(n), self.centroids[left], self.centroids[right],
                           float(self.diamond_lr_length[k]), self.diamond_lr_normal[k],
                           float(self.diamond_area[k]))

    def vertex_cell_ids(self, v):
        return self.vertex_cells[self.vertex_cell_ptr[v]:self.vertex_cell_ptr[v + 1]]

    # -- point location ------------------------------------------------------
    def barycentric(self, points, cells):
        """Barycentric coordinates of ``points`` (n, 2) in ``cells`` (n,)."""
        p = np.asarray(points, dtype=float)
        tri = self.vertices[self.triangles[cells]]
        den = 2.0 * self.areas[cells]
        l0 = _cross(tri[:, 1] - p, tri[:, 2] - p) / den
        l1 = _cross(tri[:, 2] - p, tri[:, 0] - p) / den
        l2 = _cross(tri[:, 0] - p, tri[:, 1] - p) / den
        return np.column_stack([l0, l1, l2])

    def _scan(self, p):
        tri = self.vertices[self.triangles]
        den = 2.0 * self.areas
        lam = np.column_stack([
            _cross(tri[:, 1] - p, tri[:, 2] - p),
            _cross(tri[:, 2] - p, tri[:, 0] - p),
            _cross(tri[:, 0] - p, tri[:, 1] - p),
        ]) / den[:, None]
        hit = np.nonzero(lam.min(axis=1) >= -BARY_TOL)[0]
        return int(hit[0]) if hit.size else -1

    def locate_points(self, points, hints=None):
        """Vectorised straight walk; returns cell ids, -1 for points outside.

        Points on a shared edge or vertex resolve to the lowest-indexed cell
        containing them.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        n = len(pts)
        cur = np.zeros(n, dtype=np.int64) if hints is None else np.array(
            np.broadcast_to(hints, (n,)), dtype=np.int64)
        result = np.full(n, -1, dtype=np.int64)
        active = np.arange(n)
        rescan = []
        for _ in range(self.n_cells):
            if not active.size:
                break
            c = cur[active]
            lam = self.barycentric(pts[active], c)
            k = np.argmin(lam, axis=1)
            inside = lam[np.arange(len(active)), k] >= -BARY_TOL
            result[active[inside]] = c[inside]
            nxt = self.cell_neighbors[c, k]
            move = ~inside & (nxt >= 0)
            rescan.append(active[~inside & (nxt < 0)])
            cur[active[move]] = nxt[move]
            active = active[move]
        rescan.append(active)
        for i in np.concatenate(rescan):
            result[i] = self._scan(pts[i])

        found = np.nonzero(result >= 0)[0]
        if found.size:
            lam = self.barycentric(pts[found], result[found])
            small = np.abs(lam) <= BARY_TOL
            nsmall = small.sum(axis=1)
            on_edge = np.nonzero(nsmall == 1)[0]
            if on_edge.size:
                k = np.argmax(small[on_edge], axis=1)
                c = result[found[on_edge]]
                nb = self.cell_neighbors[c, k]
                result[found[on_edge]] = np.where((nb >= 0) & (nb < c), nb, c)
            for j in np.nonzero(nsmall >= 2)[0]:
                i = found[j]
                c = result[i]
                v = self.triangles[c, np.argmax(~small[j])]
                cand = np.sort(self.vertex_cell_ids(v))
                lam_c = self.barycentric(np.repeat(pts[i][None], len(cand), 0), cand)
                ok = cand[lam_c.min(axis=1) >= -BARY_TOL]
                result[i] = min(int(ok[0]), int(c)) if ok.size else c
        return result

    def locate_point(self, p, hint=None):
        """Cell containing ``p``, or None when ``p`` lies outside the domain."""
        c = int(self.locate_points(np.asarray(p, dtype=float)[None], hint)[0])
        return None if c < 0 else c

    def nearest_boundary_point(self, points):
        """Closest point on the boundary and the boundary edge it lies on."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        be = self.boundary_edges
        a = self.vertices[self.edge_vertices[be, 0]]
        b = self.vertices[self.edge_vertices[be, 1]]
        ab = b - a
        t = np.einsum("pej,ej->pe", pts[:, None, :] - a[None], ab) / np.einsum("ej,ej->e", ab, ab)
        t = np.clip(t, 0.0, 1.0)
        q = a[None] + t[..., None] * ab[None]
        d2 = np.sum((q - pts[:, None, :]) ** 2, axis=2)
        j = np.argmin(d2, axis=1)
        rows = np.arange(len(pts))
        return q[rows, j], be[j]

    # -- reconstruction helpers ---------------------------------------------
    def vertex_values(self, cell_values):
        """Inverse-distance weighted average of cell values at each vertex.

        ``cell_values`` may carry trailing dimensions, e.g. shape (n_cells, 3).
        The average is accumulated as offsets from one adjacent cell value,
        so a uniform field is reproduced exactly.
        """
        vals = np.asarray(cell_values, dtype=float)
        if vals.shape[0] != self.n_cells:
            raise ValueError(f"expected {self.n_cells} cell values, got {vals.shape[0]}")
        base = vals[self.vertex_cells[self.vertex_cell_ptr[:-1]]]
        diff = vals[self.vertex_cells] - base[self._idw_vertex]
        contrib = self._idw_weight.reshape((-1,) + (1,) * (vals.ndim - 1)) * diff
        flat = contrib.reshape(len(contrib), -1)
        out = np.column_stack([
            np.bincount(self._idw_vertex, weights=flat[:, j], minlength=self.n_vertices)
            for j in range(flat.shape[1])
        ])
        return base + out.reshape((self.n_vertices,) + vals.shape[1:])

    def diamond_gradient(self, edge, u_l, u_r, u_s, u_n):
        """Interface gradient of a scalar on the diamond cell of interior ``edge``.

        Exact for affine fields.  Scalar or array ``edge`` (with matching value
        arrays) are both accepted.
        """
        k = self.diamond_index[edge]
        if np.any(k < 0):
            raise MeshError(f"diamond gradient requested on boundary edge(s) {np.asarray(edge)[k < 0]}")
        return diamond_gradient_raw(
            np.asarray(u_l), np.asarray(u_r), np.asarray(u_s), np.asarray(u_n),
            self.diamond_lr_normal[k], self.diamond_lr_length[k],
            self.edge_normals[edge], self.edge_lengths[edge], self.diamond_area[k],
        )

    def summary(self):
        """Counts and simple quality figures, as printed by ``mesh-info``."""
        tri = self.vertices[self.triangles]
        sides = np.stack([np.linalg.norm(tri[:, (i + 1) % 3] - tri[:, (i + 2) % 3], axis=1)
                          for i in range(3)], axis=1)
        s = sides.sum(axis=1) / 2
        inradius = self.areas / s
        circumradius = sides.prod(axis=1) / (4 * self.areas)
        tags, tag_counts = np.unique(self.edge_tags[self.boundary_edges], return_counts=True)
        lo, hi = self.bounding_box()
        return {
            "vertices": self.n_vertices,
            "cells": self.n_cells,
            "edges": self.n_edges,
            "interior_edges": len(self.interior_edges),
            "boundary_edges": len(self.boundary_edges),
            "area": self.area,
            "bbox": (lo.tolist(), hi.tolist()),
            "min_cell_area": float(self.areas.min()),
            "max_cell_area": float(self.areas.max()),
            "min_edge_length": float(self.edge_lengths.min()),
            "max_radius_ratio": float((circumradius / inradius).max() / 2.0),
            "boundary_tags": {int(t): int(c) for t, c in zip(tags, tag_counts)},
        }


def diamond_gradient_raw(u_l, u_r, u_s, u_n, lr_normal, lr_length, normal, length, area):
    """Diamond-cell gradient from explicit geometry (arrays broadcast)."""
    a = ((u_s - u_n) * lr_length)[..., None] * lr_normal
    b = ((u_r - u_l) * length)[..., None] * normal
    return (a + b) / (2.0 * np.asarray(area))[..., None]


def build_connectivity(vertices, triangles, edge_tags=None) -> Mesh:
    return Mesh(vertices, triangles, edge_tags)


# -- generators --------------------------------------------------------------

def generate_tensor_mesh(xs, ys, split="fixed", keep=None) -> Mesh:
    """Triangulate the tensor grid ``xs`` x ``ys``; each quad becomes two triangles.

    ``split='alternating'`` flips the diagonal in a checkerboard pattern,
    which is mirror symmetric about both mid-lines when the quad counts are
    even.  ``keep(cx, cy)`` may return a boolean mask to drop cells by
    centroid; vertices left unused are removed.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 2 or len(ys) < 2 or np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
        raise MeshError("grid coordinates must be strictly increasing with at least two entries")
    if split not in ("fixed", "alternating"):
        raise ValueError(f"unknown split pattern {split!r}")
    nx, ny = len(xs) - 1, len(ys) - 1
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    verts = np.column_stack([X.ravel(), Y.ravel()])
    j, i = np.meshgrid(np.arange(ny), np.arange(nx), indexing="ij")
    i = i.ravel()
    j = j.ravel()
    v00 = j * (nx + 1) + i
    v10 = v00 + 1
    v01 = v00 + nx + 1
    v11 = v01 + 1
    if split == "fixed":
        flip = np.zeros(len(i), dtype=bool)
    else:
        flip = (i + j) % 2 == 1
    t1 = np.where(flip[:, None], np.column_stack([v00, v10, v01]), np.column_stack([v00, v10, v11]))
    t2 = np.where(flip[:, None], np.column_stack([v10, v11, v01]), np.column_stack([v00, v11, v01]))
    tris = np.stack([t1, t2], axis=1).reshape(-1, 3)
    if keep is not None:
        c = verts[tris].mean(axis=1)
        tris = tris[np.asarray(keep(c[:, 0], c[:, 1]), dtype=bool)]
        if len(tris) == 0:
            raise MeshError("cell filter removed every cell")
        used = np.unique(tris)
        remap = np.full(len(verts), -1, dtype=np.int64)
        remap[used] = np.arange(len(used))
        verts = verts[used]
        tris = remap[tris]
    return Mesh(verts, tris)


def generate_rect_mesh(x_range, y_range, nx, ny, split="fixed") -> Mesh:
    """Structured triangulation of a rectangle with ``2 * nx * ny`` cells."""
    (x0, x1), (y0, y1) = x_range, y_range
    if not (x1 > x0 and y1 > y0):
        raise MeshError(f"degenerate range {x_range} x {y_range}")
    if nx < 1 or ny < 1:
        raise MeshError("nx and ny must be at least 1")
    return generate_tensor_mesh(np.linspace(x0, x1, nx + 1), np.linspace(y0, y1, ny + 1), split)


def graded_coords(breaks: Sequence[float], spacing: float):
    """Coordinates through every breakpoint with segments near ``spacing`` apart."""
    out = [float(breaks[0])]
    for a, b in zip(breaks[:-1], breaks[1:]):
        n = max(1, int(round((b - a) / spacing)))
        out.extend(np.linspace(a, b, n + 1)[1:].tolist())
    return np.array(out)


# -- readers -----------------------------------------------------------------

def load_gmsh(path) -> Mesh:
    """Read an ASCII Gmsh MSH 2.2 file.

    Only 3-node triangles (element type 2) become cells.  2-node lines
    (type 1) carrying a physical tag label boundary edges.  Node ids are
    remapped to dense 0-based indices over the nodes the triangles use.
    """
    with open(path) as fh:
        lines = fh.read().splitlines()

    def fail(i, msg):
        raise MeshFormatError(path, i + 1, msg)

    def next_content(i):
        while i < len(lines) and not lines[i].strip():
            i += 1
        return i

    def count_line(i):
        i = next_content(i)
        if i >= len(lines):
            fail(i - 1, "unexpected end of file")
        try:
            return i, int(lines[i].split()[0])
        except (ValueError, IndexError):
            fail(i, f"expected an entry count, got {lines[i]!r}")

    def close_section(i, name):
        i = next_content(i)
        if i >= len(lines) or lines[i].strip() != "$End" + name:
            fail(min(i, len(lines) - 1), f"expected $End{name}")
        return i + 1

    nodes = {}
    node_line = {}
    tris = []
    tagged_lines = {}
    seen_format = False
    i = 0
    while True:
        i = next_content(i)
        if i >= len(lines):
            break
        head = lines[i].strip()
        if head == "$MeshFormat":
            i = next_content(i + 1)
            parts = lines[i].split() if i < len(lines) else []
            if len(parts) < 2:
                fail(i, "malformed $MeshFormat line")
            version = parts[0]
            if not version.startswith("2"):
                fail(i, f"unsupported MSH version {version} (need 2.2)")
            if parts[1] != "0":
                fail(i, "binary MSH files are not supported")
            seen_format = True
            i = close_section(i + 1, "MeshFormat")
        elif head == "$Nodes":
            if not seen_format:
                fail(i, "$Nodes before $MeshFormat")
            i, n = count_line(i + 1)
            for _ in range(n):
                i += 1
                if i >= len(lines):
                    fail(i - 1, "unexpected end of file in $Nodes")
                parts = lines[i].split()
                try:
                    nid = int(parts[0])
                    xy = (float(parts[1]), float(parts[2]))
                except (ValueError, IndexError):
                    fail(i, f"malformed node line {lines[i]!r}")
                if nid in nodes:
                    fail(i, f"duplicate node id {nid} (first defined on line {node_line[nid] + 1})")
                nodes[nid] = xy
                node_line[nid] = i
            i = close_section(i + 1, "Nodes")
        elif head == "$Elements":
            i, n = count_line(i + 1)
            for _ in range(n):
                i += 1
                if i >= len(lines):
                    fail(i - 1, "unexpected end of file in $Elements")
                try:
                    parts = [int(t) for t in lines[i].split()]
                    etype, ntags = parts[1], parts[2]
                    tags = parts[3:3 + ntags]
                    conn = parts[3 + ntags:]
                except (ValueError, IndexError):
                    fail(i, f"malformed element line {lines[i]!r}")
                if etype == 2:
                    if len(conn) != 3:
                        fail(i, "triangle element needs 3 nodes")
                    for v in conn:
                        if v not in nodes:
                            fail(i, f"element references unknown node {v}")
                    tris.append((conn, i))
                elif etype == 1 and tags and len(conn) == 2:
                    tagged_lines[tuple(conn)] = tags[0]
            i = close_section(i + 1, "Elements")
        elif head.startswith("$"):
            end = "$End" + head[1:]
            while i < len(lines) and lines[i].strip() != end:
                i += 1
            if i >= len(lines):
                fail(i - 1, f"missing {end}")
            i += 1
        else:
            fail(i, f"unexpected content {lines[i]!r}")

    if not seen_format:
        fail(0, "missing $MeshFormat section")
    if not tris:
        fail(len(lines) - 1, "no triangle elements found")
    used = sorted({v for conn, _ in tris for v in conn})
    index = {nid: k for k, nid in enumerate(used)}
    verts = np.array([nodes[nid] for nid in used])
    tri_arr = np.array([[index[v] for v in conn] for conn, _ in tris])
    edge_tags = {(index[a], index[b]): t for (a, b), t in tagged_lines.items()
                 if a in index and b in index}
    try:
        return Mesh(verts, tri_arr, edge_tags)
    except MeshError as exc:
        raise MeshFormatError(path, tris[0][1] + 1, str(exc)) from exc


def load_raw(path) -> Mesh:
    """Read the plain-text fixture format.

    First line: ``n_vertices n_triangles``; then one ``x y`` line per vertex
    and one ``a b c`` line (0-based) per triangle.  ``#`` starts a comment.
    """
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if line:
                rows.append((lineno, line.split()))
    if not rows:
        raise MeshFormatError(path, 1, "empty mesh file")
    try:
        nv, nt = int(rows[0][1][0]), int(rows[0][1][1])
    except (ValueError, IndexError):
        raise MeshFormatError(path, rows[0][0], "header must be '<n_vertices> <n_triangles>'")
    if len(rows) != 1 + nv + nt:
        raise MeshFormatError(path, rows[-1][0], f"expected {nv + nt} data lines, found {len(rows) - 1}")
    try:
        verts = [[float(t) for t in r[1][:2]] for r in rows[1:1 + nv]]
        tris = [[int(t) for t in r[1][:3]] for r in rows[1 + nv:]]
    except ValueError as exc:
        raise MeshFormatError(path, rows[0][0], str(exc))
    return Mesh(verts, tris)


def load_mesh(path) -> Mesh:
    path = str(path)
    if path.endswith(".msh"):
        return load_gmsh(path)
    return load_raw(path)
