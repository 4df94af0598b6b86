import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fvcswe.mesh import (
    Mesh, MeshError, MeshFormatError, generate_rect_mesh, generate_tensor_mesh, graded_coords,
    load_gmsh, load_mesh, load_raw,
)


def test_unit_square_counts(square):
    assert square.n_vertices == 4
    assert square.n_cells == 2
    assert square.n_edges == 5
    assert len(square.interior_edges) == 1
    assert len(square.boundary_edges) == 4


def test_single_triangle():
    m = Mesh([[0, 0], [1, 0], [0, 1]], [[0, 1, 2]])
    assert len(m.interior_edges) == 0
    assert len(m.boundary_edges) == 3
    assert m.edge(0).right_cell is None


def test_clockwise_input_is_rewound():
    m = Mesh([[0, 0], [1, 0], [0, 1]], [[0, 2, 1]])
    assert m.areas[0] == pytest.approx(0.5)
    tri = m.vertices[m.triangles[0]]
    e1, e2 = tri[1] - tri[0], tri[2] - tri[0]
    assert e1[0] * e2[1] - e1[1] * e2[0] > 0


def test_non_manifold_edge_rejected():
    verts = [[0, 0], [1, 0], [0.5, 1], [0.5, -1], [2, 0.5]]
    with pytest.raises(MeshError, match="edge"):
        Mesh(verts, [[0, 1, 2], [0, 3, 1], [0, 1, 4]])


def test_degenerate_triangle_rejected():
    with pytest.raises(MeshError):
        Mesh([[0, 0], [1, 0], [2, 0]], [[0, 1, 2]])


def test_rect_mesh_counts():
    m = generate_rect_mesh((0, 1), (0, 1), 1, 1)
    assert m.n_cells == 2
    assert m.area == pytest.approx(1.0)
    assert generate_rect_mesh((0, 100), (0, 100), 36, 36).n_cells == 2592
    for split in ("fixed", "alternating"):
        m = generate_rect_mesh((-10, 10), (-10, 10), 12, 7, split)
        assert abs(m.area - 400.0) < 1e-9


def test_rect_mesh_degenerate_range():
    with pytest.raises(MeshError):
        generate_rect_mesh((1, 1), (0, 1), 3, 3)


@pytest.mark.parametrize("split", ["fixed", "alternating"])
def test_topology_invariants(split):
    m = generate_rect_mesh((0, 3), (0, 2), 6, 5, split)
    assert m.n_edges == (3 * m.n_cells + len(m.boundary_edges)) // 2
    assert np.allclose(np.linalg.norm(m.edge_normals, axis=1), 1.0, atol=1e-12)
    assert np.all(m.areas > 0)
    # every cell references three distinct edges
    assert all(len(set(row)) == 3 for row in m.cell_edges.tolist())
    # closed-polygon identity
    s = np.einsum("ck,ckj->cj", m.cell_edge_signs * m.edge_lengths[m.cell_edges],
                  m.edge_normals[m.cell_edges])
    assert np.abs(s).max() < 1e-10
    # normals point from left toward right
    ie = m.interior_edges
    d = m.centroids[m.edge_cells[ie, 1]] - m.centroids[m.edge_cells[ie, 0]]
    assert np.all(np.einsum("ij,ij->i", d, m.edge_normals[ie]) > 0)
    # boundary normals point outward
    be = m.boundary_edges
    d = m.edge_midpoints[be] - m.centroids[m.edge_cells[be, 0]]
    assert np.all(np.einsum("ij,ij->i", d, m.edge_normals[be]) > 0)
    # cell/edge references agree in both directions
    for e in ie:
        l, r = m.edge_cells[e]
        assert e in m.cell_edges[l] and e in m.cell_edges[r]


def test_diamond_area_matches_polygon(skewed_mesh):
    m = skewed_mesh
    for e in m.interior_edges[:40]:
        d = m.diamond(e)
        poly = np.array([m.vertices[d.s_vertex], d.r_center, m.vertices[d.n_vertex], d.l_center])
        x, y = poly[:, 0], poly[:, 1]
        shoelace = 0.5 * (x @ np.roll(y, -1) - y @ np.roll(x, -1))
        assert d.area > 0
        assert abs(d.area - shoelace) < 1e-12


def test_diamond_on_boundary_edge_raises(square):
    with pytest.raises(MeshError):
        square.diamond(square.boundary_edges[0])
    with pytest.raises(MeshError):
        square.diamond_gradient(square.boundary_edges[0], 0.0, 0.0, 0.0, 0.0)


def _kite():
    # edge from (0,-1) to (0,1) with cell centroids at (-1,0) and (1,0)
    return Mesh([[0, -1], [0, 1], [-3, 0], [3, 0]], [[2, 0, 1], [0, 3, 1]])


@pytest.mark.parametrize("f, expected", [
    (lambda p: p[0], (1.0, 0.0)),
    (lambda p: p[1], (0.0, 1.0)),
    (lambda p: 3.5 + 0 * p[0], (0.0, 0.0)),
])
def test_symmetric_diamond(f, expected):
    m = _kite()
    e = int(m.interior_edges[0])
    d = m.diamond(e)
    assert np.allclose(d.l_center, [-1, 0]) and np.allclose(d.r_center, [1, 0])
    g = m.diamond_gradient(e, f(d.l_center), f(d.r_center), f(m.vertices[d.s_vertex]), f(m.vertices[d.n_vertex]))
    assert np.allclose(g, expected, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_diamond_gradient_exact_on_affine(a, b, c):
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 1, (40, 2))
    from scipy.spatial import Delaunay

    tri = Delaunay(pts)
    m = Mesh(pts, tri.simplices)
    ie = m.interior_edges
    f = lambda p: a + b * p[..., 0] + c * p[..., 1]
    s, n = m.edge_vertices[ie, 0], m.edge_vertices[ie, 1]
    g = m.diamond_gradient(ie, f(m.centroids[m.edge_cells[ie, 0]]), f(m.centroids[m.edge_cells[ie, 1]]),
                           f(m.vertices[s]), f(m.vertices[n]))
    assert np.abs(g - [b, c]).max() <= 1e-9 * max(1.0, abs(b), abs(c))


def test_locate_centroids(skewed_mesh):
    m = skewed_mesh
    found = m.locate_points(m.centroids, np.arange(m.n_cells))
    assert np.array_equal(found, np.arange(m.n_cells))
    found = m.locate_points(m.centroids)  # walk from cell 0
    assert np.array_equal(found, np.arange(m.n_cells))
    assert m.locate_point(m.centroids[5], 5) == 5


def test_locate_outside(square):
    assert square.locate_point([2.0, 0.5]) is None
    assert square.locate_point([-1e-3, 0.5], 1) is None


def test_locate_shared_edge_picks_lowest(square):
    # the diagonal (0,0)-(1,1) is shared by both cells
    for hint in (0, 1):
        assert square.locate_point([0.5, 0.5], hint) == 0
    m = generate_rect_mesh((0, 2), (0, 2), 2, 2, "fixed")
    v = m.vertices.tolist().index([1.0, 1.0])
    assert m.locate_point([1.0, 1.0], int(m.vertex_cell_ids(v).max())) == int(m.vertex_cell_ids(v).min())


def test_locate_nonconvex_falls_back():
    # L-shaped domain: the straight walk from cell 0 leaves the domain
    m = generate_tensor_mesh(np.linspace(0, 4, 9), np.linspace(0, 4, 9), "fixed",
                             keep=lambda x, y: (x < 1) | (y < 1))
    p = np.array([3.6, 0.4])
    c = m.locate_point(p, int(np.argmin(np.linalg.norm(m.centroids - [0.4, 3.6], axis=1))))
    assert c is not None
    assert m.barycentric(p[None], [c]).min() >= -1e-12


def test_vertex_values(small_mesh):
    m = small_mesh
    assert np.allclose(m.vertex_values(np.full(m.n_cells, 2.5)), 2.5)
    f = 1.0 + 0.3 * m.centroids[:, 0] - 0.7 * m.centroids[:, 1]
    vv = m.vertex_values(f)
    x, y = m.vertices[:, 0], m.vertices[:, 1]
    interior = (x > 0) & (x < 10) & (y > 0) & (y < 8)
    assert np.abs(vv[interior] - (1.0 + 0.3 * x - 0.7 * y)[interior]).max() < 1e-9
    both = m.vertex_values(np.column_stack([f, 2 * f]))
    assert np.allclose(both[:, 1], 2 * vv)


def test_vertex_equidistant_average():
    m = _kite()
    vv = m.vertex_values(np.array([0.0, 2.0]))
    assert vv[0] == pytest.approx(1.0) and vv[1] == pytest.approx(1.0)


def test_graded_coords_hits_breaks():
    xs = graded_coords([0, 95, 105, 200], 2.0)
    for b in (0, 95, 105, 200):
        assert np.any(np.isclose(xs, b, atol=0, rtol=0))
    assert np.all(np.diff(xs) > 0)


def test_load_gmsh_square(fixtures):
    m = load_gmsh(fixtures / "square.msh")
    assert (m.n_vertices, m.n_cells, m.n_edges, len(m.interior_edges)) == (4, 2, 5, 1)
    assert sorted(m.edge_tags[m.boundary_edges].tolist()) == [11, 11, 12, 12]
    assert m.summary()["boundary_tags"] == {11: 2, 12: 2}


def test_load_gmsh_skips_quads(fixtures):
    m = load_gmsh(fixtures / "mixed_quad.msh")
    assert m.n_cells == 2
    assert m.n_vertices == 4


def test_load_gmsh_rejects_v4(fixtures):
    with pytest.raises(MeshFormatError, match="version") as err:
        load_gmsh(fixtures / "version41.msh")
    assert err.value.lineno == 2


def test_load_gmsh_duplicate_nodes(fixtures):
    with pytest.raises(MeshFormatError, match="duplicate") as err:
        load_gmsh(fixtures / "duplicate_nodes.msh")
    assert err.value.lineno == 8


def test_load_gmsh_no_triangles(tmp_path):
    p = tmp_path / "empty.msh"
    p.write_text("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n1\n1 0 0 0\n$EndNodes\n"
                 "$Elements\n1\n1 15 2 0 1 1\n$EndElements\n")
    with pytest.raises(MeshFormatError, match="no triangle"):
        load_gmsh(p)


def test_load_gmsh_truncated(tmp_path):
    p = tmp_path / "cut.msh"
    p.write_text("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n3\n1 0 0 0\n")
    with pytest.raises(MeshFormatError) as err:
        load_gmsh(p)
    assert err.value.lineno >= 5


def test_load_raw(fixtures):
    a = load_raw(fixtures / "square.raw")
    b = load_mesh(fixtures / "square.msh")
    assert np.allclose(a.vertices, b.vertices)
    assert a.area == pytest.approx(1.0)
    assert load_mesh(fixtures / "square.raw").n_edges == 5


def test_load_raw_bad_header(tmp_path):
    p = tmp_path / "bad.raw"
    p.write_text("4\n")
    with pytest.raises(MeshFormatError):
        load_raw(p)


def test_mesh_arrays_are_read_only(square):
    with pytest.raises(ValueError):
        square.areas[0] = 3.0
