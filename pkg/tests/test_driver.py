import csv
import math

import numpy as np
import pytest

from fvcswe.driver import (
    Diagnostics, RunConfig, build_mesh, convergence_study, exact_sampler, fitted_order, froude_field,
    init_case, l1_relative_error, mirror_asymmetry, mirror_map, observed_orders, partial_dam_mesh, run,
)
from fvcswe.mesh import generate_rect_mesh
from fvcswe.swe import ConservedField, PhysParams
from conftest import uniform_field


def test_config_defaults():
    c = RunConfig("accuracy_dam")
    assert (c.cfl, c.alpha, c.g, c.f_c, c.scheme) == (0.8, 1.2, 9.81, 0.0, "fvc")
    assert c.t_end == 5.5 and c.boundary == "wall"
    assert RunConfig("circular_dam").boundary == "transmissive"
    assert RunConfig("partial_dam").output_times == (2.2, 6.2, 8.2)


@pytest.mark.parametrize("bad", [dict(cfl=0.0), dict(cfl=1.1), dict(alpha=-1.0), dict(t_end=0.0),
                                 dict(scheme="hll"), dict(boundary="slip"), dict(case="nope")])
def test_config_invalid(bad):
    kw = dict(case="accuracy_dam")
    kw.update(bad)
    with pytest.raises(ValueError):
        RunConfig(**kw)


def test_from_file_needs_mesh():
    with pytest.raises(ValueError, match="mesh"):
        RunConfig("from_file")


def test_circular_dam_initial_depth():
    m = generate_rect_mesh((-10, 10), (-10, 10), 20, 20, "alternating")
    f = init_case("circular_dam", m, PhysParams(1.0, 1.0))
    near = np.argmin(np.linalg.norm(m.centroids, axis=1))
    r = m.centroids[near]
    expect = 1 + 0.25 * (1 - math.tanh((math.sqrt(2.5 * r[0] ** 2 + 0.4 * r[1] ** 2) - 1) / 0.1))
    assert f.h[near] == pytest.approx(expect, abs=1e-12)
    assert 1 + 0.25 * (1 - math.tanh(-10)) == pytest.approx(1.5, abs=1e-8)
    far = np.argmax(np.linalg.norm(m.centroids, axis=1))
    assert f.h[far] == pytest.approx(1.0, abs=1e-12)
    assert np.all(f.w[:, 1:] == 0)


def test_circular_dam_origin_value():
    from fvcswe.driver import circular_dam_depth

    assert circular_dam_depth(0.0, 0.0) == pytest.approx(1.5, abs=1e-8)


def test_accuracy_dam_two_levels():
    m = build_mesh(RunConfig("accuracy_dam", resolution=10))
    f = init_case("accuracy_dam", m)
    assert sorted(set(f.h.tolist())) == [2.0, 4.0]


def test_init_domain_mismatch():
    m = generate_rect_mesh((0, 1), (0, 1), 2, 2)
    with pytest.raises(ValueError):
        init_case("accuracy_dam", m)
    with pytest.raises(ValueError):
        init_case("circular_dam", m)
    with pytest.raises(ValueError):
        init_case("partial_dam", m)


def test_partial_dam_mesh_geometry():
    m = partial_dam_mesh(5.0)
    c = m.centroids
    in_dam = (c[:, 0] > 95) & (c[:, 0] < 105)
    assert np.all((c[in_dam, 1] > 95) & (c[in_dam, 1] < 170))
    assert m.area == pytest.approx(200 * 200 - 10 * (200 - 75))
    f = init_case("partial_dam", m)
    assert np.all(f.h[c[:, 0] < 100] == 4.0) and np.all(f.h[c[:, 0] > 100] == 2.0)


def test_froude():
    m = generate_rect_mesh((0, 1), (0, 1), 2, 2)
    assert np.all(froude_field(uniform_field(m, 1.0), PhysParams()) == 0)
    f = uniform_field(m, 1.0, math.sqrt(9.81))
    assert np.allclose(froude_field(f, PhysParams()), 1.0)
    speeds = [froude_field(uniform_field(m, 2.0, s, 0.5 * s), PhysParams())[0] for s in (0.1, 0.5, 1.0, 3.0)]
    assert np.all(np.diff(speeds) > 0)


def test_l1_error():
    m = generate_rect_mesh((0, 3), (0, 2), 3, 2)
    f = uniform_field(m, 2.2)
    assert l1_relative_error(m, f, lambda x, y, t: np.full_like(x, 2.0), 0.0) == pytest.approx(0.1)
    assert l1_relative_error(m, uniform_field(m, 2.0), lambda x, y, t: np.full_like(x, 2.0), 0.0) == 0.0
    with pytest.raises(ZeroDivisionError):
        l1_relative_error(m, f, lambda x, y, t: np.zeros_like(x), 0.0)


def test_orders():
    cells = [100, 400, 1600]
    errors = [0.4, 0.2, 0.1]
    assert observed_orders(cells, errors) == [None, pytest.approx(1.0), pytest.approx(1.0)]
    assert fitted_order(cells, errors) == pytest.approx(1.0)


def test_convergence_zero_time():
    c = RunConfig("accuracy_dam", max_steps=0)
    rows = convergence_study(c, [6, 8])
    assert len(rows) == 2
    assert all(r[1] == 0.0 and r[2] is None for r in rows)


def test_convergence_needs_two_meshes():
    with pytest.raises(ValueError):
        convergence_study(RunConfig("accuracy_dam"), [10])


@pytest.mark.parametrize("scheme", ["fvc", "roe"])
def test_run_lake_at_rest(scheme):
    c = RunConfig("accuracy_dam", scheme=scheme, h_left=1.5, h_right=1.5, f_c=0.5, resolution=8,
                  t_end=1e9, max_steps=100)
    m = build_mesh(c)
    f, d = run(c, mesh=m)
    assert len(d) == 101
    assert np.abs(f.w - init_case("accuracy_dam", m, config=c).w).max() < 1e-12


def test_run_hits_end_and_outputs(tmp_path):
    c = RunConfig("accuracy_dam", resolution=8, t_end=0.7, output_every=0.25, output_dir=str(tmp_path))
    f, d = run(c)
    assert f.time == 0.7
    for t in (0.25, 0.5, 0.7):
        assert t in d.time
    frames = sorted(p.name for p in tmp_path.glob("*.vtk"))
    assert frames == ["frame_0000.vtk", "frame_0001.vtk", "frame_0002.vtk", "frame_0003.vtk"]
    rows = list(csv.DictReader(open(tmp_path / "diagnostics.csv")))
    assert len(rows) == len(d)
    assert float(rows[-1]["time"]) == 0.7
    masses = np.array(d.mass)
    assert np.abs(masses - masses[0]).max() / masses[0] < 1e-11


def test_run_is_deterministic():
    c = RunConfig("circular_dam", resolution=12, g=1.0, f_c=1.0, t_end=0.5)
    a, da = run(c)
    b, db = run(c)
    assert np.array_equal(a.w, b.w)
    assert da.mass == db.mass and da.max_froude == db.max_froude


def test_run_reports_positivity():
    c = RunConfig("accuracy_dam", resolution=6, h_left=4.0, h_right=1e-9, cfl=1.0, dt_length="edge",
                  interpolation="barycentric", t_end=5.0)
    with pytest.raises(FloatingPointError) as err:
        run(c)
    assert "t=" in str(err.value) or getattr(err.value, "time", None) is not None


def test_mirror_helpers():
    m = generate_rect_mesh((-2, 2), (-1, 1), 4, 2, "alternating")
    mp = mirror_map(m)
    assert np.array_equal(mp[mp], np.arange(m.n_cells))
    f = ConservedField.from_primitives(1 + m.centroids[:, 0] ** 2, m.centroids[:, 0], 0.3)
    assert mirror_asymmetry(f, mp) < 1e-15
    with pytest.raises(ValueError):
        mirror_map(generate_rect_mesh((0, 2), (-1, 1), 3, 2, "fixed"))


def test_diagnostics_record():
    m = generate_rect_mesh((0, 2), (0, 1), 2, 1)
    d = Diagnostics()
    d.record(m, uniform_field(m, 2.0, 1.0, -1.0), PhysParams(), 0.1)
    assert d.mass == [pytest.approx(4.0)]
    assert d.momentum_x == [pytest.approx(4.0)] and d.momentum_y == [pytest.approx(-4.0)]
    assert d.min_h == d.max_h == [2.0]
    assert d.dt == [0.1]
