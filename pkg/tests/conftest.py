from pathlib import Path

import numpy as np
import pytest

from fvcswe.mesh import Mesh, generate_rect_mesh

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def square():
    return Mesh([[0, 0], [1, 0], [1, 1], [0, 1]], [[0, 1, 2], [0, 2, 3]])


@pytest.fixture(scope="session")
def small_mesh():
    return generate_rect_mesh((0.0, 10.0), (0.0, 8.0), 10, 8, "alternating")


@pytest.fixture(scope="session")
def skewed_mesh():
    rng = np.random.default_rng(7)
    xs = np.linspace(0.0, 1.0, 9)
    X, Y = np.meshgrid(xs, xs)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    inner = (pts > 0).all(1) & (pts < 1).all(1)
    pts[inner] += rng.uniform(-0.03, 0.03, (inner.sum(), 2))
    base = generate_rect_mesh((0, 1), (0, 1), 8, 8, "fixed")
    return Mesh(pts, base.triangles)


def uniform_field(mesh, h, u=0.0, v=0.0):
    from fvcswe.swe import ConservedField

    n = mesh.n_cells
    return ConservedField.from_primitives(np.full(n, h), np.full(n, u), np.full(n, v))
