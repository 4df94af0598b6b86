"""Minimal legacy ASCII VTK reader used to check the writer's output."""
import numpy as np


def read_vtk(path):
    tokens = open(path).read().split("\n")
    assert tokens[0] == "# vtk DataFile Version 3.0"
    assert tokens[2] == "ASCII"
    assert tokens[3] == "DATASET UNSTRUCTURED_GRID"
    out = {"cell_data": {}}
    i = 4
    while i < len(tokens):
        line = tokens[i].split()
        i += 1
        if not line:
            continue
        key = line[0]
        if key == "POINTS":
            n = int(line[1])
            out["points"] = np.array([[float(t) for t in tokens[i + k].split()] for k in range(n)])
            i += n
        elif key == "CELLS":
            n, size = int(line[1]), int(line[2])
            rows = [[int(t) for t in tokens[i + k].split()] for k in range(n)]
            assert sum(len(r) for r in rows) == size
            out["cells"] = np.array([r[1:] for r in rows])
            i += n
        elif key == "CELL_TYPES":
            n = int(line[1])
            out["cell_types"] = [int(tokens[i + k]) for k in range(n)]
            i += n
        elif key == "CELL_DATA":
            out["n_cell_data"] = int(line[1])
        elif key == "SCALARS":
            assert tokens[i].strip() == "LOOKUP_TABLE default"
            n = out["n_cell_data"]
            out["cell_data"][line[1]] = np.array([float(tokens[i + 1 + k]) for k in range(n)])
            i += 1 + n
        elif key == "VECTORS":
            n = out["n_cell_data"]
            out["cell_data"][line[1]] = np.array([[float(t) for t in tokens[i + k].split()] for k in range(n)])
            i += n
        else:
            raise ValueError(f"unexpected VTK line {tokens[i - 1]!r}")
    return out
