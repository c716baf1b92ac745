"""File writers: profile tables, sweep CSV, legacy VTK structured points."""

from __future__ import annotations

import csv
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

FLOAT_FMT = "%.17g"


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return FLOAT_FMT % float(x)
    if isinstance(x, (tuple, list)):
        return ";".join(fmt(v) for v in x)
    return str(x)


def write_profile_table(fh: TextIO, eta: np.ndarray, s: np.ndarray, header: Sequence[str] = ()) -> None:
    """Plain-text table ``eta s`` with '#' comment header lines.

    A 2-D ``s`` of shape (N, len(eta)) gives the columns ``eta s_1 ... s_N``.
    """
    s = np.atleast_2d(np.asarray(s, dtype=float))
    for line in header:
        fh.write(f"# {line}\n")
    names = ["s"] if s.shape[0] == 1 else [f"s_{i + 1}" for i in range(s.shape[0])]
    fh.write("# eta " + " ".join(names) + "\n")
    for k, e in enumerate(eta):
        fh.write(" ".join(FLOAT_FMT % v for v in (e, *s[:, k])) + "\n")


def read_profile_table(path) -> tuple[np.ndarray, np.ndarray]:
    """(eta, s); s is 1-D for a single field and (N, rows) otherwise."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    s = data[:, 1:].T
    return data[:, 0], s[0] if s.shape[0] == 1 else s


def write_csv(fh: TextIO, columns: Sequence[str], rows: Iterable[Mapping]) -> None:
    w = csv.writer(fh, lineterminator="\r\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])


def write_vtk_structured_points(
    fh: TextIO,
    dims: tuple[int, int, int],
    origin: tuple[float, float, float],
    spacing: tuple[float, float, float],
    scalars: Mapping[str, np.ndarray],
    vectors: Mapping[str, np.ndarray] | None = None,
    title: str = "hopfion fields",
) -> None:
    """Legacy ASCII VTK; arrays are indexed [ix, iy, iz] and written x-fastest."""
    nx, ny, nz = dims
    npts = nx * ny * nz
    fh.write("# vtk DataFile Version 3.0\n")
    fh.write(title.replace("\n", " ")[:255] + "\n")
    fh.write("ASCII\nDATASET STRUCTURED_POINTS\n")
    fh.write(f"DIMENSIONS {nx} {ny} {nz}\n")
    fh.write("ORIGIN " + " ".join(FLOAT_FMT % v for v in origin) + "\n")
    fh.write("SPACING " + " ".join(FLOAT_FMT % v for v in spacing) + "\n")
    fh.write(f"POINT_DATA {npts}\n")
    for name, arr in (vectors or {}).items():
        a = np.asarray(arr, dtype=float).transpose(2, 1, 0, 3).reshape(-1, 3)
        fh.write(f"VECTORS {_vtk_name(name)} double\n")
        np.savetxt(fh, a, fmt=FLOAT_FMT)
    for name, arr in scalars.items():
        a = np.asarray(arr, dtype=float).transpose(2, 1, 0).reshape(-1)
        fh.write(f"SCALARS {_vtk_name(name)} double 1\nLOOKUP_TABLE default\n")
        np.savetxt(fh, a, fmt=FLOAT_FMT)


def _vtk_name(name: str) -> str:
    return "".join(c if c.isalnum() or c in "_-" else "_" for c in name)


def read_vtk_structured_points(path) -> dict:
    """Minimal reader for files produced by :func:`write_vtk_structured_points`."""
    with open(path) as fh:
        lines = fh.read().split("\n")
    out: dict = {"scalars": {}, "vectors": {}}
    i = 0
    npts = None
    while i < len(lines):
        tok = lines[i].split()
        if not tok:
            i += 1
            continue
        key = tok[0]
        if key == "DIMENSIONS":
            out["dims"] = tuple(int(t) for t in tok[1:4])
        elif key == "ORIGIN":
            out["origin"] = tuple(float(t) for t in tok[1:4])
        elif key == "SPACING":
            out["spacing"] = tuple(float(t) for t in tok[1:4])
        elif key == "POINT_DATA":
            npts = int(tok[1])
        elif key == "VECTORS":
            vals = np.array(" ".join(lines[i + 1 : i + 1 + npts]).split(), dtype=float)
            out["vectors"][tok[1]] = vals.reshape(npts, 3)
            i += npts
        elif key == "SCALARS":
            vals = np.array(" ".join(lines[i + 2 : i + 2 + npts]).split(), dtype=float)
            out["scalars"][tok[1]] = vals
            i += npts + 1
        i += 1
    return out
