"""Profile files, summary records and CSV tables.

Profile format (text): header lines `d=`, `sigma=`, `alpha=`, `tag=`, `n=`,
`r_max=` in that order, then n rows `r, re, im`.  All numbers use 17
significant digits, so save/load round-trips are bit-identical.
"""

import io
import os

import numpy as np

from .errors import ParameterError
from .field import RadialField
from .grid import build_grid


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_profile(path, field: RadialField, sigma: float, alpha: float, tag: str = ""):
    grid = field.grid
    if "\n" in tag or "," in tag:
        raise ParameterError("tag must not contain newlines or commas")
    buf = io.StringIO()
    buf.write(f"d={grid.d}\n")
    buf.write(f"sigma={fmt(sigma)}\n")
    buf.write(f"alpha={fmt(alpha)}\n")
    buf.write(f"tag={tag}\n")
    buf.write(f"n={grid.n}\n")
    buf.write(f"r_max={fmt(grid.r_max)}\n")
    vals = field.values
    for j in range(grid.n):
        buf.write(f"{fmt(grid.r[j])}, {fmt(vals[j].real)}, {fmt(vals[j].imag)}\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def load_profile(path):
    """Read a profile file; returns (field, meta) with meta = {d, sigma, alpha, tag}."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if len(lines) < 7:
        raise ParameterError(f"{path}: truncated profile file")
    meta = {}
    keys = ["d", "sigma", "alpha", "tag", "n", "r_max"]
    for i, key in enumerate(keys):
        if not lines[i].startswith(key + "="):
            raise ParameterError(f"{path}: expected header '{key}=' on line {i + 1}")
        meta[key] = lines[i][len(key) + 1 :]
    d = int(meta["d"])
    n = int(meta["n"])
    r_max = float(meta["r_max"])
    rows = lines[6 : 6 + n]
    if len(rows) != n:
        raise ParameterError(f"{path}: expected {n} data rows, found {len(rows)}")
    data = np.loadtxt(io.StringIO("\n".join(rows)), delimiter=",").reshape(n, 3)
    grid = build_grid(d, r_max, n)
    if not np.array_equal(data[:, 0], grid.r):
        # radii must reproduce the cell-centered grid exactly in decimal-17 form
        if np.max(np.abs(data[:, 0] - grid.r)) > 1e-12 * grid.r_max:
            raise ParameterError(f"{path}: radii do not match the cell-centered grid")
    field = RadialField(grid, data[:, 1] + 1j * data[:, 2])
    return field, {
        "d": d,
        "sigma": float(meta["sigma"]),
        "alpha": float(meta["alpha"]),
        "tag": meta["tag"],
    }


def write_csv(path, header: list, rows: list):
    """CSV with 17-significant-digit numeric fields (byte-reproducible)."""
    with open(path, "w") as fh:
        fh.write(", ".join(header) + "\n")
        for row in rows:
            fh.write(", ".join(fmt(x) if isinstance(x, float) else str(x) for x in row) + "\n")


def write_summary(path, record: dict):
    """One `key = value` line per entry; floats in decimal-17 form."""
    with open(path, "w") as fh:
        for key, val in record.items():
            if isinstance(val, float):
                fh.write(f"{key} = {fmt(val)}\n")
            else:
                fh.write(f"{key} = {val}\n")


def eigenpair_summary_line(d, sigma, coupling, n, mu1, residual) -> str:
    return ", ".join([str(d), fmt(sigma), fmt(coupling), str(n), fmt(mu1), fmt(residual)])


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
