"""Flat binary and CSV serialization of sampled fields.

Binary layout (little endian): magic ``EIKF``, format version (uint32),
then the header ``origin_x, origin_y, extent_x, extent_y`` as float64,
``nx, ny, ncomp`` as int64, followed by row-major float64 cell values.
Masked-out cells are stored as NaN; the mask is recovered on load as
"all components finite".
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import ConfigurationError
from .grid import GridSpec, MatrixField2D, ScalarField2D, VectorField2D

_MAGIC = b"EIKF"
_VERSION = 1


def _ncomp(f) -> int:
    if isinstance(f, ScalarField2D):
        return 1
    if isinstance(f, VectorField2D):
        return 2
    if isinstance(f, MatrixField2D):
        return 4
    raise TypeError(f"unsupported field type {type(f)!r}")


def to_binary(f) -> bytes:
    nc = _ncomp(f)
    g = f.grid
    head = _MAGIC + struct.pack("<I", _VERSION)
    head += struct.pack("<4d", g.origin[0], g.origin[1], g.extent[0], g.extent[1])
    head += struct.pack("<3q", g.nx, g.ny, nc)
    vals = f.values.reshape(g.ny, g.nx, nc).astype("<f8").copy()
    vals[~f.mask] = np.nan
    return head + vals.tobytes()


def from_binary(blob: bytes):
    if blob[:4] != _MAGIC:
        raise ConfigurationError("bad field magic")
    (ver,) = struct.unpack("<I", blob[4:8])
    if ver != _VERSION:
        raise ConfigurationError(f"unsupported field format version {ver}")
    ox, oy, ex, ey = struct.unpack("<4d", blob[8:40])
    nx, ny, nc = struct.unpack("<3q", blob[40:64])
    grid = GridSpec((ox, oy), (ex, ey), int(nx))
    vals = np.frombuffer(blob[64:], dtype="<f8").reshape(int(ny), int(nx), int(nc)).copy()
    mask = np.all(np.isfinite(vals), axis=-1)
    vals[~mask] = 0.0
    if nc == 1:
        return ScalarField2D(grid, vals[..., 0], mask)
    if nc == 2:
        return VectorField2D(grid, vals, mask)
    if nc == 4:
        return MatrixField2D(grid, vals.reshape(int(ny), int(nx), 2, 2), mask)
    raise ConfigurationError(f"unsupported component count {nc}")


def to_csv(f) -> str:
    """Rows ``x,y,c0[,c1...]`` in row-major cell order; masked cells emit nan."""
    nc = _ncomp(f)
    g = f.grid
    X, Y = g.cell_centers()
    vals = f.values.reshape(g.ny, g.nx, nc)
    header = "x,y," + ",".join(f"c{i}" for i in range(nc))
    lines = [header]
    for iy in range(g.ny):
        for ix in range(g.nx):
            comps = vals[iy, ix] if f.mask[iy, ix] else [np.nan] * nc
            row = [f"{X[iy, ix]:.17g}", f"{Y[iy, ix]:.17g}"] + [f"{c:.17g}" for c in comps]
            lines.append(",".join(row))
    return "\n".join(lines) + "\n"
