"""Readers and writers for coefficient grids and solved mappings (binary and CSV).

The byte layouts are documented in ``docs/formats.md``. All binary numbers are
little-endian; complex payloads are interleaved ``re, im`` float64 pairs in row-major
``[iy, ix]`` order.
"""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .core import GridSpec, grid_field
from .solver import Mapping

MU_MAGIC = b"BLMU"
MAP_MAGIC = b"BLMP"
VERSION = 1
_MU_HEADER = struct.Struct("<4sIIddd")
_MAP_HEADER = struct.Struct("<4sIIdddqd")


def _payload(values):
    return np.ascontiguousarray(np.asarray(values, "<c16")).tobytes()


def _read_payload(buf, offset, n):
    arr = np.frombuffer(buf, dtype="<c16", count=n * n, offset=offset)
    return arr.reshape(n, n).astype(complex)


def write_mu_binary(path, grid: GridSpec, samples) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    head = _MU_HEADER.pack(MU_MAGIC, VERSION, grid.n, grid.center.real, grid.center.imag,
                           grid.half_width)
    path.write_bytes(head + _payload(samples))
    return path


def read_mu_binary(path):
    buf = Path(path).read_bytes()
    magic, ver, n, cre, cim, hw = _MU_HEADER.unpack_from(buf, 0)
    if magic != MU_MAGIC or ver != VERSION:
        raise ValueError(f"{path}: not a version-{VERSION} coefficient grid file")
    grid = GridSpec(complex(cre, cim), hw, n)
    expected = _MU_HEADER.size + 16 * n * n
    if len(buf) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(buf)}")
    return grid, _read_payload(buf, _MU_HEADER.size, n)


def write_mapping_binary(path, m: Mapping) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    g = m.grid
    trunc = -1 if m.truncation is None else int(m.truncation)
    head = _MAP_HEADER.pack(MAP_MAGIC, VERSION, g.n, g.center.real, g.center.imag, g.half_width,
                            trunc, float(m.residual))
    path.write_bytes(head + _payload(m.values))
    return path


def read_mapping_binary(path) -> Mapping:
    buf = Path(path).read_bytes()
    magic, ver, n, cre, cim, hw, trunc, res = _MAP_HEADER.unpack_from(buf, 0)
    if magic != MAP_MAGIC or ver != VERSION:
        raise ValueError(f"{path}: not a version-{VERSION} mapping file")
    grid = GridSpec(complex(cre, cim), hw, n)
    values = _read_payload(buf, _MAP_HEADER.size, n)
    return Mapping.from_values(grid, values, truncation=None if trunc < 0 else int(trunc),
                               residual=res)


_MU_CSV_HEAD = ["n", "center_re", "center_im", "half_width"]
_MAP_CSV_HEAD = _MU_CSV_HEAD + ["truncation", "residual"]


def _write_grid_csv(path, head, head_values, grid, values):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Z = grid.points().ravel()
    v = np.asarray(values, complex).ravel()
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(head)
        w.writerow([repr(x) if isinstance(x, float) else x for x in head_values])
        w.writerow(["x", "y", "re", "im"])
        for z, val in zip(Z, v):
            w.writerow([repr(float(z.real)), repr(float(z.imag)),
                        repr(float(val.real)), repr(float(val.imag))])
    return path


def _read_grid_csv(path, head):
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != head or rows[2] != ["x", "y", "re", "im"]:
        raise ValueError(f"{path}: unexpected CSV header")
    meta = dict(zip(rows[0], rows[1]))
    n = int(meta["n"])
    grid = GridSpec(complex(float(meta["center_re"]), float(meta["center_im"])),
                    float(meta["half_width"]), n)
    data = np.array([[float(r[2]), float(r[3])] for r in rows[3:]])
    if data.shape[0] != n * n:
        raise ValueError(f"{path}: expected {n * n} samples, found {data.shape[0]}")
    return meta, grid, (data[:, 0] + 1j * data[:, 1]).reshape(n, n)


def write_mu_csv(path, grid: GridSpec, samples) -> Path:
    return _write_grid_csv(path, _MU_CSV_HEAD,
                           [grid.n, grid.center.real, grid.center.imag, grid.half_width],
                           grid, samples)


def read_mu_csv(path):
    _, grid, samples = _read_grid_csv(path, _MU_CSV_HEAD)
    return grid, samples


def write_mapping_csv(path, m: Mapping) -> Path:
    g = m.grid
    trunc = -1 if m.truncation is None else int(m.truncation)
    return _write_grid_csv(path, _MAP_CSV_HEAD,
                           [g.n, g.center.real, g.center.imag, g.half_width, trunc,
                            float(m.residual)], g, m.values)


def read_mapping_csv(path) -> Mapping:
    meta, grid, values = _read_grid_csv(path, _MAP_CSV_HEAD)
    trunc = int(meta["truncation"])
    return Mapping.from_values(grid, values, truncation=None if trunc < 0 else trunc,
                               residual=float(meta["residual"]))


def load_mu_field(path):
    """Grid coefficient field from a ``.csv`` file or the binary format (any other suffix)."""
    path = Path(path)
    grid, samples = read_mu_csv(path) if path.suffix == ".csv" else read_mu_binary(path)
    return grid_field(grid, samples, name=f"file:{path.name}")


def load_mapping(path) -> Mapping:
    path = Path(path)
    return read_mapping_csv(path) if path.suffix == ".csv" else read_mapping_binary(path)
