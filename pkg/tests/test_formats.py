import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beltrami_lab.core import GridSpec, field_from_key
from beltrami_lab.formats import (load_mapping, load_mu_field, read_mapping_binary,
                                  read_mapping_csv, read_mu_binary, read_mu_csv,
                                  write_mapping_binary, write_mapping_csv, write_mu_binary,
                                  write_mu_csv)
from beltrami_lab.solver import Mapping, solve_qc

GRID = GridSpec(0.25 - 0.5j, 3.0, 16)


def random_samples(rng, n=16):
    return 0.5 * (rng.random((n, n)) + 1j * rng.random((n, n)))


def test_mu_binary_round_trip(tmp_path, rng):
    s = random_samples(rng)
    p = write_mu_binary(tmp_path / "mu.bin", GRID, s)
    grid, back = read_mu_binary(p)
    assert grid == GRID
    assert np.array_equal(back, s)


def test_mu_binary_layout(tmp_path):
    s = np.zeros((16, 16), complex)
    s[0, 1] = 0.125 - 0.25j
    p = write_mu_binary(tmp_path / "mu.bin", GRID, s)
    buf = p.read_bytes()
    head = struct.Struct("<4sIIddd")
    assert head.unpack_from(buf) == (b"BLMU", 1, 16, 0.25, -0.5, 3.0)
    assert len(buf) == head.size + 16 * 16 * 16
    # row-major [iy, ix]: element (0, 1) is the second complex number
    assert struct.unpack_from("<dd", buf, head.size + 16) == (0.125, -0.25)


def test_mu_binary_rejects_bad_magic_and_length(tmp_path):
    p = write_mu_binary(tmp_path / "mu.bin", GRID, np.zeros((16, 16)))
    buf = bytearray(p.read_bytes())
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"XXXX" + bytes(buf[4:]))
    with pytest.raises(ValueError):
        read_mu_binary(bad)
    bad.write_bytes(bytes(buf[:-16]))
    with pytest.raises(ValueError):
        read_mu_binary(bad)


def test_mu_csv_round_trip(tmp_path, rng):
    s = random_samples(rng)
    grid, back = read_mu_csv(write_mu_csv(tmp_path / "mu.csv", GRID, s))
    assert grid == GRID
    assert np.array_equal(back, s)


def test_csv_header_validated(tmp_path):
    p = write_mu_csv(tmp_path / "mu.csv", GRID, np.zeros((16, 16)))
    lines = p.read_text().splitlines()
    assert lines[0] == "n,center_re,center_im,half_width"
    assert lines[2] == "x,y,re,im"
    lines[2] = "x,y,real,imag"
    p.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValueError):
        read_mu_csv(p)


def test_csv_sample_count_validated(tmp_path):
    p = write_mu_csv(tmp_path / "mu.csv", GRID, np.zeros((16, 16)))
    p.write_text("\n".join(p.read_text().splitlines()[:-1]) + "\n")
    with pytest.raises(ValueError):
        read_mu_csv(p)


@pytest.mark.parametrize("suffix", [".bin", ".csv"])
def test_mapping_round_trip(tmp_path, suffix):
    g = GridSpec(0j, 4.0, 32)
    m = solve_qc(field_from_key("radial-stretch:k=2"), g, truncation=7)
    path = tmp_path / f"map{suffix}"
    (write_mapping_csv if suffix == ".csv" else write_mapping_binary)(path, m)
    back = load_mapping(path)
    assert back.grid == g
    assert np.array_equal(back.values, m.values)
    assert back.truncation == 7
    assert back.residual == m.residual


def test_mapping_binary_header(tmp_path):
    g = GridSpec(0j, 2.0, 16)
    m = Mapping.from_values(g, g.points(), residual=1e-9)
    buf = write_mapping_binary(tmp_path / "m.bin", m).read_bytes()
    assert struct.unpack_from("<4sIIdddqd", buf) == (b"BLMP", 1, 16, 0.0, 0.0, 2.0, -1, 1e-9)
    assert read_mapping_binary(tmp_path / "m.bin").truncation is None
    assert read_mapping_csv(write_mapping_csv(tmp_path / "m.csv", m)).truncation is None


@pytest.mark.parametrize("suffix", [".bin", ".csv"])
def test_loaded_field_reproduces_samples(tmp_path, suffix):
    g = GridSpec(0j, 2.0, 32)
    s = field_from_key("shabat")(g.points())
    path = tmp_path / f"mu{suffix}"
    (write_mu_csv if suffix == ".csv" else write_mu_binary)(path, g, s)
    f = load_mu_field(path)
    assert np.allclose(f(g.points()), s, atol=1e-15)


@settings(max_examples=25)
@given(st.dictionaries(st.integers(0, 255),
                       st.complex_numbers(max_magnitude=1e6, allow_nan=False,
                                          allow_infinity=False),
                       min_size=1, max_size=20))
def test_binary_and_csv_lossless(tmp_path_factory, entries):
    d = tmp_path_factory.mktemp("rt")
    s = np.zeros(256, complex)
    for k, v in entries.items():
        s[k] = v
    s = s.reshape(16, 16)
    assert np.array_equal(read_mu_binary(write_mu_binary(d / "a.bin", GRID, s))[1], s)
    assert np.array_equal(read_mu_csv(write_mu_csv(d / "a.csv", GRID, s))[1], s)
