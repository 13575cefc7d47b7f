"""The bundled reference tables are frozen; any edit must be deliberate."""
import hashlib
from importlib import resources

import pytest

from lozihom.boundary import load_table1, load_table2

SHA256 = {
    "table1_coeffs.txt": "7bf2469679fb44e6b22710a2dfa0a6566d7ac6eb52d16c51e9f4d0f5227c2b4a",
    "table2_endpoints.csv": "3aa9436e6c131e24d96c6ab6a5b5d6acfdd054f4799cb01929723947c80ebb5b",
}


@pytest.mark.parametrize("name", sorted(SHA256))
def test_checksum(name):
    data = resources.files("lozihom").joinpath("data", name).read_bytes()
    assert hashlib.sha256(data).hexdigest() == SHA256[name]


def test_table2_rows():
    t = load_table2()
    assert list(t) == [f"C{n}" for n in range(1, 12)]
    assert t["C1"] == (1.51950144, 0.549133899)
    assert t["C11"] == (0.939255378, 0.968217486)


def test_table1_shape():
    t = load_table1()
    assert sorted(t) == [1, 2, 3, 4, 5, 6]
    # C1: a^3 - 4a + (a^2 - 2b) sqrt(a^2 + 4b)
    assert t[1].P == ((0, -4, 0, 1),)
    assert t[1].Q == ((0, 0, 1), (-2,))


def test_table1_bad_header(tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("C1 R 0\n1\n")
    with pytest.raises(ValueError):
        load_table1(p)
