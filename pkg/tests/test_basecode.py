import json

import pytest

from binmds.basecode import (BaseCode, BaseCodeError, companion, evenodd_base,
                             matrix_power, primitive_companion, rs_companion_base,
                             save_base, load_base, verify_base_mds)
from binmds.gf2 import BitMatrix, BlockMatrix, mul, rank


def test_companion_of_primitive_has_full_order():
    for m in range(2, 9):
        c = primitive_companion(m)
        eye = BitMatrix.identity(m)
        order = 2 ** m - 1
        assert matrix_power(c, order) == eye
        # no proper divisor of the order returns to I
        for p in (q for q in range(2, order + 1) if order % q == 0):
            assert matrix_power(c, order // p) != eye


def test_companion_shape():
    c = companion(0b10011)
    assert c.shape == (4, 4) and rank(c) == 4
    assert rank(c + BitMatrix.identity(4)) == 4


def test_evenodd_layout(evenodd):
    eye, zero = BitMatrix.identity(4), BitMatrix.zeros(4)
    assert all(evenodd.block(0, j) == eye for j in range(4))
    assert evenodd.block(0, 4) == zero
    assert evenodd.block(1, 0) == eye
    assert evenodd.block(1, 3) == zero and evenodd.block(1, 4) == eye


def test_evenodd_is_mds(evenodd):
    verdict = verify_base_mds(evenodd)
    assert verdict and verdict.checked == 10 and verdict.expected_rank == 8


def test_evenodd_needs_prime():
    with pytest.raises(BaseCodeError, match="prime"):
        evenodd_base(5, 3)
    with pytest.raises(BaseCodeError):
        evenodd_base(4, 5)


def test_rs_base_mds_and_commuting_blocks():
    base = rs_companion_base(8, 4, 4)
    v = verify_base_mds(base)
    assert v.ok and v.checked == 495 and v.expected_rank == 16
    a, b = base.block(2, 3), base.block(3, 5)
    assert mul(a, b) == mul(b, a)
    with pytest.raises(BaseCodeError):
        rs_companion_base(14, 3, 4)


def test_parallel_sweep_agrees():
    base = rs_companion_base(5, 3, 4)
    assert verify_base_mds(base, jobs=2) == verify_base_mds(base)


def test_zero_column_is_caught():
    base = rs_companion_base(3, 2, 4)
    grid = [[base.block(i, j) for j in range(5)] for i in range(2)]
    grid[0][2] = grid[1][2] = BitMatrix.zeros(4)
    broken = BaseCode(3, 2, 4, BlockMatrix(grid), "test")
    verdict = verify_base_mds(broken)
    assert not verdict and 2 in verdict.witness and verdict.witness_rank < 8


def test_grid_shape_checked():
    with pytest.raises(BaseCodeError):
        BaseCode(3, 2, 4, BlockMatrix([[BitMatrix.identity(4)] * 4] * 2), "test")


def test_file_round_trip(tmp_path, evenodd):
    path = tmp_path / "base.json"
    save_base(evenodd, path)
    back = load_base(path)
    assert back.A == evenodd.A and back.provenance == "file"
    doc = json.loads(path.read_text())
    doc["blocks"][0][0] = BitMatrix.zeros(4).to_text()
    doc["blocks"][1][0] = BitMatrix.zeros(4).to_text()
    with pytest.raises(BaseCodeError):
        BaseCode.from_dict(doc)
    assert BaseCode.from_dict(doc, verify=False).K == 3
