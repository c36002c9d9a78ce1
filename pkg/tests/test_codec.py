import itertools
import random

import pytest

from binmds.basecode import rs_companion_base
from binmds.codec import (CodecError, Codeword, encode, erasure_decode, is_mds,
                          join_payload, random_codeword, read_codewords, split_payload,
                          write_codewords)
from binmds.construct import build_c1, make_coefficients
from binmds.gf2 import BitMatrix


def test_zero_information_gives_zero_codeword(c1_small):
    word = encode(c1_small, [0, 0, 0])
    assert word.columns == (0,) * 5 and word.is_valid()


def test_encode_is_systematic_and_valid(c1_small, c2_small):
    rng = random.Random(11)
    for code in (c1_small, c2_small):
        info = [rng.getrandbits(code.l) for _ in range(code.k)]
        word = encode(code, info)
        assert list(word.columns[:code.k]) == info
        assert word.residual() == [0] * code.r


def test_encode_is_linear(c2_small):
    rng = random.Random(12)
    x = [rng.getrandbits(32) for _ in range(5)]
    y = [rng.getrandbits(32) for _ in range(5)]
    wx, wy = encode(c2_small, x), encode(c2_small, y)
    wxy = encode(c2_small, [a ^ b for a, b in zip(x, y)])
    assert wxy.columns == tuple(a ^ b for a, b in zip(wx.columns, wy.columns))


def test_corrupted_word_has_residual(c1_small):
    word = random_codeword(c1_small, random.Random(13))
    bad = Codeword(c1_small, (word.columns[0] ^ 1,) + word.columns[1:])
    assert not bad.is_valid()


def test_every_erasure_pattern(c1_partial):
    code = c1_partial
    word = random_codeword(code, random.Random(14))
    for lost in itertools.combinations(range(code.n), code.r):
        cols = [None if j in lost else c for j, c in enumerate(word.columns)]
        assert erasure_decode(code, cols) == word
    assert erasure_decode(code, word.columns, erased=[0]) == word
    assert erasure_decode(code, word.columns) == word


def test_too_many_erasures(c1_small):
    word = random_codeword(c1_small, random.Random(15))
    with pytest.raises(CodecError, match="exceed"):
        erasure_decode(c1_small, [None, None, None] + list(word.columns[3:]))


def test_inconsistent_survivors(c1_small):
    word = random_codeword(c1_small, random.Random(16))
    # one erasure leaves the system overdetermined, so a flipped bit shows up
    cols = [None] + list(word.columns[1:])
    cols[1] ^= 1
    with pytest.raises(CodecError, match="inconsistent"):
        erasure_decode(c1_small, cols)


def test_bad_coefficients_break_mds():
    eye = BitMatrix.identity(4)
    coeffs = make_coefficients(4, "custom", (eye, eye, eye, eye), validate=False)
    code = build_c1(rs_companion_base(3, 2, 4), 3, 2, coeffs, validate=False)
    verdict = is_mds(code)
    assert not verdict and verdict.witness is not None
    with pytest.raises(CodecError, match="not uniquely decodable"):
        erasure_decode(code, [None if j in verdict.witness else 0 for j in range(5)])


def test_mds_instances(c1_small, c2_small):
    v = is_mds(c1_small)
    assert v.ok and v.checked == 10 and v.expected_rank == 64
    v = is_mds(c2_small, jobs=2)
    assert v.ok and v.checked == 126 and v.expected_rank == 128


def test_column_width_checked(c1_small):
    with pytest.raises(CodecError):
        Codeword(c1_small, (1 << 32, 0, 0, 0, 0))
    with pytest.raises(CodecError):
        Codeword(c1_small, (0,) * 4)
    with pytest.raises(CodecError):
        encode(c1_small, [0, 0])


def test_chunk_view(c1_small):
    word = Codeword(c1_small, (0xABCD, 0, 0, 0, 0))
    assert [word.chunk(0, a) for a in range(4)] == [0xD, 0xC, 0xB, 0xA]


@pytest.mark.parametrize("size", [0, 1, 11, 12, 13, 200])
def test_payload_split_join(c1_small, size):
    data = bytes(random.Random(size).getrandbits(8) for _ in range(size))
    stripes = split_payload(c1_small, data)
    words = [encode(c1_small, s) for s in stripes]
    assert join_payload(c1_small, words, len(data)) == data


def test_file_round_trip(tmp_path, c1_small, c2_small):
    rng = random.Random(17)
    words = [random_codeword(c1_small, rng) for _ in range(3)]
    path = tmp_path / "cw.bin"
    write_codewords(path, words, 29)
    back, n = read_codewords(path, c1_small)
    assert back == words and n == 29
    with pytest.raises(CodecError, match="file holds"):
        read_codewords(path, c2_small)
    path.write_bytes(path.read_bytes()[:-20])
    with pytest.raises(CodecError):
        read_codewords(path, c1_small)
    path.write_bytes(b"junk")
    with pytest.raises(CodecError):
        read_codewords(path, c1_small)
    with pytest.raises(CodecError):
        write_codewords(path, [])
