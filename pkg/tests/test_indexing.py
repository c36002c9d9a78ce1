import itertools

import pytest

from binmds.indexing import compose, digit, digits, replace_digit, sigma


def test_digits_msb_first():
    assert digits(5, 2, 3) == [1, 0, 1]
    assert digits(0, 3, 2) == [0, 0]
    assert digit(5, 0, 2) == 1 and digit(5, 1, 2) == 0 and digit(5, 2, 2) == 1


def test_round_trip_exhaustive():
    for a in range(3 ** 4):
        assert compose(digits(a, 3, 4), 3) == a


def test_replace_digit():
    assert replace_digit(5, 1, 1, 2, 3) == 7
    assert replace_digit(7, 0, 0, 2, 3) == 6
    s, t = 3, 3
    for a, v, u, w in itertools.product(range(s ** t), range(t), range(s), range(s)):
        b = replace_digit(a, v, u, s, t)
        assert digit(b, v, s) == u
        assert replace_digit(b, v, u, s, t) == b
        assert replace_digit(b, v, w, s, t) == replace_digit(a, v, w, s, t)
        for v2 in range(t):
            if v2 != v:
                assert digit(b, v2, s) == digit(a, v2, s)
                assert (replace_digit(replace_digit(a, v2, w, s, t), v, u, s, t)
                        == replace_digit(b, v2, w, s, t))


def test_radix_one():
    assert digits(0, 1, 3) == [0, 0, 0]
    assert replace_digit(0, 2, 0, 1, 3) == 0


def test_range_checks():
    with pytest.raises(ValueError):
        digits(8, 2, 3)
    with pytest.raises(ValueError):
        replace_digit(1, 3, 0, 2, 3)
    with pytest.raises(ValueError):
        replace_digit(1, 0, 2, 2, 3)
    with pytest.raises(ValueError):
        compose([0, 2], 2)


def test_sigma_wraps():
    assert [sigma(j, 5) for j in (0, 4, 5, 6)] == [0, 4, 0, 1]
    with pytest.raises(ValueError):
        sigma(1, 0)
