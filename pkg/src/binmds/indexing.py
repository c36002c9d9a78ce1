"""s-ary digit arithmetic on chunk indices.

An index ``a`` in ``[0, s**t)`` has digits ``a_{t-1} ... a_0`` with
``a = sum(a_i * s**i)``.  Digit position ``v`` carries weight ``s**v``.
"""

from __future__ import annotations


def _check(a: int, s: int, t: int) -> None:
    if s < 1 or t < 0:
        raise ValueError(f"bad radix/width s={s}, t={t}")
    if not 0 <= a < s ** t:
        raise ValueError(f"index {a} out of range [0, {s ** t})")


def digits(a: int, s: int, t: int) -> list[int]:
    """Base-``s`` digits of ``a``, most significant first."""
    _check(a, s, t)
    out = [0] * t
    for i in range(t):
        a, out[t - 1 - i] = divmod(a, s)
    return out


def compose(ds: list[int], s: int) -> int:
    """Inverse of :func:`digits`."""
    a = 0
    for d in ds:
        if not 0 <= d < max(s, 1):
            raise ValueError(f"digit {d} out of range for radix {s}")
        a = a * s + d
    return a


def digit(a: int, v: int, s: int) -> int:
    """The digit of ``a`` at position ``v`` (weight ``s**v``)."""
    return (a // s ** v) % s


def replace_digit(a: int, v: int, u: int, s: int, t: int) -> int:
    """``a(v, u)``: ``a`` with digit ``v`` set to ``u``."""
    _check(a, s, t)
    if not 0 <= v < t:
        raise ValueError(f"digit position {v} out of range [0, {t})")
    if not 0 <= u < s:
        raise ValueError(f"digit value {u} out of range [0, {s})")
    w = s ** v
    return a + (u - (a // w) % s) * w


def sigma(j: int, n: int) -> int:
    if n < 1:
        raise ValueError("modulus must be positive")
    return j % n
