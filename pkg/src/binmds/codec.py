"""Codewords, systematic encoding, erasure decoding and MDS checks."""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .basecode import MdsVerdict, verify_block_mds
from .construct import ArrayCode
from .gf2 import BitMatrix, GF2Error, invert, solve


class CodecError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Codeword:
    """``k+r`` columns of ``l`` bits; bit ``a*m + i`` of a column is chunk ``a`` bit ``i``."""

    code: ArrayCode
    columns: tuple[int, ...]

    def __post_init__(self):
        if len(self.columns) != self.code.n:
            raise CodecError(f"expected {self.code.n} columns, got {len(self.columns)}")
        if any(c < 0 or c >> self.code.l for c in self.columns):
            raise CodecError(f"column wider than l={self.code.l} bits")

    def __eq__(self, other) -> bool:
        return (isinstance(other, Codeword) and other.code is self.code
                and other.columns == self.columns)

    def __hash__(self) -> int:
        return hash(self.columns)

    def chunk(self, t: int, a: int) -> int:
        m = self.code.m
        return (self.columns[t] >> (a * m)) & ((1 << m) - 1)

    def residual(self) -> list[int]:
        """``sum_j H_{i,j} c_j`` for every parity row ``i``; all zero for a codeword."""
        return [_row_syndrome(self.code, i, self.columns) for i in range(self.code.r)]

    def is_valid(self) -> bool:
        return not any(self.residual())


def _apply_rows(rows: Sequence[int], x: int) -> int:
    out = 0
    for idx, row in enumerate(rows):
        if (row & x).bit_count() & 1:
            out |= 1 << idx
    return out


def _row_syndrome(code: ArrayCode, i: int, columns: Sequence[int],
                  skip: Iterable[int] = ()) -> int:
    skip = set(skip)
    acc = 0
    for j, col in enumerate(columns):
        if j not in skip and col:
            acc ^= _apply_rows(code.flat_rows(i, j), col)
    return acc


def _system_rows(code: ArrayCode, cols: Sequence[int]) -> list[int]:
    """Int rows of the ``r*l x len(cols)*l`` block submatrix on ``cols``."""
    l = code.l
    rows = []
    for i in range(code.r):
        per = [code.flat_rows(i, j) for j in cols]
        for x in range(l):
            acc = 0
            for pos, fr in enumerate(per):
                acc |= fr[x] << (pos * l)
            rows.append(acc)
    return rows


def is_mds(code: ArrayCode, jobs: int = 1) -> MdsVerdict:
    """Exhaustive rank check of every ``r x r`` block submatrix of ``H``."""
    return verify_block_mds(code.H, jobs)


def _parity_inverse(code: ArrayCode) -> BitMatrix:
    key = ("parity-inverse",)
    if key not in code._cache:
        cols = list(range(code.k, code.n))
        sub = BitMatrix(code.r * code.l, code.r * code.l, tuple(_system_rows(code, cols)))
        try:
            code._cache[key] = invert(sub)
        except GF2Error as exc:
            raise CodecError("parity block submatrix is singular; code is not MDS") from exc
    return code._cache[key]


def encode(code: ArrayCode, info: Sequence[int]) -> Codeword:
    """Systematic encoding: ``info`` holds the ``k`` information columns as ints."""
    if len(info) != code.k:
        raise CodecError(f"expected {code.k} information columns, got {len(info)}")
    l = code.l
    full = list(info) + [0] * code.r
    rhs = 0
    for i in range(code.r):
        rhs |= _row_syndrome(code, i, full) << (i * l)
    parity = _parity_inverse(code).apply(rhs)
    mask = (1 << l) - 1
    for p in range(code.r):
        full[code.k + p] = (parity >> (p * l)) & mask
    return Codeword(code, tuple(full))


def erasure_decode(code: ArrayCode, columns: Sequence[int | None],
                   erased: Iterable[int] | None = None) -> Codeword:
    """Recover erased columns by one flat GF(2) solve.

    Erased columns are those given as ``None`` or listed in ``erased``.
    """
    columns = list(columns)
    if len(columns) != code.n:
        raise CodecError(f"expected {code.n} columns, got {len(columns)}")
    lost = sorted(set(erased or ()) | {j for j, c in enumerate(columns) if c is None})
    if len(lost) > code.r:
        raise CodecError(f"{len(lost)} erasures exceed r={code.r}")
    if not lost:
        return Codeword(code, tuple(columns))
    known = [0 if j in lost else columns[j] for j in range(code.n)]
    l = code.l
    rhs = 0
    for i in range(code.r):
        rhs |= _row_syndrome(code, i, known, skip=lost) << (i * l)
    system = BitMatrix(code.r * l, len(lost) * l, tuple(_system_rows(code, lost)))
    try:
        sol = solve(system, rhs)
    except GF2Error as exc:
        raise CodecError("surviving columns are inconsistent with the code") from exc
    if not sol.unique:
        raise CodecError("erasure pattern is not uniquely decodable; code is not MDS")
    mask = (1 << l) - 1
    for pos, j in enumerate(lost):
        known[j] = (sol.x >> (pos * l)) & mask
    return Codeword(code, tuple(known))


def random_codeword(code: ArrayCode, rng: random.Random) -> Codeword:
    return encode(code, [rng.getrandbits(code.l) for _ in range(code.k)])


# -- binary file ------------------------------------------------------------
# header "bmds <l> <n>\n", then stripes of n columns of ceil(l/8) bytes each,
# then a 16-byte trailer: payload byte length and stripe count, 8 bytes each LE.

TRAILER = 16


def column_bytes(l: int) -> int:
    return (l + 7) // 8


def write_codewords(path: str | Path, words: Sequence[Codeword],
                    payload_len: int = 0) -> None:
    if not words:
        raise CodecError("nothing to write")
    code = words[0].code
    nb = column_bytes(code.l)
    out = bytearray(f"bmds {code.l} {code.n}\n".encode())
    for w in words:
        for col in w.columns:
            out += col.to_bytes(nb, "little")
    out += payload_len.to_bytes(8, "little") + len(words).to_bytes(8, "little")
    Path(path).write_bytes(bytes(out))


def read_codewords(path: str | Path, code: ArrayCode) -> tuple[list[Codeword], int]:
    raw = Path(path).read_bytes()
    nl = raw.find(b"\n")
    head = raw[:nl].decode(errors="replace").split() if nl > 0 else []
    if len(head) != 3 or head[0] != "bmds":
        raise CodecError("not a bmds codeword file")
    l, n = int(head[1]), int(head[2])
    if (l, n) != (code.l, code.n):
        raise CodecError(f"file holds (l={l}, n={n}); code has (l={code.l}, n={code.n})")
    body = raw[nl + 1:]
    if len(body) < TRAILER:
        raise CodecError("truncated codeword file")
    payload_len = int.from_bytes(body[-TRAILER:-8], "little")
    stripes = int.from_bytes(body[-8:], "little")
    nb = column_bytes(l)
    if len(body) - TRAILER != stripes * n * nb:
        raise CodecError("codeword file size does not match its trailer")
    words = []
    for s in range(stripes):
        cols = []
        for j in range(n):
            off = (s * n + j) * nb
            cols.append(int.from_bytes(body[off:off + nb], "little"))
        words.append(Codeword(code, tuple(cols)))
    return words, payload_len


def split_payload(code: ArrayCode, data: bytes) -> list[list[int]]:
    """Split ``data`` into zero-padded stripes of ``k`` information columns."""
    bits = len(data) * 8
    per = code.k * code.l
    count = max(1, -(-bits // per))
    value = int.from_bytes(data, "little")
    mask = (1 << code.l) - 1
    stripes = []
    for s in range(count):
        chunk = value >> (s * per)
        stripes.append([(chunk >> (j * code.l)) & mask for j in range(code.k)])
    return stripes


def join_payload(code: ArrayCode, words: Sequence[Codeword], payload_len: int) -> bytes:
    per = code.k * code.l
    value = 0
    for s, w in enumerate(words):
        for j in range(code.k):
            value |= w.columns[j] << (s * per + j * code.l)
    total = -(-(per * len(words)) // 8)
    return value.to_bytes(total, "little")[:payload_len]
