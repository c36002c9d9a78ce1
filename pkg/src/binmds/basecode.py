"""Base binary MDS array codes given as block parity-check matrices."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Sequence

from .gf2 import BitMatrix, BlockMatrix, mul, rank_of_rows

# Fixed per degree so matrices are reproducible.
PRIMITIVE_POLYS = {
    2: 0b111,
    3: 0b1011,          # x^3 + x + 1
    4: 0b10011,         # x^4 + x + 1
    5: 0b100101,        # x^5 + x^2 + 1
    6: 0b1000011,       # x^6 + x + 1
    7: 0b10000011,      # x^7 + x + 1
    8: 0b100011101,     # x^8 + x^4 + x^3 + x^2 + 1
}


class BaseCodeError(ValueError):
    pass


def companion(poly: int) -> BitMatrix:
    """Companion matrix of a monic polynomial (bit ``i`` = coefficient of x^i).

    Acts as multiplication by ``x`` on coefficient vectors.
    """
    m = poly.bit_length() - 1
    if m < 1:
        raise BaseCodeError("polynomial must have degree >= 1")
    rows = [0] * m
    for i in range(m - 1):
        rows[i + 1] |= 1 << i
    for i in range(m):
        if (poly >> i) & 1:
            rows[i] |= 1 << (m - 1)
    return BitMatrix(m, m, tuple(rows))


def primitive_companion(m: int) -> BitMatrix:
    try:
        return companion(PRIMITIVE_POLYS[m])
    except KeyError:
        raise BaseCodeError(f"no fixed primitive polynomial of degree {m}") from None


def matrix_power(c: BitMatrix, e: int) -> BitMatrix:
    out = BitMatrix.identity(c.nrows)
    base = c
    while e:
        if e & 1:
            out = mul(out, base)
        base = mul(base, base)
        e >>= 1
    return out


@dataclass(frozen=True)
class MdsVerdict:
    ok: bool
    witness: tuple[int, ...] | None
    checked: int
    expected_rank: int
    witness_rank: int | None = None

    def __bool__(self) -> bool:
        return self.ok


_SWEEP_ROWS: list[list[list[int]]] | None = None


def _init_sweep(block_rows):
    global _SWEEP_ROWS
    _SWEEP_ROWS = block_rows


def _subset_rank(block_rows, cols: Sequence[int], dim: int) -> int:
    # block_rows[i][j] is the list of int rows of block (i, j)
    rows = []
    for per_col in block_rows:
        for x in range(dim):
            acc = 0
            for pos, j in enumerate(cols):
                acc |= per_col[j][x] << (pos * dim)
            rows.append(acc)
    return rank_of_rows(rows, dim * len(cols))


def _sweep_chunk(args):
    subsets, dim = args
    bad = []
    for cols in subsets:
        rk = _subset_rank(_SWEEP_ROWS, cols, dim)
        if rk != dim * len(cols):
            bad.append((cols, rk))
            break
    return bad


def verify_block_mds(h: BlockMatrix, jobs: int = 1) -> MdsVerdict:
    """Check that every ``r x r`` block submatrix of ``h`` is full rank."""
    r, n, dim = h.block_rows, h.block_cols, h.block_dim
    block_rows = [[list(h[i, j].rows) for j in range(n)] for i in range(r)]
    subsets = list(combinations(range(n), r))
    expected = r * dim
    if jobs <= 1:
        for cols in subsets:
            rk = _subset_rank(block_rows, cols, dim)
            if rk != expected:
                return MdsVerdict(False, cols, len(subsets), expected, rk)
        return MdsVerdict(True, None, len(subsets), expected)
    step = max(1, len(subsets) // (4 * jobs))
    chunks = [(subsets[i:i + step], dim) for i in range(0, len(subsets), step)]
    with ProcessPoolExecutor(jobs, initializer=_init_sweep,
                             initargs=(block_rows,)) as pool:
        failures = [f for res in pool.map(_sweep_chunk, chunks) for f in res]
    if failures:
        cols, rk = min(failures)
        return MdsVerdict(False, tuple(cols), len(subsets), expected, rk)
    return MdsVerdict(True, None, len(subsets), expected)


@dataclass(frozen=True)
class BaseCode:
    K: int
    r: int
    m: int
    A: BlockMatrix
    provenance: str

    def __post_init__(self):
        if (self.A.block_rows, self.A.block_cols, self.A.block_dim) != (
                self.r, self.K + self.r, self.m):
            raise BaseCodeError(
                f"parity-check grid {self.A.block_rows}x{self.A.block_cols} "
                f"(block {self.A.block_dim}) does not match K={self.K}, "
                f"r={self.r}, m={self.m}")

    @property
    def n(self) -> int:
        return self.K + self.r

    def block(self, i: int, j: int) -> BitMatrix:
        return self.A[i, j]

    def to_dict(self) -> dict:
        return {
            "K": self.K, "r": self.r, "m": self.m,
            "provenance": self.provenance,
            "blocks": [[self.A[i, j].to_text() for j in range(self.n)]
                       for i in range(self.r)],
        }

    @classmethod
    def from_dict(cls, doc: dict, verify: bool = True) -> "BaseCode":
        try:
            grid = [[BitMatrix.from_text(t) for t in row] for row in doc["blocks"]]
            base = cls(int(doc["K"]), int(doc["r"]), int(doc["m"]),
                       BlockMatrix(grid), doc.get("provenance", "file"))
        except (KeyError, TypeError) as exc:
            raise BaseCodeError(f"malformed base code document: {exc}") from exc
        if verify:
            _require_mds(base)
        return base


def verify_base_mds(base: BaseCode, jobs: int = 1) -> MdsVerdict:
    return verify_block_mds(base.A, jobs)


def _require_mds(base: BaseCode) -> BaseCode:
    verdict = verify_base_mds(base)
    if not verdict.ok:
        raise BaseCodeError(
            f"{base.provenance} base ({base.n},{base.K},{base.m}) is not MDS; "
            f"columns {verdict.witness} have rank {verdict.witness_rank} "
            f"< {verdict.expected_rank}")
    return base


def rs_companion_base(K: int, r: int, m: int) -> BaseCode:
    """Reed-Solomon parity check over GF(2^m), written with m x m binary blocks.

    Block ``(i, j)`` is ``C**(i*j)`` for the companion matrix ``C`` of the
    fixed primitive polynomial of degree ``m``.
    """
    if K < 1 or r < 1:
        raise BaseCodeError("K and r must be positive")
    if K + r > 2 ** m - 1:
        raise BaseCodeError(f"K+r={K + r} exceeds 2^m-1={2 ** m - 1}")
    c = primitive_companion(m)
    powers = [BitMatrix.identity(m)]
    for _ in range((r - 1) * (K + r - 1)):
        powers.append(mul(powers[-1], c))
    grid = [[powers[i * j] for j in range(K + r)] for i in range(r)]
    return _require_mds(BaseCode(K, r, m, BlockMatrix(grid), "rs-companion"))


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


def evenodd_base(m: int, K: int) -> BaseCode:
    """EVENODD parity check with prime ``m+1`` and two parity nodes.

    Row 0 is ``[I .. I, I, 0]``; row 1 is ``[P C^(m+1-j) Q for j < K, 0, I]``.
    """
    if not _is_prime(m + 1):
        raise BaseCodeError(f"m+1={m + 1} is not prime")
    if not 1 <= K <= m:
        raise BaseCodeError(f"K={K} must lie in [1, m={m}]")
    p = m + 1
    # P = [I_m 1], Q = [I_m 0]^T, C = single cyclic shift of size m+1
    pm = BitMatrix(m, p, tuple((1 << i) | (1 << m) for i in range(m)))
    qm = BitMatrix(p, m, tuple((1 << i) if i < m else 0 for i in range(p)))
    shift = BitMatrix(p, p, tuple(1 << ((i + 1) % p) for i in range(p)))
    eye, zero = BitMatrix.identity(m), BitMatrix.zeros(m)
    row0 = [eye] * (K + 1) + [zero]
    row1 = [mul(mul(pm, matrix_power(shift, p - j)), qm) for j in range(K)]
    row1 += [zero, eye]
    return _require_mds(BaseCode(K, 2, m, BlockMatrix([row0, row1]), "evenodd"))


def load_base(path: str | Path) -> BaseCode:
    doc = json.loads(Path(path).read_text())
    base = BaseCode.from_dict(doc)
    return BaseCode(base.K, base.r, base.m, base.A, "file")


def save_base(base: BaseCode, path: str | Path) -> None:
    Path(path).write_text(json.dumps(base.to_dict(), indent=1))
