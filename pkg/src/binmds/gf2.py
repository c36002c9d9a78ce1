"""Dense linear algebra over GF(2).

Rows are stored as Python ints used as bitsets: bit ``j`` of ``rows[i]`` is
the entry in row ``i``, column ``j``.  Vectors are plain ints with the same
convention (bit ``i`` is component ``i``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class GF2Error(ValueError):
    """Dimension mismatch, singular input or inconsistent system."""


def _parity(x: int) -> int:
    return x.bit_count() & 1


@dataclass(frozen=True)
class BitMatrix:
    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise GF2Error(f"expected {self.nrows} rows, got {len(self.rows)}")
        mask = (1 << self.ncols) - 1
        if any(r & ~mask for r in self.rows):
            raise GF2Error("bits set beyond the column count")

    # -- constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, nrows: int, ncols: int | None = None) -> "BitMatrix":
        ncols = nrows if ncols is None else ncols
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_lists(cls, data: Sequence[Sequence[int]]) -> "BitMatrix":
        nrows = len(data)
        ncols = len(data[0]) if nrows else 0
        rows = []
        for row in data:
            if len(row) != ncols:
                raise GF2Error("ragged rows")
            rows.append(sum(1 << j for j, x in enumerate(row) if x & 1))
        return cls(nrows, ncols, tuple(rows))

    # -- access -----------------------------------------------------------

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(ij)
        return (self.rows[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def is_zero(self) -> bool:
        return not any(self.rows)

    def transpose(self) -> "BitMatrix":
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            while r:
                low = r & -r
                cols[low.bit_length() - 1] |= 1 << i
                r ^= low
        return BitMatrix(self.ncols, self.nrows, tuple(cols))

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def apply(self, x: int) -> int:
        """Matrix-vector product ``self @ x`` with ``x`` an int bit-vector."""
        out = 0
        for i, r in enumerate(self.rows):
            if _parity(r & x):
                out |= 1 << i
        return out

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise GF2Error(f"cannot add {self.shape} and {other.shape}")
        return BitMatrix(self.nrows, self.ncols,
                         tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return mul(self, other)

    def __repr__(self) -> str:
        body = "\n".join(
            "".join("1" if (r >> j) & 1 else "." for j in range(self.ncols))
            for r in self.rows)
        return f"BitMatrix({self.nrows}x{self.ncols})\n{body}"

    # -- text format ------------------------------------------------------

    def to_text(self) -> str:
        nbytes = (self.ncols + 7) // 8
        lines = [f"gf2 {self.nrows} {self.ncols}"]
        lines += [r.to_bytes(nbytes, "little").hex() for r in self.rows]
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        head = lines[0].split()
        if len(head) != 3 or head[0] != "gf2":
            raise GF2Error(f"bad matrix header: {lines[0]!r}")
        nrows, ncols = int(head[1]), int(head[2])
        body = lines[1:]
        if len(body) != nrows:
            raise GF2Error(f"expected {nrows} hex rows, got {len(body)}")
        nbytes = (ncols + 7) // 8
        rows = []
        for line in body:
            raw = bytes.fromhex(line)
            if len(raw) != nbytes:
                raise GF2Error(f"row {line!r} is not {nbytes} bytes")
            rows.append(int.from_bytes(raw, "little"))
        return cls(nrows, ncols, tuple(rows))


def mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.ncols != b.nrows:
        raise GF2Error(f"cannot multiply {a.shape} by {b.shape}")
    out = []
    brows = b.rows
    for r in a.rows:
        acc = 0
        while r:
            low = r & -r
            acc ^= brows[low.bit_length() - 1]
            r ^= low
        out.append(acc)
    return BitMatrix(a.nrows, b.ncols, tuple(out))


def _eliminate(rows: list[int], ncols: int) -> list[int]:
    """Reduce ``rows`` in place to reduced row-echelon form; return pivot columns."""
    pivots = []
    top = 0
    n = len(rows)
    for col in range(ncols):
        bit = 1 << col
        for p in range(top, n):
            if rows[p] & bit:
                break
        else:
            continue
        rows[top], rows[p] = rows[p], rows[top]
        prow = rows[top]
        for q in range(n):
            if q != top and rows[q] & bit:
                rows[q] ^= prow
        pivots.append(col)
        top += 1
        if top == n:
            break
    return pivots


def rank_of_rows(rows: Iterable[int], ncols: int) -> int:
    """Rank of a matrix given as int rows.  Forward elimination only."""
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            hb = r.bit_length() - 1
            if hb in basis:
                r ^= basis[hb]
            else:
                basis[hb] = r
                break
    return len(basis)


def rank(a: BitMatrix) -> int:
    return rank_of_rows(a.rows, a.ncols)


@dataclass(frozen=True)
class Solution:
    x: int
    unique: bool
    free_columns: tuple[int, ...] = field(default=())


def solve(a: BitMatrix, b: int | Sequence[int]) -> Solution:
    """Solve ``a @ x = b``.

    ``b`` is an int bit-vector or a 0/1 sequence.  When the solution is not
    unique the free variables are set to zero and ``unique`` is False.
    Raises GF2Error on an inconsistent system.
    """
    if not isinstance(b, int):
        if len(b) != a.nrows:
            raise GF2Error(f"right-hand side has {len(b)} entries, expected {a.nrows}")
        b = sum(1 << i for i, x in enumerate(b) if x & 1)
    elif b >> a.nrows:
        raise GF2Error("right-hand side longer than the row count")
    n = a.ncols
    aug = [r | (((b >> i) & 1) << n) for i, r in enumerate(a.rows)]
    pivots = _eliminate(aug, n)
    for r in aug[len(pivots):]:
        if r:
            raise GF2Error("inconsistent system")
    x = 0
    for row, col in zip(aug, pivots):
        if (row >> n) & 1:
            x |= 1 << col
    pivot_set = set(pivots)
    free = tuple(c for c in range(n) if c not in pivot_set)
    return Solution(x, not free, free)


def invert(a: BitMatrix) -> BitMatrix:
    if a.nrows != a.ncols:
        raise GF2Error(f"cannot invert non-square {a.shape}")
    n = a.nrows
    aug = [r | (1 << (n + i)) for i, r in enumerate(a.rows)]
    pivots = _eliminate(aug, n)
    if len(pivots) != n:
        raise GF2Error("singular matrix")
    return BitMatrix(n, n, tuple(r >> n for r in aug))


def kron(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    rows = []
    for ra in a.rows:
        for rb in b.rows:
            acc = 0
            for j in range(a.ncols):
                if (ra >> j) & 1:
                    acc |= rb << (j * b.ncols)
            rows.append(acc)
    return BitMatrix(a.nrows * b.nrows, a.ncols * b.ncols, tuple(rows))


def hstack(mats: Sequence[BitMatrix]) -> BitMatrix:
    nrows = mats[0].nrows
    if any(m.nrows != nrows for m in mats):
        raise GF2Error("hstack needs equal row counts")
    rows = [0] * nrows
    shift = 0
    for m in mats:
        for i, r in enumerate(m.rows):
            rows[i] |= r << shift
        shift += m.ncols
    return BitMatrix(nrows, shift, tuple(rows))


def vstack(mats: Sequence[BitMatrix]) -> BitMatrix:
    ncols = mats[0].ncols
    if any(m.ncols != ncols for m in mats):
        raise GF2Error("vstack needs equal column counts")
    return BitMatrix(sum(m.nrows for m in mats), ncols,
                     tuple(r for m in mats for r in m.rows))


def block_diag(mats: Sequence[BitMatrix]) -> BitMatrix:
    rows = []
    shift = 0
    for m in mats:
        rows.extend(r << shift for r in m.rows)
        shift += m.ncols
    return BitMatrix(len(rows), shift, tuple(rows))


class BlockMatrix:
    """A ``block_rows x block_cols`` grid of ``block_dim``-square BitMatrix blocks."""

    def __init__(self, blocks: Sequence[Sequence[BitMatrix]]):
        self.blocks = tuple(tuple(row) for row in blocks)
        self.block_rows = len(self.blocks)
        self.block_cols = len(self.blocks[0]) if self.block_rows else 0
        self.block_dim = self.blocks[0][0].nrows if self.block_rows else 0
        for row in self.blocks:
            if len(row) != self.block_cols:
                raise GF2Error("ragged block grid")
            for blk in row:
                if blk.shape != (self.block_dim, self.block_dim):
                    raise GF2Error(f"block of shape {blk.shape}, expected "
                                   f"{self.block_dim}x{self.block_dim}")

    def __getitem__(self, ij: tuple[int, int]) -> BitMatrix:
        i, j = ij
        return self.blocks[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, BlockMatrix) and self.blocks == other.blocks

    def flatten(self) -> BitMatrix:
        return vstack([hstack(row) for row in self.blocks])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "BlockMatrix":
        return BlockMatrix([[self.blocks[i][j] for j in cols] for i in rows])

    @classmethod
    def unflatten(cls, flat: BitMatrix, block_dim: int) -> "BlockMatrix":
        if flat.nrows % block_dim or flat.ncols % block_dim:
            raise GF2Error(f"{flat.shape} is not a multiple of {block_dim}")
        mask = (1 << block_dim) - 1
        grid = []
        for a in range(flat.nrows // block_dim):
            chunk = flat.rows[a * block_dim:(a + 1) * block_dim]
            grid.append([
                BitMatrix(block_dim, block_dim,
                          tuple((r >> (b * block_dim)) & mask for r in chunk))
                for b in range(flat.ncols // block_dim)])
        return cls(grid)

    def __repr__(self) -> str:
        return (f"BlockMatrix({self.block_rows}x{self.block_cols} blocks of "
                f"{self.block_dim}x{self.block_dim})")
