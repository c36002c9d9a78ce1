"""Parity-check matrices of the optimal-access code C1 and optimal-repair code C2.

Both codes are described by a *pattern*: for node ``j`` and block row ``a``
of ``H_{i,j}`` (an ``l' x l'`` grid of ``m x m`` blocks) the pattern lists the
nonzero entries as ``(b, t, tag)`` meaning ``H_{i,j}(a, b) = A_{i,t} @ Psi_tag``.
The pattern is the same for every parity row ``i``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import ceil
from pathlib import Path

from . import indexing
from .basecode import BaseCode, primitive_companion
from .gf2 import BitMatrix, BlockMatrix, invert, mul, rank, vstack, hstack

TAGS = ("I", "psi1", "psi2", "psi3", "psi4")

Entry = tuple[int, int, str]


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class CoefficientSet:
    psi1: BitMatrix
    psi2: BitMatrix
    psi3: BitMatrix
    psi4: BitMatrix

    @property
    def m(self) -> int:
        return self.psi1.nrows

    def get(self, tag: str) -> BitMatrix:
        if tag == "I":
            return BitMatrix.identity(self.m)
        return getattr(self, tag)

    def problems(self) -> list[str]:
        m = self.m
        out = []
        for tag in TAGS[1:]:
            psi = self.get(tag)
            if psi.shape != (m, m):
                out.append(f"{tag} has shape {psi.shape}, expected {m}x{m}")
            elif rank(psi) != m:
                out.append(f"{tag} is singular")
        if not out:
            stacked = vstack([hstack([self.psi1, self.psi4]),
                              hstack([self.psi3, self.psi2])])
            if rank(stacked) != 2 * m:
                out.append("[[psi1, psi4], [psi3, psi2]] is singular")
        return out

    def validate(self) -> "CoefficientSet":
        problems = self.problems()
        if problems:
            raise ConstructionError("; ".join(problems))
        return self

    def to_dict(self) -> dict:
        return {tag: self.get(tag).to_text() for tag in TAGS[1:]}

    @classmethod
    def from_dict(cls, doc: dict) -> "CoefficientSet":
        return cls(*(BitMatrix.from_text(doc[tag]) for tag in TAGS[1:])).validate()


def make_coefficients(m: int, kind: str = "identity",
                      custom: tuple[BitMatrix, ...] | None = None,
                      validate: bool = True) -> CoefficientSet:
    """Coefficient matrices.

    ``identity`` gives psi1 = psi2 = psi3 = I and psi4 = companion matrix of
    the fixed primitive polynomial of degree ``m``; both psi4 and I + psi4 are
    then invertible.
    """
    if kind == "identity":
        eye = BitMatrix.identity(m)
        coeffs = CoefficientSet(eye, eye, eye, primitive_companion(m))
    elif kind == "custom":
        if custom is None or len(custom) != 4:
            raise ConstructionError("custom coefficients need four matrices")
        coeffs = CoefficientSet(*custom)
    else:
        raise ConstructionError(f"unknown coefficient kind {kind!r}")
    return coeffs.validate() if validate else coeffs


def expected_subpacketization(kind: str, k: int, r: int, s: int, m: int) -> int:
    if kind == "C1":
        return m * s ** ceil((k + r) / s)
    if kind == "C2":
        if (k + r) % (s + 1):
            raise ConstructionError("C2 needs (s+1) | (k+r)")
        return m * s ** ((k + r) // (s + 1))
    raise ConstructionError(f"unknown construction {kind!r}")


@dataclass(frozen=True, eq=False)
class ArrayCode:
    kind: str
    k: int
    r: int
    s: int
    m: int
    g: int
    width: int                # number of s-ary digits of a chunk index
    base: BaseCode
    coeffs: CoefficientSet
    pattern: tuple[tuple[tuple[Entry, ...], ...], ...]
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.k + self.r

    @property
    def l_prime(self) -> int:
        return self.s ** self.width

    @property
    def l(self) -> int:
        return self.m * self.l_prime

    @property
    def d(self) -> int:
        return self.k + self.s - 1

    @property
    def group_size(self) -> int:
        return self.s if self.kind == "C1" else self.s + 1

    def locate(self, j: int) -> tuple[int, int]:
        """Group index and position ``(v, u)`` of node ``j``."""
        if not 0 <= j < self.n:
            raise IndexError(f"node {j} out of range [0, {self.n})")
        return divmod(j, self.group_size)

    def digit(self, a: int, v: int) -> int:
        return indexing.digit(a, v, self.s)

    def replace(self, a: int, v: int, u: int) -> int:
        return indexing.replace_digit(a, v, u, self.s, self.width)

    def product(self, i: int, t: int, tag: str) -> BitMatrix:
        key = ("prod", i, t, tag)
        if key not in self._cache:
            a = self.base.block(i, t)
            self._cache[key] = a if tag == "I" else mul(a, self.coeffs.get(tag))
        return self._cache[key]

    def psi_inverse(self, tag: str) -> BitMatrix:
        key = ("inv", tag)
        if key not in self._cache:
            self._cache[key] = invert(self.coeffs.get(tag))
        return self._cache[key]

    def entry(self, i: int, j: int, a: int, b: int) -> BitMatrix:
        for bb, t, tag in self.pattern[j][a]:
            if bb == b:
                return self.product(i, t, tag)
        return BitMatrix.zeros(self.m)

    def block(self, i: int, j: int) -> BlockMatrix:
        """``H_{i,j}`` as an ``l' x l'`` grid of ``m x m`` blocks."""
        zero = BitMatrix.zeros(self.m)
        grid = [[zero] * self.l_prime for _ in range(self.l_prime)]
        for a, row in enumerate(self.pattern[j]):
            for b, t, tag in row:
                grid[a][b] = self.product(i, t, tag)
        return BlockMatrix(grid)

    def flat_rows(self, i: int, j: int) -> tuple[int, ...]:
        """Int rows of the flattened ``l x l`` matrix ``H_{i,j}``."""
        key = ("flat", i, j)
        if key not in self._cache:
            m = self.m
            rows = [0] * self.l
            for a, row in enumerate(self.pattern[j]):
                for b, t, tag in row:
                    blk = self.product(i, t, tag)
                    for x in range(m):
                        rows[a * m + x] |= blk.rows[x] << (b * m)
            self._cache[key] = tuple(rows)
        return self._cache[key]

    def flat_block(self, i: int, j: int) -> BitMatrix:
        return BitMatrix(self.l, self.l, self.flat_rows(i, j))

    @property
    def H(self) -> BlockMatrix:
        return BlockMatrix([[self.flat_block(i, j) for j in range(self.n)]
                            for i in range(self.r)])

    def describe_entry(self, entry: Entry) -> str:
        _, t, tag = entry
        return f"A[i,{t}]" if tag == "I" else f"A[i,{t}]*{tag}"

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        h = []
        for j in range(self.n):
            for a, row in enumerate(self.pattern[j]):
                for b, t, tag in row:
                    for i in range(self.r):
                        h.append([i, j, a, b, self.product(i, t, tag).to_text()])
        return {
            "kind": self.kind, "k": self.k, "r": self.r, "s": self.s, "m": self.m,
            "base": self.base.to_dict(),
            "coeffs": self.coeffs.to_dict(),
            "H": h,
        }


def _c1_pattern(k: int, r: int, s: int, width: int) -> list[list[list[Entry]]]:
    n = k + r
    lp = s ** width
    pattern = []
    for j in range(n):
        v, u = divmod(j, s)
        rows = []
        for a in range(lp):
            av = indexing.digit(a, v, s)
            tag = "psi1" if av < u else "I" if av == u else "psi2"
            row = [(a, j, tag)]
            if av == u:
                for w in range(s):
                    if w == u:
                        continue
                    b = indexing.replace_digit(a, v, w, s, width)
                    if w < u:
                        row.append((b, j - u + w, "psi3"))
                    else:
                        row.append((b, indexing.sigma(j - u + w, n), "psi4"))
            rows.append(sorted(row))
        pattern.append(rows)
    return pattern


def build_c1(base: BaseCode, k: int, s: int, coeffs: CoefficientSet,
             validate: bool = True) -> ArrayCode:
    r = base.r
    if not 1 <= s <= r:
        raise ConstructionError(f"C1 needs 1 <= s <= r, got s={s}, r={r}")
    if not r < k <= base.K:
        raise ConstructionError(f"C1 needs r < k <= K, got r={r}, k={k}, K={base.K}")
    if coeffs.m != base.m:
        raise ConstructionError("coefficient size differs from base sub-packetization")
    if validate:
        coeffs.validate()
    width = ceil((k + r) / s)
    g = (k + r) // s
    pattern = _c1_pattern(k, r, s, width)
    return ArrayCode("C1", k, r, s, base.m, g, width, base, coeffs,
                     tuple(tuple(tuple(row) for row in rows) for rows in pattern))


def _c2_pattern(k: int, r: int, s: int, g: int) -> list[list[list[Entry]]]:
    lp = s ** g
    pattern = []
    for j in range(k + r):
        v, u = divmod(j, s + 1)
        rows = []
        for a in range(lp):
            av = indexing.digit(a, v, s)
            if u == s:
                rows.append([(a, 2 * v * s + s + av, "I")])
                continue
            tag = "psi1" if av < u else "I" if av == u else "psi2"
            row = [(a, 2 * v * s + u, tag)]
            if av == u:
                for w in range(s):
                    if w != u:
                        b = indexing.replace_digit(a, v, w, s, g)
                        row.append((b, 2 * v * s + w, "psi3" if w < u else "psi4"))
            rows.append(sorted(row))
        pattern.append(rows)
    return pattern


def build_c2(base: BaseCode, k: int, coeffs: CoefficientSet,
             validate: bool = True) -> ArrayCode:
    r = base.r
    if r < 4 or r % 2:
        raise ConstructionError(f"C2 needs even r >= 4, got r={r}")
    s = r // 2
    if (k + r) % (s + 1):
        raise ConstructionError(f"C2 needs (s+1) | (k+r), got s={s}, k+r={k + r}")
    if k < 1 or k > (s + 1) * (base.K + r) // r - r:
        raise ConstructionError(
            f"C2 needs 1 <= k <= floor((s+1)(K+r)/r) - r = "
            f"{(s + 1) * (base.K + r) // r - r}, got k={k}")
    g = (k + r) // (s + 1)
    if base.n < 2 * s * g:
        raise ConstructionError(f"base has {base.n} columns, C2 needs {2 * s * g}")
    if coeffs.m != base.m:
        raise ConstructionError("coefficient size differs from base sub-packetization")
    if validate:
        coeffs.validate()
    pattern = _c2_pattern(k, r, s, g)
    return ArrayCode("C2", k, r, s, base.m, g, g, base, coeffs,
                     tuple(tuple(tuple(row) for row in rows) for rows in pattern))


def build(kind: str, base: BaseCode, k: int, s: int | None,
          coeffs: CoefficientSet) -> ArrayCode:
    if kind == "C1":
        if s is None:
            raise ConstructionError("C1 needs s")
        return build_c1(base, k, s, coeffs)
    if kind == "C2":
        if s is not None and s != base.r // 2:
            raise ConstructionError(f"C2 fixes s = r/2 = {base.r // 2}, got s={s}")
        return build_c2(base, k, coeffs)
    raise ConstructionError(f"unknown construction {kind!r}")


def code_from_dict(doc: dict) -> ArrayCode:
    """Rebuild a code document and check its stored H against the rebuild."""
    try:
        base = BaseCode.from_dict(doc["base"])
        coeffs = CoefficientSet.from_dict(doc["coeffs"])
        code = build(doc["kind"], base, int(doc["k"]), int(doc["s"]), coeffs)
        stored = doc["H"]
    except KeyError as exc:
        raise ConstructionError(f"code document lacks {exc}") from exc
    if code.r != int(doc["r"]) or code.m != int(doc["m"]):
        raise ConstructionError("r/m in the code document disagree with its base")
    expected = {(e[0], e[1], e[2], e[3]): e[4] for e in code.to_dict()["H"]}
    got = {}
    for e in stored:
        i, j, a, b, text = e
        got[(int(i), int(j), int(a), int(b))] = BitMatrix.from_text(text).to_text()
    if got != expected:
        raise ConstructionError("stored H does not match the construction rule")
    return code


def save_code(code: ArrayCode, path: str | Path) -> None:
    Path(path).write_text(json.dumps(code.to_dict()))


def load_code(path: str | Path) -> ArrayCode:
    return code_from_dict(json.loads(Path(path).read_text()))
