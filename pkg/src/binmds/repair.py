"""Single-node repair with exact access/download accounting.

A repair is split into the helper side (:func:`download`, which reads chunks
and possibly XORs them before sending) and the newcomer side
(:func:`execute_plan`, which only ever sees the downloaded payload).
"""

from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from . import indexing
from .codec import Codeword, erasure_decode, random_codeword
from .construct import ArrayCode
from .gf2 import BitMatrix, GF2Error, solve

log = logging.getLogger(__name__)

ACCESS = "access"   # helper sends raw chunks {c_{t,a} : a_v = u}
SUMMED = "summed"   # helper sends sum_i c_{t, a(v,i)} for every a with a_v = 0


class RepairError(RuntimeError):
    pass


class PlanError(RepairError, ValueError):
    """Invalid helper choice or a plan that does not fit the code."""


@dataclass(frozen=True)
class RepairPlan:
    kind: str
    failed: int
    v: int
    u: int
    mode: str
    designated: tuple[int, ...]
    free: tuple[int, ...]
    requests: Mapping[int, tuple[int, ...]] = field(repr=False)
    m: int = 0
    s: int = 1

    @property
    def helpers(self) -> tuple[int, ...]:
        return tuple(sorted(self.requests))

    def chunks_read(self, t: int) -> int:
        return len(self.requests[t]) * (self.s if self.mode == SUMMED else 1)

    @property
    def bits_downloaded(self) -> int:
        return sum(len(rows) for rows in self.requests.values()) * self.m

    @property
    def bits_accessed(self) -> int:
        return sum(self.chunks_read(t) for t in self.requests) * self.m


def _rows_with_digit(code: ArrayCode, v: int, u: int) -> tuple[int, ...]:
    return tuple(a for a in range(code.l_prime) if code.digit(a, v) == u)


def _pick_free(code: ArrayCode, j: int, pool: set[int],
               free_helpers: Iterable[int] | None) -> tuple[int, ...]:
    if free_helpers is None:
        return tuple(sorted(pool)[:code.k])
    free = tuple(sorted(set(free_helpers)))
    if len(free) != code.k:
        raise PlanError(f"need exactly k={code.k} distinct free helpers, got {free}")
    bad = [t for t in free if t not in pool]
    if bad:
        raise PlanError(f"free helpers {bad} for node {j} are not in the free pool "
                        f"{sorted(pool)}")
    return free


def plan_repair_c1(code: ArrayCode, j: int,
                   free_helpers: Iterable[int] | None = None) -> RepairPlan:
    if code.kind != "C1":
        raise PlanError("plan_repair_c1 needs a C1 code")
    v, u = code.locate(j)
    group = {indexing.sigma(v * code.s + w, code.n) for w in range(code.s)}
    pool = set(range(code.n)) - group
    free = _pick_free(code, j, pool, free_helpers)
    designated = tuple(sorted(group - {j}))
    rows = _rows_with_digit(code, v, u)
    requests = {t: rows for t in designated + free}
    return RepairPlan("C1", j, v, u, ACCESS, designated, free, requests, code.m, code.s)


def plan_repair_c2(code: ArrayCode, j: int,
                   free_helpers: Iterable[int] | None = None) -> RepairPlan:
    if code.kind != "C2":
        raise PlanError("plan_repair_c2 needs a C2 code")
    v, u = code.locate(j)
    s = code.s
    if u == s:
        if free_helpers is not None:
            raise PlanError(f"helpers of node {j} are fixed (last node of its group)")
        group = {v * (s + 1) + w for w in range(s + 1)}
        outside = tuple(t for t in range(code.n) if t not in group)
        rows = _rows_with_digit(code, v, 0)
        requests = {t: rows for t in outside}
        return RepairPlan("C2", j, v, u, SUMMED, (), outside, requests, code.m, s)
    group = {v * (s + 1) + w for w in range(s)}
    pool = set(range(code.n)) - group
    free = _pick_free(code, j, pool, free_helpers)
    designated = tuple(sorted(group - {j}))
    rows = _rows_with_digit(code, v, u)
    requests = {t: rows for t in designated + free}
    return RepairPlan("C2", j, v, u, ACCESS, designated, free, requests, code.m, s)


def plan_repair(code: ArrayCode, j: int,
                free_helpers: Iterable[int] | None = None) -> RepairPlan:
    if code.kind == "C1":
        return plan_repair_c1(code, j, free_helpers)
    return plan_repair_c2(code, j, free_helpers)


def free_pool(code: ArrayCode, j: int) -> tuple[int, ...]:
    """Nodes eligible as free helpers for node ``j`` (empty if helpers are fixed)."""
    v, u = code.locate(j)
    if code.kind == "C1":
        group = {indexing.sigma(v * code.s + w, code.n) for w in range(code.s)}
    elif u == code.s:
        return ()
    else:
        group = {v * (code.s + 1) + w for w in range(code.s)}
    return tuple(t for t in range(code.n) if t not in group)


def download(codeword: Codeword, plan: RepairPlan) -> dict[int, dict[int, int]]:
    """What each helper sends: ``{helper: {row index: m-bit value}}``."""
    code = codeword.code
    out = {}
    for t, rows in plan.requests.items():
        if t == plan.failed:
            raise PlanError("the failed node cannot be a helper")
        if plan.mode == ACCESS:
            out[t] = {a: codeword.chunk(t, a) for a in rows}
        else:
            sent = {}
            for a in rows:
                acc = 0
                for i in range(code.s):
                    acc ^= codeword.chunk(t, code.replace(a, plan.v, i))
                sent[a] = acc
            out[t] = sent
    return out


def _base_system(code: ArrayCode, cols: list[int]) -> BitMatrix:
    m = code.m
    rows = []
    for i in range(code.r):
        blocks = [code.base.block(i, p).rows for p in cols]
        for x in range(m):
            acc = 0
            for pos, blk in enumerate(blocks):
                acc |= blk[x] << (pos * m)
            rows.append(acc)
    return BitMatrix(code.r * m, len(cols) * m, tuple(rows))


def _solve_grouped(code: ArrayCode, groups: dict[int, list], rhs: list[int]) -> dict[int, int]:
    """Solve ``sum_p A_{i,p} x_p = rhs_i`` for the grouped unknowns ``x_p``."""
    cols = sorted(groups)
    system = _base_system(code, cols)
    m = code.m
    vec = 0
    for i, val in enumerate(rhs):
        vec |= val << (i * m)
    try:
        sol = solve(system, vec)
    except GF2Error as exc:
        raise RepairError(f"inconsistent repair system on base columns {cols}") from exc
    if not sol.unique:
        raise RepairError(f"singular repair system on base columns {cols}")
    mask = (1 << m) - 1
    return {p: (sol.x >> (pos * m)) & mask for pos, p in enumerate(cols)}


def _solve_access(code: ArrayCode, plan: RepairPlan,
                  downloads: Mapping[int, Mapping[int, int]]) -> int:
    """Row-by-row repair from raw chunks.

    Each row ``a`` with ``a_v = u`` yields ``r`` block equations.  Unknown terms
    (chunks of the failed node and of non-helper nodes) are grouped by the base
    column they multiply; a row is solvable once at most ``r`` base columns
    remain.  A group holding a single chunk pins that chunk down, which may in
    turn unlock other rows.  When ``s = r`` every row is solvable at once.
    """
    j, r = plan.failed, code.r
    known: dict[tuple[int, int], int] = {}
    for t, sent in downloads.items():
        for a, val in sent.items():
            known[(t, a)] = val
    rows = _rows_with_digit(code, plan.v, plan.u)
    terms = {a: [(t, b, p, tag) for t in range(code.n) for b, p, tag in code.pattern[t][a]]
             for a in rows}
    missing = {(j, b) for b in range(code.l_prime)}

    def unknown_columns(a):
        return {p for t, b, p, _ in terms[a] if (t, b) not in known}

    pending = set(rows)
    starting = sum(1 for a in rows if len(unknown_columns(a)) <= r)
    passes = 0
    while missing - known.keys():
        passes += 1
        progress = False
        for a in sorted(pending, key=lambda a: (len(unknown_columns(a)), a)):
            groups: dict[int, list] = {}
            rhs = [0] * r
            for t, b, p, tag in terms[a]:
                val = known.get((t, b))
                if val is None:
                    groups.setdefault(p, []).append((tag, (t, b)))
                elif val:
                    for i in range(r):
                        rhs[i] ^= code.product(i, p, tag).apply(val)
            if len(groups) > r:
                continue
            if groups:
                values = _solve_grouped(code, groups, rhs)
                for p, members in groups.items():
                    if len(members) == 1:
                        tag, var = members[0]
                        val = values[p]
                        known[var] = val if tag == "I" else code.psi_inverse(tag).apply(val)
                        progress = True
            if all(len(mem) == 1 for mem in groups.values()):
                pending.discard(a)
        if not progress and missing - known.keys():
            raise RepairError(f"repair of node {j} stalled: no solvable row among "
                              f"{len(pending)} pending rows")
    log.debug("node %d: %d starting rows, %d passes", j, starting, passes)
    return _assemble(code, j, known)


def _solve_summed(code: ArrayCode, plan: RepairPlan,
                  downloads: Mapping[int, Mapping[int, int]]) -> int:
    """Repair from per-helper sums over digit ``v``.

    For each ``a`` with ``a_v = 0`` the block rows ``a(v,0) .. a(v,s-1)`` are
    added.  Helper terms then collapse onto downloaded sums, and the remaining
    unknowns span ``2s = r`` base columns: ``s`` for the failed node and ``s``
    for the other members of its group.
    """
    j, v, s, r = plan.failed, plan.v, code.s, code.r
    helpers = set(downloads)
    known: dict[tuple[int, int], int] = {}
    for a in _rows_with_digit(code, v, 0):
        rhs = [0] * r
        groups: dict[int, list] = {}
        collapsed: dict[tuple[int, int, int, str], set[int]] = {}
        for i_digit in range(s):
            row = code.replace(a, v, i_digit)
            for t in range(code.n):
                for b, p, tag in code.pattern[t][row]:
                    if t in helpers:
                        key = (t, code.replace(b, v, 0), p, tag)
                        collapsed.setdefault(key, set()).add(code.digit(b, v))
                    else:
                        groups.setdefault(p, []).append((tag, (t, b)))
        for (t, b0, p, tag), seen in collapsed.items():
            if seen != set(range(s)):
                raise RepairError(f"helper {t} terms do not collapse onto sums at row {a}")
            val = downloads[t][b0]
            if val:
                for i in range(r):
                    rhs[i] ^= code.product(i, p, tag).apply(val)
        if len(groups) > r:
            raise RepairError(f"row {a}: {len(groups)} unknown base columns exceed r={r}")
        values = _solve_grouped(code, groups, rhs)
        for p, members in groups.items():
            if len(members) == 1 and members[0][1][0] == j:
                tag, var = members[0]
                known[var] = values[p] if tag == "I" else code.psi_inverse(tag).apply(values[p])
    if len(known) != code.l_prime:
        raise RepairError(f"summed repair of node {j} recovered {len(known)} of "
                          f"{code.l_prime} chunks")
    return _assemble(code, j, known)


def _assemble(code: ArrayCode, j: int, known: Mapping[tuple[int, int], int]) -> int:
    col = 0
    for b in range(code.l_prime):
        col |= known[(j, b)] << (b * code.m)
    return col


def execute_plan(code: ArrayCode, plan: RepairPlan,
                 downloads: Mapping[int, Mapping[int, int]]) -> int:
    """Rebuild the failed column from downloaded data only."""
    if set(downloads) != set(plan.requests):
        raise PlanError("downloads do not match the plan's helper set")
    if plan.mode == ACCESS:
        return _solve_access(code, plan, downloads)
    return _solve_summed(code, plan, downloads)


def execute_repair(codeword: Codeword, plan: RepairPlan) -> int:
    return execute_plan(codeword.code, plan, download(codeword, plan))


def execute_repair_c1(codeword: Codeword, plan: RepairPlan) -> int:
    if plan.kind != "C1":
        raise PlanError("not a C1 plan")
    return execute_repair(codeword, plan)


def execute_repair_c2(codeword: Codeword, plan: RepairPlan) -> int:
    if plan.kind != "C2":
        raise PlanError("not a C2 plan")
    return execute_repair(codeword, plan)


# -- reporting ---------------------------------------------------------------

@dataclass(frozen=True)
class NodeReport:
    node: int
    v: int
    u: int
    helpers: tuple[int, ...]
    bits_downloaded: int
    bits_accessed: int
    recovered: bool
    oracle_match: bool

    @property
    def helper_count(self) -> int:
        return len(self.helpers)


@dataclass(frozen=True)
class BandwidthReport:
    kind: str
    k: int
    r: int
    s: int
    m: int
    l: int
    d: int
    seed: int
    per_node: tuple[NodeReport, ...]

    @property
    def lower_bound(self) -> Fraction:
        return Fraction(self.d * self.l, self.d - self.k + 1)

    @property
    def average_accessed(self) -> Fraction:
        return Fraction(sum(n.bits_accessed for n in self.per_node), len(self.per_node))

    def expected_average_accessed(self) -> Fraction:
        if self.kind == "C1":
            return self.lower_bound
        return Fraction(2 * self.s, self.s + 1) * self.lower_bound

    def verdicts(self) -> dict[str, bool]:
        lb = self.lower_bound
        optimal_access = [n for n in self.per_node
                          if self.kind == "C1" or n.u < self.s]
        return {
            "allRecovered": all(n.recovered for n in self.per_node),
            "oracleEquivalent": all(n.oracle_match for n in self.per_node),
            "downloadOptimal": all(n.bits_downloaded == lb for n in self.per_node),
            "accessOptimal": all(n.bits_accessed == n.bits_downloaded
                                 for n in optimal_access),
            "helperCount": all(n.helper_count == self.d for n in self.per_node),
            "averageAccessed": self.average_accessed == self.expected_average_accessed(),
        }

    @property
    def ok(self) -> bool:
        return all(self.verdicts().values())

    def to_dict(self) -> dict:
        return {
            "code": {"kind": self.kind, "k": self.k, "r": self.r, "s": self.s,
                     "m": self.m, "l": self.l, "d": self.d, "n": self.k + self.r},
            "seed": self.seed,
            "nodes": [{"node": n.node, "group": n.v, "position": n.u,
                       "helpers": list(n.helpers),
                       "bitsDownloaded": n.bits_downloaded,
                       "bitsAccessed": n.bits_accessed,
                       "recovered": n.recovered, "oracleMatch": n.oracle_match}
                      for n in self.per_node],
            "lowerBound": _number(self.lower_bound),
            "averageAccessed": _number(self.average_accessed),
            "verdicts": self.verdicts(),
        }


def _number(x: Fraction) -> int | float:
    return int(x) if x.denominator == 1 else float(x)


REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["code", "seed", "nodes", "lowerBound", "averageAccessed", "verdicts"],
    "properties": {
        "code": {
            "type": "object",
            "required": ["kind", "k", "r", "s", "m", "l", "d", "n"],
            "properties": {
                "kind": {"enum": ["C1", "C2"]},
                **{key: {"type": "integer", "minimum": 1}
                   for key in ("k", "r", "s", "m", "l", "d", "n")},
            },
        },
        "seed": {"type": "integer"},
        "nodes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["node", "helpers", "bitsDownloaded", "bitsAccessed",
                             "recovered", "oracleMatch"],
                "properties": {
                    "node": {"type": "integer", "minimum": 0},
                    "group": {"type": "integer", "minimum": 0},
                    "position": {"type": "integer", "minimum": 0},
                    "helpers": {"type": "array", "items": {"type": "integer"}},
                    "bitsDownloaded": {"type": "integer", "minimum": 0},
                    "bitsAccessed": {"type": "integer", "minimum": 0},
                    "recovered": {"type": "boolean"},
                    "oracleMatch": {"type": "boolean"},
                },
            },
        },
        "lowerBound": {"type": "number"},
        "averageAccessed": {"type": "number"},
        "verdicts": {"type": "object", "additionalProperties": {"type": "boolean"}},
    },
}


def _repair_node(code: ArrayCode, word: Codeword, j: int) -> NodeReport:
    plan = plan_repair(code, j)
    try:
        column = execute_repair(word, plan)
    except RepairError:
        log.exception("repair of node %d failed", j)
        column = None
    oracle = erasure_decode(code, word.columns, erased=[j]).columns[j]
    return NodeReport(j, plan.v, plan.u, plan.helpers, plan.bits_downloaded,
                      plan.bits_accessed, column == word.columns[j], column == oracle)


def _repair_node_star(args):
    return _repair_node(*args)


def bandwidth_report(code: ArrayCode, seed: int = 0, jobs: int = 1) -> BandwidthReport:
    """Repair every node of a random codeword and tally exact bit counts."""
    word = random_codeword(code, random.Random(seed))
    tasks = [(code, word, j) for j in range(code.n)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            nodes = tuple(pool.map(_repair_node_star, tasks))
    else:
        nodes = tuple(_repair_node(*t) for t in tasks)
    return BandwidthReport(code.kind, code.k, code.r, code.s, code.m, code.l, code.d,
                           seed, nodes)
