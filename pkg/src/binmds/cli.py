"""Command-line front end.

Exit codes: 0 success, 2 validation failure, 3 verification failure.
Errors are reported on stderr as a one-line JSON object.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from .basecode import BaseCodeError, evenodd_base, load_base, rs_companion_base
from .codec import (CodecError, column_bytes, encode, erasure_decode, is_mds,
                    join_payload, read_codewords, split_payload, write_codewords)
from .construct import (CoefficientSet, ConstructionError, build, load_code,
                        make_coefficients, save_code)
from .gf2 import GF2Error
from .repair import (REPORT_SCHEMA, PlanError, RepairError, bandwidth_report, download,
                     execute_plan, plan_repair)

EXIT_OK, EXIT_INVALID, EXIT_VERIFY = 0, 2, 3

log = logging.getLogger("binmds")


class VerificationFailure(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _digest(code, words, j: int) -> str:
    nb = column_bytes(code.l)
    h = hashlib.sha256()
    for w in words:
        h.update(w.columns[j].to_bytes(nb, "little"))
    return h.hexdigest()


def _base_for(args) -> object:
    source = args.base
    kind = args.construction.upper()
    if source.startswith("file:"):
        base = load_base(source[5:])
        if base.r != args.r or base.m != args.m:
            raise BaseCodeError(f"base file has r={base.r}, m={base.m}; "
                                f"asked for r={args.r}, m={args.m}")
        return base
    if args.K is not None:
        K = args.K
    elif kind == "C1":
        K = args.k
    else:
        s = args.r // 2
        K = 2 * s * ((args.k + args.r) // (s + 1)) - args.r
    if source == "rs":
        return rs_companion_base(K, args.r, args.m)
    if source == "evenodd":
        if args.r != 2:
            raise BaseCodeError("the EVENODD base has r = 2")
        return evenodd_base(args.m, K)
    raise BaseCodeError(f"unknown base {source!r}")


def _coeffs_for(args) -> CoefficientSet:
    if args.coeffs == "identity":
        return make_coefficients(args.m)
    if args.coeffs.startswith("file:"):
        coeffs = CoefficientSet.from_dict(json.loads(Path(args.coeffs[5:]).read_text()))
        if coeffs.m != args.m:
            raise ConstructionError(f"coefficient file is {coeffs.m}x{coeffs.m}, m={args.m}")
        return coeffs
    raise ConstructionError(f"unknown coefficient source {args.coeffs!r}")


def cmd_build(args) -> int:
    kind = args.construction.upper()
    code = build(kind, _base_for(args), args.k, args.s, _coeffs_for(args))
    save_code(code, args.out)
    print(f"built {kind} (n={code.n}, k={code.k}, l={code.l}) s={code.s} d={code.d} "
          f"base=({code.base.n},{code.base.K},{code.m}) -> {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    code = load_code(args.code)
    verdict = is_mds(code, jobs=args.jobs)
    if verdict.ok:
        print(f"pass: {verdict.checked} submatrices of size {verdict.expected_rank}, "
              f"all full rank")
        return EXIT_OK
    print(f"fail: columns {list(verdict.witness)} have rank {verdict.witness_rank} "
          f"< {verdict.expected_rank}")
    return EXIT_VERIFY


def cmd_encode(args) -> int:
    code = load_code(args.code)
    data = Path(args.data).read_bytes()
    words = [encode(code, info) for info in split_payload(code, data)]
    write_codewords(args.out, words, len(data))
    print(f"encoded {len(data)} bytes into {len(words)} stripe(s) of "
          f"{code.n} x {code.l} bits -> {args.out}")
    return EXIT_OK


def cmd_decode(args) -> int:
    code = load_code(args.code)
    words, payload_len = read_codewords(args.codeword, code)
    erased = sorted(set(args.erase or []))
    recovered = []
    for w in words:
        cols = [None if j in erased else c for j, c in enumerate(w.columns)]
        recovered.append(erasure_decode(code, cols))
    for j in erased:
        status = "ok" if all(a.columns[j] == b.columns[j]
                             for a, b in zip(recovered, words)) else "MISMATCH"
        print(f"column {j} sha256 {_digest(code, recovered, j)} {status}")
    if args.out:
        Path(args.out).write_bytes(join_payload(code, recovered, payload_len))
        print(f"wrote {payload_len} bytes -> {args.out}")
    return EXIT_OK


def cmd_repair(args) -> int:
    code = load_code(args.code)
    words, _ = read_codewords(args.codeword, code)
    plan = plan_repair(code, args.fail, args.helpers)
    columns = []
    for w in words:
        columns.append(execute_plan(code, plan, download(w, plan)))
    nb = column_bytes(code.l)
    h = hashlib.sha256()
    for c in columns:
        h.update(c.to_bytes(nb, "little"))
    match = all(c == w.columns[args.fail] for c, w in zip(columns, words))
    print(f"node {args.fail} (group {plan.v}, position {plan.u}) mode={plan.mode}")
    print(f"helpers {list(plan.helpers)} designated {list(plan.designated)}")
    print(f"bits downloaded {plan.bits_downloaded} accessed {plan.bits_accessed} "
          f"per stripe; lower bound {code.d * code.l // (code.d - code.k + 1)}")
    print(f"column {args.fail} sha256 {h.hexdigest()} {'ok' if match else 'MISMATCH'}")
    if not match:
        raise VerificationFailure(f"repaired column {args.fail} differs from the stored one")
    return EXIT_OK


def _table(report) -> str:
    head = ["node", "v", "u", "helpers", "downloaded", "accessed", "recovered", "oracle"]
    rows = [[str(n.node), str(n.v), str(n.u), ",".join(map(str, n.helpers)),
             str(n.bits_downloaded), str(n.bits_accessed),
             "yes" if n.recovered else "NO", "yes" if n.oracle_match else "NO"]
            for n in report.per_node]
    widths = [max(len(h), *(len(r[c]) for r in rows)) for c, h in enumerate(head)]
    fmt = "  ".join(f"{{:>{w}}}" for w in widths)
    lines = [f"{report.kind} (n={report.k + report.r}, k={report.k}, l={report.l}) "
             f"s={report.s} d={report.d} seed={report.seed}",
             fmt.format(*head), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*r) for r in rows]
    lines.append(f"lower bound dl/(d-k+1) = {report.lower_bound}")
    lines.append(f"average accessed = {report.average_accessed} "
                 f"(expected {report.expected_average_accessed()})")
    for name, ok in report.verdicts().items():
        lines.append(f"{name}: {'pass' if ok else 'FAIL'}")
    return "\n".join(lines)


def cmd_report(args) -> int:
    code = load_code(args.code)
    report = bandwidth_report(code, seed=args.seed, jobs=args.jobs)
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=1))
    else:
        print(_table(report))
    if args.plot:
        from .plotting import plot_report
        plot_report(report, args.plot)
        print(f"figure -> {args.plot}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_schema(args) -> int:
    print(json.dumps(REPORT_SCHEMA, indent=1))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="binmds", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct a C1 or C2 code and save it as JSON")
    b.add_argument("--construction", choices=["c1", "c2", "C1", "C2"], required=True)
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--r", type=int, required=True)
    b.add_argument("--s", type=int)
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--K", type=int, help="information nodes of the base code")
    b.add_argument("--base", default="rs", help="rs | evenodd | file:<path>")
    b.add_argument("--coeffs", default="identity", help="identity | file:<path>")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify-mds", help="exhaustive MDS rank check")
    v.add_argument("--code", required=True)
    v.add_argument("--jobs", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("encode", help="encode a file into codeword stripes")
    e.add_argument("--code", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_encode)

    d = sub.add_parser("decode", help="erasure-decode stripes and restore the payload")
    d.add_argument("--code", required=True)
    d.add_argument("--codeword", required=True)
    d.add_argument("--erase", type=_int_list, default=[])
    d.add_argument("--out")
    d.set_defaults(func=cmd_decode)

    r = sub.add_parser("repair", help="repair one node from its helpers")
    r.add_argument("--code", required=True)
    r.add_argument("--codeword", required=True)
    r.add_argument("--fail", type=int, required=True)
    r.add_argument("--helpers", type=_int_list, help="free helpers, comma separated")
    r.set_defaults(func=cmd_repair)

    rp = sub.add_parser("report", help="repair every node and tally bandwidth")
    rp.add_argument("--code", required=True)
    rp.add_argument("--format", choices=["table", "json"], default="table")
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("--jobs", type=int, default=1)
    rp.add_argument("--plot", help="also write a bar chart to this path")
    rp.set_defaults(func=cmd_report)

    sc = sub.add_parser("schema", help="print the JSON schema of report --format json")
    sc.set_defaults(func=cmd_schema)
    return p


def _fail(kind: str, exc: BaseException, code: int) -> int:
    print(json.dumps({"error": kind, "message": str(exc)}), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except VerificationFailure as exc:
        return _fail("verification", exc, EXIT_VERIFY)
    except PlanError as exc:
        return _fail("validation", exc, EXIT_INVALID)
    except RepairError as exc:
        return _fail("verification", exc, EXIT_VERIFY)
    except (ConstructionError, BaseCodeError, CodecError, GF2Error, IndexError,
            OSError, json.JSONDecodeError) as exc:
        return _fail("validation", exc, EXIT_INVALID)


if __name__ == "__main__":
    sys.exit(main())
