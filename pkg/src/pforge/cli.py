"""pforge command line.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 internal error.
"""

import argparse
import json
import sys

from . import suites
from .algebra import Matrix
from .chains import DispatchError
from .cn import CapExceeded
from .exprio import ExprSyntaxError, ExprValueError, coerce, matrix_from_json
from .qforms import CongruenceError, FormError, pfister, verify_congruence

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_INTERNAL = 0, 1, 2, 3

VERIFY_KINDS = ("cn-steps", "m-record", "rank1", "theta", "norm-identity",
                "interchange", "scalar", "census", "sb-map", "nrd")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--seed", type=int, default=suites.DEFAULT_SEED)
    p.add_argument("--long", action="store_true", help="lift the size caps for slow checks")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="pforge", description="Exact verification of Pfister-form identities and split models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-cn", parents=[common], help="build and verify the level-n similarity matrix")
    p.add_argument("n", type=int)
    p.add_argument("--params", help="comma-separated parameter names (default a1,..,an)")

    p = sub.add_parser("verify", parents=[common], help="run one named verification")
    p.add_argument("kind", choices=VERIFY_KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--b", default="b")
    p.add_argument("--c", default="c")
    p.add_argument("--x0", help="comma-separated base point for the scalar chain")
    p.add_argument("--symbolic", action="store_true")
    p.add_argument("--trials", type=int, default=100)

    p = sub.add_parser("chain", parents=[common], help="dispatch one chain P-equivalence step")
    p.add_argument("--presentation", required=True, help="comma-separated a1,..,an")
    p.add_argument("--step", required=True, help="i,j")
    p.add_argument("--witness", required=True, help="JSON file with source, target and matrix")

    p = sub.add_parser("reproduce", parents=[common], help="run a fixture suite")
    p.add_argument("--suite", required=True, choices=sorted(suites.SUITES))
    return parser


def _split(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _load_witness(path, source):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        target = doc["target"]
        C = matrix_from_json(doc["matrix"])
        src = doc.get("source")
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read witness {path}: {exc}") from exc
    if src is not None and [coerce(a) for a in src] != [coerce(a) for a in source]:
        raise UsageError("witness source parameters differ from the presentation slots")
    if not isinstance(C, Matrix) or C.rows != 4 or C.cols != 4 or len(target) != 2:
        raise UsageError("witness must be a 4x4 matrix with two target parameters")
    return verify_congruence(C, pfister(source), pfister(target))


def _run(args):
    long, seed = args.long, args.seed
    if args.command == "build-cn":
        params = _split(args.params) if args.params else None
        return "build-cn", suites.run_build_cn(args.n, params, long)
    if args.command == "reproduce":
        return "reproduce", suites.run_suite(args.suite, long, seed)
    if args.command == "chain":
        pres = _split(args.presentation)
        try:
            i, j = (int(v) for v in _split(args.step))
        except ValueError:
            raise UsageError("--step must be i,j")
        if not (1 <= i < j <= len(pres)):
            raise UsageError(f"need 1 <= i < j <= {len(pres)}")
        witness = _load_witness(args.witness, [pres[i - 1], pres[j - 1]])
        return "chain", suites.run_dispatch(pres, i, j, witness, long)

    kind = args.kind

    def need(name, default):
        v = getattr(args, name)
        return default if v is None else v

    if kind == "cn-steps":
        res = suites.run_cn_steps(need("n", 2), long)
    elif kind == "m-record":
        res = suites.run_m_record(need("n", 2), long)
    elif kind == "rank1":
        res = suites.run_rank1(need("n", 3), args.symbolic, seed, args.trials)
    elif kind == "theta":
        res = suites.run_theta(need("n", 2), long)
    elif kind == "norm-identity":
        res = suites.run_norm_identity(need("n", 2), long)
    elif kind == "interchange":
        res = suites.run_interchange(args.dim, args.b, args.c, long)
    elif kind == "scalar":
        res = suites.run_scalar(args.dim, args.b, _split(args.x0) if args.x0 else None, long)
    elif kind == "census":
        res = suites.run_census(need("p", 3), long)
    elif kind == "sb-map":
        res = suites.run_sb_map(need("p", 3), long)
    else:
        res = suites.run_nrd(need("p", 3), seed, args.trials)
    return f"verify {kind}", res


def _text(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v) if not isinstance(v, str) else v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def _suite_table(result):
    rows = result["rows"]
    width = max(len(r["check"]) for r in rows)
    out = [f"suite {result['suite']}"]
    for r in rows:
        tag = "PASS" if r["passed"] else "FAIL"
        out.append(f"  {r['check']:<{width}}  {tag}" + (f"  {r['detail']}" if r["detail"] else ""))
    return out


def emit(doc, fmt, stream=None):
    stream = stream or sys.stdout
    if fmt == "json":
        stream.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return
    head = f"{doc['command']}: {'ok' if doc['ok'] else 'FAILED'}"
    body = []
    if "error" in doc:
        body = _text(doc["error"], 1)
    elif doc["command"] == "reproduce":
        body = _suite_table(doc["result"])
    else:
        body = _text(doc["result"], 1)
    stream.write("\n".join([head] + body) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    label = args.command if args.command != "verify" else f"verify {args.kind}"
    try:
        label, (ok, result) = _run(args)
        doc = {"command": label, "ok": bool(ok), "exit_code": EXIT_OK if ok else EXIT_FAIL, "result": result}
    except suites.FAILURES + (CongruenceError,) as exc:
        err = {"type": "verification", "message": str(exc)}
        check = getattr(exc, "check", None)
        if check:
            err["check"] = check
        entry = getattr(exc, "entry", None)
        if entry is not None:
            err["entry"] = [entry[0], entry[1]]
        doc = {"command": label, "ok": False, "exit_code": EXIT_FAIL, "error": err}
    except (UsageError, CapExceeded, DispatchError, FormError, ExprSyntaxError, ExprValueError, ValueError) as exc:
        doc = {"command": label, "ok": False, "exit_code": EXIT_USAGE,
               "error": {"type": "usage", "message": str(exc)}}
    except Exception as exc:  # noqa: BLE001 - reported as exit 3
        doc = {"command": label, "ok": False, "exit_code": EXIT_INTERNAL,
               "error": {"type": "internal", "message": f"{type(exc).__name__}: {exc}"}}
    emit(doc, args.format)
    return doc["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
