"""``permascale`` command-line interface.

Exit codes: 0 success, 1 input error, 2 numerical failure, 3 cap exceeded.
Errors are reported as a JSON object on stderr.
"""
import argparse
import json
import sys


from . import experiments, io, pattern
from .dynamics import IntervalMap
from .errors import CapExceeded, InternalError, MaxIterExceeded, PermascaleError
from .permanent import permanent, permanental_mean
from .scaling import scaling_mean, sinkhorn

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text):
    return [int(tok) for tok in text.split(",") if tok]


def _point(text):
    return None if text == "random" else float(text)


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--cap-n", type=int, default=26)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default=None)
    return p


def build_parser():
    common = _common()
    parser = _Parser(prog="permascale", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, help_ in [
        ("per", "permanent of a matrix file"),
        ("pmean", "permanental mean"),
        ("smean", "scaling mean"),
        ("sinkhorn", "Sinkhorn decomposition A = D S E"),
        ("pi", "projection onto entries lying on positive diagonals"),
    ]:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("matrix", help="matrix file ('-' for stdin)")

    p = sub.add_parser("friedland", parents=[common], help="pmean(A kron U_m) -> smean(A)")
    p.add_argument("matrix")
    p.add_argument("--m-max", type=int, required=True)

    p = sub.add_parser("llp", parents=[common], help="permanental means of dynamical matrices")
    p.add_argument("--f", dest="fname", required=True, help="catalog function, e.g. smooth")
    p.add_argument("--T", dest="tmap", default="rotation")
    p.add_argument("--S", dest="smap", default="rotation:0.7320508075688772")
    p.add_argument("--x0", type=_point, default=None)
    p.add_argument("--y0", type=_point, default=None)
    p.add_argument("--n", dest="n_list", type=_int_list, default=[6, 10, 14, 18, 22])
    p.add_argument("--k-grid", type=int, default=64)
    p.add_argument("--timing", action="store_true", help="append a wall_ms column")

    p = sub.add_parser("hs", parents=[common], help="symmetric means along a rotation orbit")
    p.add_argument("--g", dest="gname", required=True, help="catalog function, e.g. exp-sin")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--x0", type=_point, default=None)
    p.add_argument("--timing", action="store_true")

    p = sub.add_parser("fuzz", parents=[common], help="randomized bound/conjecture checks")
    p.add_argument("target", choices=["vdw", "brualdi", "conj2"])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--n", type=int, default=None)
    return parser


def _load(path):
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    return io.parse_matrix(text)


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _oneshot(args):
    A = _load(args.matrix)
    if args.command == "per":
        lp = permanent(A, cap=args.cap_n)
        return {"per": lp.value, "log_per": None if lp.is_zero else lp.log_value, "is_zero": lp.is_zero}
    if args.command == "pmean":
        return {"pmean": permanental_mean(A, cap=args.cap_n)}
    if args.command == "smean":
        return {"smean": scaling_mean(A, tol=args.tol, max_iter=args.max_iter)}
    if args.command == "sinkhorn":
        fac = sinkhorn(A, tol=args.tol, max_iter=args.max_iter)
        return {
            "d": fac.d.tolist(),
            "e": fac.e.tolist(),
            "s": fac.s.tolist(),
            "iterations": fac.iterations,
            "residual": fac.residual,
            "certificate": fac.certificate,
        }
    projected, report = pattern.pi_projection(A)
    return {
        "pi": projected.tolist(),
        "in_Pn": report.in_Pn,
        "has_positive_diagonal": report.has_positive_diagonal,
        "blocks": [[list(r), list(c)] for r, c in report.blocks],
        "fk_witness": None
        if report.fk_witness is None
        else [sorted(report.fk_witness[0]), sorted(report.fk_witness[1])],
    }


def _records_csv(header, records, timing):
    if timing:
        header = header + ["wall_ms"]
    rows = []
    for rec, extra in records:
        row = list(extra)
        if timing:
            row.append(rec.wall_ms)
        rows.append(row)
    return io.format_csv(header, rows)


def _render(args):
    cmd = args.command
    fmt = args.format
    if cmd in ("per", "pmean", "smean", "sinkhorn", "pi"):
        obj = _oneshot(args)
        if fmt == "csv":
            scalars = {k: v for k, v in obj.items() if not isinstance(v, list)}
            return io.format_csv(list(scalars), [list(scalars.values())])
        return _json(obj)

    if cmd == "friedland":
        recs = experiments.friedland(_load(args.matrix), args.m_max, cap=args.cap_n, tol=args.tol)
        if fmt == "json":
            return _json([{"m": r.n, "pmean_kron": r.value_a, "smean_A": r.value_b, "abs_err": r.abs_err} for r in recs])
        return io.format_csv(
            ["m", "pmean_kron", "smean_A", "abs_err"],
            [[r.n, r.value_a, r.value_b, r.abs_err] for r in recs],
        )

    if cmd == "llp":
        res = experiments.llp(
            args.fname,
            args.n_list,
            T=IntervalMap.parse(args.tmap),
            S=IntervalMap.parse(args.smap),
            x0=args.x0,
            y0=args.y0,
            k_grid=args.k_grid,
            seed=args.seed,
            cap=args.cap_n,
            tol=args.tol,
        )
        header = ["n", "pmean_Dn", "smean_f", "abs_err", "smean_f_refined"]
        recs = [(r, [r.n, r.value_a, r.value_b, r.abs_err, res.smean_refined]) for r in res.records]
        if fmt == "json":
            return _json({"x0": res.x0, "y0": res.y0, "rows": [dict(zip(header, row)) for _, row in recs]})
        return _records_csv(header, recs, args.timing)

    if cmd == "hs":
        if args.n > 10**6:
            raise ValueError("n must be <= 10**6")
        r = experiments.hs(args.gname, args.c, args.n, seed=args.seed, x0=args.x0)
        header = ["n", "sym_k_empirical", "hs_formula", "rel_err"]
        row = [r.n, r.value_a, r.value_b, r.rel_err]
        if fmt == "json":
            return _json(dict(zip(header, row)))
        return _records_csv(header, [(r, row)], args.timing)

    n = args.n if args.n is not None else {"vdw": 6, "brualdi": 3, "conj2": 12}[args.target]
    summary, rows = experiments.fuzz(args.target, args.trials, n, seed=args.seed, tol=args.tol, cap=args.cap_n)
    if fmt == "csv":
        header = list(rows[0]) if rows else ["trial", "n"]
        text = io.format_csv(header, [[row[h] for h in header] for row in rows])
    else:
        text = _json(summary)
    if args.target == "vdw" and summary["violations"]:
        raise _Violation(text, f"{len(summary['violations'])} vdW bound violation(s)")
    return text


class _Violation(Exception):
    def __init__(self, text, message):
        super().__init__(message)
        self.text = text


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _fail(code, exc):
    err = {"error": {"type": type(exc).__name__, "message": str(exc), "exit_code": code}}
    sys.stderr.write(json.dumps(err) + "\n")
    return code


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail(EXIT_INPUT, exc)
    try:
        text = _render(args)
    except _Violation as exc:
        _emit(exc.text, args.out)
        return _fail(EXIT_NUMERIC, exc)
    except CapExceeded as exc:
        return _fail(EXIT_CAP, exc)
    except (MaxIterExceeded, InternalError) as exc:
        return _fail(EXIT_NUMERIC, exc)
    except (PermascaleError, ValueError, OSError) as exc:
        return _fail(EXIT_INPUT, exc)
    _emit(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
