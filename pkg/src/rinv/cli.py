"""Command-line front end.

Subcommands: select (run + certify), verify (recheck a certificate),
oracle (exhaustive comparison), gen (emit a random tight frame), bench
(barrier selection vs. random subsets). Matrices travel as Matrix Market
files; certificates as JSON; step traces as JSON lines. Indices are
1-based in all user-facing output.

Exit codes: 0 success, 1 usage or I/O error, 2 certificate failure.
"""

import argparse
import json
import statistics
import sys

import numpy as np
from scipy.io import mmread, mmwrite

from .certificate import verify
from .decomposition import Decomposition, Mode, random_tight_frame, validate
from .errors import RinvError
from .oracle import compare_to_guarantee
from .selector import PIVOT_FIRST, PIVOT_GREEDY, run_selection
from .tolerances import default_tolerances

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CERT_FAIL = 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _read_matrix(path):
    try:
        M = mmread(path)
    except Exception as exc:
        raise RinvError(f"cannot parse Matrix Market file {path}: {exc}") from exc
    if hasattr(M, "toarray"):
        M = M.toarray()
    return np.asarray(M, dtype=float)


def _load_decomposition(args):
    L = _read_matrix(args.L)
    mode = Mode.CLASSICAL_COLUMNS if args.mode == "columns" else Mode.FRAME
    if args.V is not None:
        V = _read_matrix(args.V)
    else:
        if L.ndim != 2 or L.shape[0] != L.shape[1]:
            raise RinvError(f"L must be square, got shape {L.shape}")
        V = np.eye(L.shape[0])
    return validate(Decomposition(L=L, V=V, mode=mode), default_tolerances())


def _check_epsilon(parser, epsilon):
    if not (0.0 < epsilon < 1.0):
        parser.error(f"--epsilon must be in (0, 1), got {epsilon}")


def _emit(payload: dict, output=None):
    text = json.dumps(payload, indent=2) + "\n"
    sys.stdout.write(text)
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _cmd_select(parser, args):
    _check_epsilon(parser, args.epsilon)
    dec = _load_decomposition(args)
    result = run_selection(dec, args.epsilon, pivot_rule=args.pivot)
    cert = verify(dec, args.epsilon, result.sigma)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8", newline="\n") as fh:
            for tr in result.traces:
                fh.write(json.dumps(tr.to_dict()) + "\n")
    _emit(cert.to_json_dict(), args.output)
    return EXIT_OK if cert.passes else EXIT_CERT_FAIL


def _cmd_verify(parser, args):
    dec = _load_decomposition(args)
    try:
        with open(args.certificate, encoding="utf-8") as fh:
            stored = json.load(fh)
    except (OSError, ValueError) as exc:
        raise RinvError(f"cannot read certificate {args.certificate}: {exc}") from exc
    sigma = [int(i) - 1 for i in stored.get("sigma", [])]
    cert = verify(dec, float(stored["epsilon"]), sigma)
    match = bool(stored.get("passes")) == cert.passes
    _emit(
        {
            "stored_passes": bool(stored.get("passes")),
            "recomputed_passes": cert.passes,
            "match": match,
            "recomputed": cert.to_json_dict(),
        },
        args.output,
    )
    return EXIT_OK if match and cert.passes else EXIT_CERT_FAIL


def _cmd_oracle(parser, args):
    _check_epsilon(parser, args.epsilon)
    dec = _load_decomposition(args)
    report = compare_to_guarantee(dec, args.epsilon, pivot_rule=args.pivot)
    _emit(report.to_json_dict(), args.output)
    return EXIT_OK


def _cmd_gen(parser, args):
    if args.m < args.n:
        parser.error(f"--m must be at least --n (got m={args.m}, n={args.n})")
    V = random_tight_frame(args.n, args.m, args.seed)
    mmwrite(args.output, V, precision=17)
    return EXIT_OK


def _cmd_bench(parser, args):
    _check_epsilon(parser, args.epsilon)
    dec = _load_decomposition(args)
    result = run_selection(dec, args.epsilon, pivot_rule=args.pivot)
    cert = verify(dec, args.epsilon, result.sigma)
    t = len(result.sigma)
    rng = np.random.default_rng(args.seed)
    random_vals = []
    for _ in range(args.trials):
        if t == 0:
            break
        subset = sorted(rng.choice(dec.m, size=t, replace=False).tolist())
        random_vals.append(verify(dec, args.epsilon, subset).lambda_min)
    payload = {
        "t": t,
        "bound": cert.guarantee_bound,
        "barrier_lambda": None if t == 0 else cert.lambda_min,
        "random_trials": len(random_vals),
        "random_lambda_min": min(random_vals) if random_vals else None,
        "random_lambda_median": statistics.median(random_vals) if random_vals else None,
        "random_lambda_max": max(random_vals) if random_vals else None,
        "random_above_bound": sum(v > cert.guarantee_bound for v in random_vals),
        "vacuous": result.vacuous,
    }
    _emit(payload, args.output)
    return EXIT_OK


def _build_parser():
    parser = _Parser(prog="rinv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_instance_flags(p, need_epsilon=True):
        p.add_argument("--L", required=True, help="Matrix Market file with the operator L")
        p.add_argument("--V", help="Matrix Market m x n array, row i is v_i (default: standard basis)")
        p.add_argument("--mode", choices=["frame", "columns"], default="frame")
        if need_epsilon:
            p.add_argument("--epsilon", type=float, required=True)
        p.add_argument("--pivot", choices=[PIVOT_FIRST, PIVOT_GREEDY], default=PIVOT_FIRST)
        p.add_argument("--output", help="also write the JSON result to this path")

    p = sub.add_parser("select", help="run the barrier selection and certify the result")
    add_instance_flags(p)
    p.add_argument("--trace", help="write per-step diagnostics as JSON lines to this path")
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("verify", help="recheck a stored JSON certificate")
    add_instance_flags(p, need_epsilon=False)
    p.add_argument("--certificate", required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("oracle", help="compare the selection to the exhaustive optimum")
    add_instance_flags(p)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("gen", help="emit a random tight-frame instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="Matrix Market output path for V")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="barrier selection vs. random same-size subsets")
    add_instance_flags(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(parser, args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except RinvError as exc:
        sys.stderr.write(f"rinv: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"rinv: i/o error: {exc}\n")
        return EXIT_USAGE


def console_main() -> None:
    raise SystemExit(main())
