"""Command-line interface: ``lvs <command> ...``.

Exit codes: 0 on success, 1 when an acceptance criterion fails, 2 on usage
or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings

import numpy as np

from .acceptance import SUITES, run_acceptance_suite
from .errors import LvsError
from .instances import KINDS, InstanceSpec, generate_instance
from .io import check_quantum_size, load_matrix, load_vector, save_matrix, save_vector
from .linalg import col_leverage_scores, ridge_row_scores, row_leverage_scores, svd
from .rng import make_rng
from .sampling import (
    approx_leverage_scores_sketched,
    approx_ridge_scores_sketched,
    draw_column_sampler,
    draw_row_sampler,
)
from .solvers import algorithm1_ls, algorithm3_ridge, algorithm4_classical

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _dump(obj, path=None):
    text = json.dumps(obj, indent=2, default=_jsonable)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    return str(o)


def _quantum_scores(A, side, lam, eps_hat, rng):
    """Leverage distribution of the simulated state, scaled by the estimated rank or sd."""
    from .quantum.amplitude import estimate_rank
    from .quantum.states import prepare_col_leverage_state, prepare_ridge_leverage_state, \
        rank_encoding
    check_quantum_size(A)
    if lam is not None:
        res = prepare_ridge_leverage_state(A, lam, eps_hat, rng)
        return res.state.marginal("row") * res.sd_estimate
    beW = rank_encoding(A, 0.1, eps_hat)
    state, _, _ = prepare_col_leverage_state(beW)
    return state.marginal(side) * max(1, round(estimate_rank(beW, 0.1, rng)))


def _scores(A, mode, side, lam, eps, rng):
    if side == "column" and lam is not None:
        raise LvsError("ridge scores are defined for rows only")
    if mode == "exact":
        F = svd(A)
        if lam is not None:
            return ridge_row_scores(F, lam).scores
        return (row_leverage_scores(F) if side == "row" else col_leverage_scores(F)).scores
    if mode == "sketched":
        M = A if side == "row" else A.T
        if lam is not None:
            return approx_ridge_scores_sketched(M, lam, eps, rng).scores
        return approx_leverage_scores_sketched(M, eps, rng).scores
    return _quantum_scores(A, side, lam, eps, rng)


def cmd_scores(args):
    A = load_matrix(args.input)
    s = _scores(A, args.mode, args.side, args.lam, args.eps, make_rng(args.seed))
    if args.json:
        _dump({"mode": args.mode, "side": args.side, "lambda": args.lam,
               "scores": s, "total": float(s.sum())}, args.json)
    for v in s:
        print(f"{v:.12g}")
    return EXIT_OK


def cmd_sample(args):
    A = load_matrix(args.input)
    rng = make_rng(args.seed)
    s = _scores(A, args.mode, args.side, None, args.eps, rng)
    draw = draw_row_sampler if args.side == "row" else draw_column_sampler
    S = draw(s / s.sum(), args.count, rng)
    for i, w in zip(S.indices, S.weights):
        print(f"{i} {w:.12g}")
    return EXIT_OK


def cmd_solve(args):
    A = load_matrix(args.a)
    b = load_vector(args.b)
    if args.engine == "quantum":
        from .quantum.algorithms import algorithm2_quantum_ls, algorithm4_quantum_ridge
        check_quantum_size(A if args.problem == "ls" else np.vstack([A, np.eye(A.shape[1])]))
    if args.problem == "ls":
        if args.engine == "quantum":
            rep = algorithm2_quantum_ls(A, b, args.eps, args.seed)
        else:
            rep = algorithm1_ls(A, b, args.eps, args.seed, score_mode=args.score_mode)
    else:
        if args.lam is None:
            raise LvsError("solve ridge needs --lambda")
        if args.engine == "quantum":
            rep = algorithm4_quantum_ridge(A, b, args.lam, args.eps, args.seed)
        elif args.method == "columns":
            rep = algorithm3_ridge(A, b, args.lam, args.eps, args.seed,
                                   score_mode=args.score_mode)
        else:
            rep = algorithm4_classical(A, b, args.lam, args.eps, args.seed,
                                       score_mode=args.score_mode)
    _dump(rep.to_dict(), args.json)
    return EXIT_OK


def cmd_qsim_rank(args):
    from .quantum.amplitude import estimate_rank
    from .quantum.states import rank_encoding
    A = load_matrix(args.input)
    check_quantum_size(A)
    value, res = estimate_rank(rank_encoding(A, args.eps), args.eps, make_rng(args.seed),
                               return_details=True)
    _dump({"rank_estimate": value, "rounded": int(round(value)), "grid": res.grid,
           "ae_rounds": res.rounds, "oracle_calls": res.oracle_calls, "seed": args.seed})
    return EXIT_OK


def cmd_gen(args):
    marked = [int(t) for t in args.marked.split(",") if t] if args.marked else []
    spec = InstanceSpec(args.kind, n=args.n, d=args.d, r=args.r, decay=args.decay,
                        marked=marked)
    A, b = generate_instance(spec, make_rng(args.seed))
    save_matrix(f"{args.out}_A.mtx", A)
    written = [f"{args.out}_A.mtx"]
    if b is not None:
        save_vector(f"{args.out}_b.csv", b)
        written.append(f"{args.out}_b.csv")
    print("\n".join(written))
    return EXIT_OK


def cmd_bench(args):
    report = run_acceptance_suite(args.suite, args.seed, echo=print,
                                  command=" ".join(["lvs"] + sys.argv[1:]))
    if args.out:
        _dump(report.to_dict(), args.out)
    print(f"{'PASS' if report.passed else 'FAIL'}: "
          f"{sum(c.passed for c in report.criteria)}/{len(report.criteria)} criteria passed")
    return report.exit_code


def build_parser():
    p = argparse.ArgumentParser(prog="lvs", description="Leverage-score sampling for "
                                "least-squares and ridge regression, with a quantum simulator.")
    sub = p.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("scores", help="print leverage scores, one per line")
    sc.add_argument("--input", required=True, help="matrix file (.mtx or .csv)")
    sc.add_argument("--mode", choices=["exact", "sketched", "quantum"], default="exact")
    sc.add_argument("--side", choices=["row", "column"], default="row")
    sc.add_argument("--lambda", dest="lam", type=float, default=None,
                    help="ridge parameter; switches to ridge row scores")
    sc.add_argument("--eps", type=float, default=0.25,
                    help="sketch relative error, or the TV target in quantum mode")
    sc.add_argument("--seed", type=int, default=0)
    sc.add_argument("--json", metavar="PATH", help="also write a JSON report")
    sc.set_defaults(func=cmd_scores)

    sa = sub.add_parser("sample", help="draw (index, weight) pairs by leverage")
    sa.add_argument("--input", required=True)
    sa.add_argument("--side", choices=["row", "column"], default="row")
    sa.add_argument("--count", type=int, required=True)
    sa.add_argument("--mode", choices=["exact", "sketched", "quantum"], default="exact")
    sa.add_argument("--eps", type=float, default=0.25)
    sa.add_argument("--seed", type=int, default=0)
    sa.set_defaults(func=cmd_sample)

    so = sub.add_parser("solve", help="solve a sampled regression problem")
    so_sub = so.add_subparsers(dest="problem", required=True)
    for name in ("ls", "ridge"):
        s = so_sub.add_parser(name)
        s.add_argument("--a", required=True, help="matrix file")
        s.add_argument("--b", required=True, help="vector file, one value per line")
        s.add_argument("--eps", type=float, default=0.25)
        s.add_argument("--engine", choices=["classical", "quantum"], default="classical")
        s.add_argument("--score-mode", choices=["exact", "sketched"], default="exact")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--json", metavar="PATH", help="write the report here instead of stdout")
        if name == "ridge":
            s.add_argument("--lambda", dest="lam", type=float, required=True)
            s.add_argument("--method", choices=["rows", "columns"], default="rows",
                           help="row then column sampling (rows) or column sampling only")
        s.set_defaults(func=cmd_solve)

    q = sub.add_parser("qsim", help="quantum-simulation utilities")
    q_sub = q.add_subparsers(dest="qcommand", required=True)
    qr = q_sub.add_parser("rank", help="estimate the rank by amplitude estimation")
    qr.add_argument("--input", required=True)
    qr.add_argument("--eps", type=float, default=0.1)
    qr.add_argument("--seed", type=int, default=0)
    qr.set_defaults(func=cmd_qsim_rank)

    g = sub.add_parser("gen", help="generate a test instance")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=int, default=100)
    g.add_argument("--d", type=int, default=10)
    g.add_argument("--r", type=int, default=None)
    g.add_argument("--decay", type=float, default=1.0)
    g.add_argument("--marked", default="", help="comma-separated 0-based marked indices")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="output prefix")
    g.set_defaults(func=cmd_gen)

    be = sub.add_parser("bench", help="benchmarks")
    be_sub = be.add_subparsers(dest="bench", required=True)
    ac = be_sub.add_parser("acceptance", help="run the acceptance suite")
    ac.add_argument("--suite", choices=SUITES, default="all")
    ac.add_argument("--seed", type=int, default=0)
    ac.add_argument("--out", help="JSON report path")
    ac.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except (LvsError, ValueError, OSError) as exc:
        print(f"lvs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
