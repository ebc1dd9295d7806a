import argparse
import csv
import sys

from dotenv import load_dotenv

from config import Config
from errors import RejectedConfig, RmLabError
from logs import setup_logging
from models import BoundInput, CodeParams, TrialConfig, encode_json
from coding.bounds import bound_table, bounds_row
from coding.fht_ml import estimate_to_word, ml_decode_first_order
from coding.rm_core import encode
from coding.rpa import decode_with_oracle_check, make_config, rpa_decode
from coding.sim import run_ml_trials, run_trials
from coding.subspace import enumerate_subspaces, gaussian_binomial
from coding.words import check_length, format_vector, log2_length, parse_bits, parse_word, to_ascii, to_hex

load_dotenv()

logger = setup_logging("rm_lab")

SIMULATE_HEADER = ["m", "r", "k", "p", "max_iter", "trials", "seed", "decoder", "block_errors", "p_err_hat",
                   "ci_low", "ci_high", "converged_fraction", "mean_iterations", "ml_ties", "tied_trials",
                   "tie_free_errors", "rng"]
BOUNDS_SWEEP_HEADER = ["m", "r", "k", "p", "epsilon", "log2_thm1", "log2_thm2", "gamma", "rho", "rho_bar",
                       "vacuous_thm1", "vacuous_thm2"]


def fmt(value):
    """Text form of one output value; reals keep 12 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{Config.REAL_DIGITS}g}"
    if isinstance(value, (list, tuple)):
        return ";".join(fmt(v) for v in value)
    return str(value)


def write_csv(header, rows):
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(row[key]) for key in header])


def write_table(table):
    for key, value in table.items():
        print(f"{key} {fmt(value)}")


def write_json(record):
    print(encode_json(record).decode("utf-8"))


def float_list(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}")


def int_list(text):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def require(parser, args, *names):
    missing = [name for name in names if getattr(args, name) is None]
    if missing:
        parser.error(f"{args.command} needs " + ", ".join("--" + name.replace("_", "-") for name in missing))


def max_iter(args):
    return args.m if args.max_iter is None else args.max_iter


def cmd_encode(args):
    codeword = encode(parse_bits(args.msg), CodeParams(args.m, args.r))
    print(to_hex(codeword) if args.hex else to_ascii(codeword))


def trace_lines(node, iteration=None):
    """One line per tree node: level, code and flip count of each of its iterations."""
    indent = "  " * node.level
    where = "" if iteration is None else f" iter {iteration}"
    flips = ",".join(str(it.flip_count) for it in node.per_iteration)
    yield f"{indent}level {node.level}{where} {node.code} flips {flips}"
    for i, it in enumerate(node.per_iteration, start=1):
        for child in it.children:
            yield from trace_lines(child, i)


def cmd_decode(args):
    params = CodeParams(args.m, args.r)
    y = parse_word(args.word)
    check_length(y, params.n)
    cfg = make_config(params, args.k, args.max_iter)
    if args.oracle:
        check = decode_with_oracle_check(y, cfg)
        outcome = check.rpa
    else:
        outcome = rpa_decode(y, cfg, trace=args.trace)

    if args.format == "json":
        write_json(check if args.oracle else outcome)
        return
    row = {"estimate": to_ascii(outcome.estimate), "converged": outcome.converged,
           "iterations_used": outcome.iterations_used, "ml_ties": outcome.ml_ties,
           "flip_counts": outcome.flip_counts}
    if args.oracle:
        row.update(ml=to_ascii(check.ml), agree=check.agree)
    if args.format == "csv":
        write_csv(list(row), [row])
        return
    print(row.pop("estimate"))
    write_table(row)
    if outcome.trace is not None:
        for line in trace_lines(outcome.trace):
            print(line)


def cmd_decode_fo(args):
    y = parse_word(args.word)
    m = log2_length(y)
    e = ml_decode_first_order(y)
    codeword = to_ascii(estimate_to_word(e, m))
    if args.format == "json":
        write_json({"s": format_vector(e.s, m), "sigma": e.sigma, "tied": e.tied, "codeword": codeword})
        return
    print(f"s {format_vector(e.s, m)} sigma {e.sigma:+d} tied {fmt(e.tied)}")
    print(codeword)


def cmd_subspaces(args):
    count = gaussian_binomial(args.m, args.k)
    if args.count:
        print(count)
        return
    if count > Config.ENUMERATION_LIMIT:
        raise RejectedConfig(f"{count} subspaces exceed the listing limit {Config.ENUMERATION_LIMIT}, use --count")
    for s in enumerate_subspaces(args.m, args.k):
        print(" ".join(format_vector(b, args.m) for b in s.basis))


def cmd_bounds(args, parser):
    if args.mode == "sweep":
        require(parser, args, "m_list", "r_list", "p_list", "epsilon_list")
        rows = []
        for m in args.m_list:
            for r in args.r_list:
                for k in args.k_list:
                    for p in args.p_list:
                        for eps in args.epsilon_list:
                            inp = BoundInput(m=m, r=r, k=k, p=p, epsilon=eps)
                            rows.append(bounds_row(inp, args.delta, args.beta))
                            logger.info(f"Bounds row m={m} r={r} k={k} p={p} epsilon={eps}")
        if args.format == "json":
            write_json(rows)
        else:
            write_csv(BOUNDS_SWEEP_HEADER, [{key: getattr(row, key) for key in BOUNDS_SWEEP_HEADER} for row in rows])
        return

    require(parser, args, "m", "r", "p", "epsilon")
    table = bound_table(BoundInput(m=args.m, r=args.r, k=args.k, p=args.p, epsilon=args.epsilon),
                        args.delta, args.beta)
    if args.format == "json":
        write_json(table)
    elif args.format == "csv":
        write_csv(list(table), [table])
    else:
        write_table(table)


def simulate_row(args, p, result):
    return {"m": args.m, "r": args.r, "k": args.k, "p": p, "max_iter": max_iter(args),
            "trials": result.trials, "seed": args.seed, "decoder": "ml" if args.ml else "rpa",
            "block_errors": result.block_errors, "p_err_hat": result.p_err_hat, "ci_low": result.ci_low,
            "ci_high": result.ci_high, "converged_fraction": result.converged_fraction,
            "mean_iterations": result.mean_iterations, "ml_ties": result.ml_ties,
            "tied_trials": result.tied_trials, "tie_free_errors": result.tie_free_errors, "rng": result.rng}


def cmd_simulate(args, parser):
    if args.mode == "sweep":
        require(parser, args, "p_list")
        p_values = args.p_list
    else:
        require(parser, args, "p")
        p_values = [args.p]
    if args.workers < 1:
        raise RejectedConfig(f"--workers must be at least 1, got {args.workers}")

    rows, results = [], []
    for p in p_values:
        cfg = TrialConfig(code=CodeParams(args.m, args.r), k=args.k, p=p, max_iter=max_iter(args),
                          num_trials=args.trials, master_seed=args.seed, workers=args.workers,
                          zero_codeword=args.zero_codeword)
        result = run_ml_trials(cfg) if args.ml else run_trials(cfg)
        results.append(result)
        rows.append(simulate_row(args, p, result))

    if args.format == "json":
        write_json(results if args.mode == "sweep" else results[0])
    elif args.format == "text" and args.mode != "sweep":
        write_table(rows[0])
    else:
        write_csv(SIMULATE_HEADER, rows)


def add_code_flags(parser, with_k=True):
    parser.add_argument("--m", type=int, required=True, help="Number of variables, N = 2^m")
    parser.add_argument("--r", type=int, required=True, help="Code order")
    if with_k:
        parser.add_argument("--k", type=int, default=1, help="Projection subspace dimension (default 1)")
        parser.add_argument("--max-iter", type=int, default=None, help="Iteration cap per tree node (default m)")


def add_format_flag(parser):
    parser.add_argument("--format", choices=["text", "csv", "json"], default=None,
                        help="Output format (default csv for simulate and sweeps, text otherwise)")


def build_parser():
    parser = argparse.ArgumentParser(prog="rm-lab", description="Reed-Muller codes and recursive projection-aggregation decoding")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("encode", help="Encode a message vector")
    add_code_flags(p, with_k=False)
    p.add_argument("--msg", required=True, help="Message bits in monomial order, 0/1 digits or 0x hex")
    p.add_argument("--hex", action="store_true", help="Print the codeword in hex")

    p = commands.add_parser("decode", help="RPA-decode a received word")
    p.add_argument("word", help="Received word, 0/1 digits or 0x hex")
    add_code_flags(p)
    p.add_argument("--trace", action="store_true", help="Print the projection-aggregation tree")
    p.add_argument("--oracle", action="store_true", help="Also run exhaustive ML and report agreement")
    add_format_flag(p)

    p = commands.add_parser("decode-fo", help="ML-decode a first-order word with the fast Hadamard transform")
    p.add_argument("word", help="Received word, 0/1 digits or 0x hex")
    add_format_flag(p)

    p = commands.add_parser("subspaces", help="List or count the k-dimensional subspaces of F2^m")
    p.add_argument("m", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--count", action="store_true", help="Only print how many there are")

    p = commands.add_parser("bounds", help="Evaluate every error bound, for one parameter set or over a grid")
    p.add_argument("mode", nargs="?", choices=["sweep"], help="Emit CSV over the --*-list grid")
    p.add_argument("--m", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--p", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--m-list", type=int_list)
    p.add_argument("--r-list", type=int_list)
    p.add_argument("--k-list", type=int_list, default=[1])
    p.add_argument("--p-list", type=float_list)
    p.add_argument("--epsilon-list", type=float_list)
    p.add_argument("--delta", type=float, default=0.5, help="Radius slack for rho, rho_bar and correctable errors")
    p.add_argument("--beta", type=float, default=0.5, help="Exponent slack for gamma")
    add_format_flag(p)

    p = commands.add_parser("simulate", help="Monte Carlo block error rate over BSC(p)")
    p.add_argument("mode", nargs="?", choices=["sweep"], help="One CSV row per value of --p-list")
    add_code_flags(p)
    p.add_argument("--p", type=float)
    p.add_argument("--p-list", type=float_list)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True, help="Master seed, required for reproducibility")
    p.add_argument("--workers", type=int, default=Config.DEFAULT_WORKERS,
                   help="Worker processes to use, results do not depend on it")
    p.add_argument("--ml", action="store_true", help="Decode with exhaustive ML instead of RPA")
    p.add_argument("--zero-codeword", action="store_true", help="Send the all-zero codeword instead of random ones")
    add_format_flag(p)

    return parser


def dispatch(argv):
    """
    Parse argv, run the subcommand and return the exit status.

    0 on success, 1 for a rejected input, config or validity window, 2 for
    usage errors and 3 for anything unexpected.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code

    try:
        if args.command == "encode":
            cmd_encode(args)
        elif args.command == "decode":
            cmd_decode(args)
        elif args.command == "decode-fo":
            cmd_decode_fo(args)
        elif args.command == "subspaces":
            cmd_subspaces(args)
        elif args.command == "bounds":
            cmd_bounds(args, parser)
        elif args.command == "simulate":
            cmd_simulate(args, parser)
    except SystemExit as e:
        return e.code
    except RmLabError as e:
        print(str(e), file=sys.stderr)
        return 1
    except Exception as e:
        logger.error(f"Unexpected failure in {args.command}: {str(e)}", exc_info=True)
        print(f"error: {str(e)}", file=sys.stderr)
        return 3
    return 0


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == '__main__':
    main()
