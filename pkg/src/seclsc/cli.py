"""Command-line front end.

Exit codes: 0 pass, 1 verification failure, 2 usage or parameter error,
3 construction failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from math import ceil, gcd

from .assignment import ProblemParams, converse_min_max
from .errors import ConstructionFailed, DomainError, UsageError
from .field import DEFAULT_Q, PrimeField
from .model import SchemeSpec
from .recursion import h
from .schemes import build, build_cyclic_scheme
from .verify import DEFAULT_SAMPLES, verify_scheme

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_BUILD = 0, 1, 2, 3

SWEEP_COLUMNS = ("N", "M_prime", "eta_cyclic", "eta_combined", "eta_floor", "optimal_flag")


def header(q, seed) -> str:
    return f"# field q={q} seed={seed}"


def format_combination(coeffs, q, names) -> str:
    """Render a coefficient vector with residues above q/2 shown as negatives."""
    parts = []
    for c, name in zip(coeffs, names):
        c = int(c) % q
        if c == 0:
            continue
        v = c - q if c > q // 2 else c
        mag = "" if abs(v) == 1 else str(abs(v))
        parts.append(("-" if v < 0 else "+", mag + name))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, term in parts[1:]:
        out += f" {sign} {term}"
    return out


def parse_range(text: str):
    for sep in ("..", ":", "-"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            break
    else:
        lo = hi = text
    try:
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise UsageError(f"bad range {text!r}; use A..B") from None
    if lo < 1 or hi < lo:
        raise UsageError(f"bad range {text!r}")
    return range(lo, hi + 1)


def sweep_rows(n_range, m_range):
    for N in n_range:
        for M in m_range:
            if M > N:
                continue
            row = {"N": N, "M_prime": M, "eta_cyclic": N - M,
                   "eta_combined": h(N, M) - 1, "eta_floor": ceil(N / M) - 1,
                   "optimal_flag": int(M // gcd(N, M) <= 4)}
            assert row["eta_floor"] <= row["eta_combined"] <= row["eta_cyclic"], row
            yield row


# commands


def cmd_demo(args, out):
    q, seed = args.field, args.seed
    params = ProblemParams(K=3, N=3, N_r=2, q=q, seed=seed)
    F = None if args.random else [[1, 1, 1], [2, 1, 0]]
    spec = build_cyclic_scheme(params, F=F)
    f = PrimeField(q)
    names = ["W1", "W2", "W3", "Q"]
    print(header(q, seed), file=out)
    print("K = N = 3, N_r = 2: any two of three servers must give W1 + W2 + W3", file=out)
    for n, (z, row) in enumerate(zip(spec.assignment.sets, spec.rows()), 1):
        print(f"server {n} stores {sorted(z)} and sends X{n} = "
              f"{format_combination(row, q, names)}", file=out)
    rows = spec.rows()
    target = spec.target()
    for pair in itertools.combinations(range(3), 2):
        u = f.solve_left(rows[list(pair)], target)
        xs = [f"X{i + 1}" for i in pair]
        msg = "cannot decode" if u is None else \
            f"{format_combination(u, q, xs)} = W1 + W2 + W3"
        print(f"servers {{{pair[0] + 1},{pair[1] + 1}}}: {msg}", file=out)
    rep = verify_scheme(spec, mode="exhaustive")
    print(f"secure: {rep.secure} ({rep.security_note})", file=out)
    print(f"decodable on all pairs: {rep.decodable}", file=out)
    print(f"communication cost: {rep.communication_cost}", file=out)
    print(f"randomness size: {rep.randomness_size}", file=out)
    return EXIT_OK if rep.passed and rep.randomness_size == 1 else EXIT_VERIFY


def cmd_build(args, out):
    k = args.n if args.k is None else args.k
    params = ProblemParams(K=k, N=args.n, N_r=args.nr, q=args.field, seed=args.seed)
    spec = build(params, args.scheme)
    text = json.dumps(spec.to_json(), indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        summary = out
    else:
        print(text, file=out)
        summary = sys.stderr
    print(header(params.q, params.seed), file=summary)
    print(f"scheme={spec.kind} K={params.K} N={params.N} N_r={params.N_r} "
          f"lambda={spec.lam} eta={spec.randomness_count} cost={params.N_r}", file=summary)
    return EXIT_OK


def cmd_verify(args, out):
    try:
        with open(args.input) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read scheme: {e}") from e
    spec = SchemeSpec.from_json(data)
    rep = verify_scheme(spec, mode=args.mode, sample_count=args.sample_count)
    print(header(rep.q, rep.seed), file=out)
    print(json.dumps(rep.to_json(), indent=1), file=out)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_sweep(args, out):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in sweep_rows(parse_range(args.n_range), parse_range(args.m_range)):
        w.writerow(row)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(buf.getvalue())
    else:
        out.write(buf.getvalue())
    return EXIT_OK


def cmd_converse(args, out):
    if not 1 <= args.m <= args.n:
        raise UsageError("need 1 <= m <= n")
    value, witness = converse_min_max(args.n, args.m, with_witness=True)
    hv = h(args.n, args.m)
    print(f"N={args.n} M'={args.m}", file=out)
    print(f"min-max chain length: {value} (randomness lower bound {value - 1})", file=out)
    print(f"h(N, M'): {hv}", file=out)
    print(f"match: {'yes' if value == hv else 'no'}", file=out)
    print(f"optimality expected (M'/gcd <= 4): "
          f"{'yes' if args.m // gcd(args.n, args.m) <= 4 else 'no'}", file=out)
    print("witness: " + json.dumps(witness.to_json()), file=out)
    return EXIT_OK


def make_parser():
    p = argparse.ArgumentParser(prog="seclsc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("demo", help="three-server example over a small field")
    d.add_argument("--field", type=int, default=3)
    d.add_argument("--seed", type=int, default=42)
    d.add_argument("--random", action="store_true",
                   help="sample the coefficient row instead of using (2, 1, 0)")
    d.set_defaults(func=cmd_demo)

    b = sub.add_parser("build", help="construct a scheme and write it as JSON")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--nr", type=int, required=True)
    b.add_argument("--k", type=int)
    b.add_argument("--scheme", choices=["cyclic", "frac-rep", "combined"], default="combined")
    b.add_argument("--field", type=int, default=DEFAULT_Q)
    b.add_argument("--seed", type=int, default=42)
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="verify a scheme JSON file")
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--mode", choices=["exhaustive", "sampled", "auto"], default="auto")
    v.add_argument("--sample-count", type=int, default=DEFAULT_SAMPLES)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="randomness sizes over a grid, as CSV")
    s.add_argument("--n-range", required=True)
    s.add_argument("--m-range", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("converse", help="brute-force min-max chain bound")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--m", type=int, required=True)
    c.set_defaults(func=cmd_converse)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ConstructionFailed as e:
        print(f"construction failed: {e}", file=sys.stderr)
        return EXIT_BUILD


def main_entry():
    sys.exit(main())
