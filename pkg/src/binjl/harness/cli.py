"""``binjl`` command line.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 regime-infeasible.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from binjl.circulant_sketch import embed_dual_words, sample_circulant_sketcher
from binjl.complexity import AdvisorConstants, ComplexityReport, advise_circulant, advise_gaussian, complexity_report
from binjl.errors import FormatError, RegimeInfeasibleError
from binjl.estimators import EstimatorParams
from binjl.gaussian_sketch import default_lambda, embed_words, sample_gaussian_sketcher
from binjl.harness.io import FORMAT_VERSION, SketchManifest, load_code_words, load_dataset, save_codes
from binjl.harness.verify import error_curve, verify_distance_embedding, verify_inner_product_embedding
from binjl.kernels import hamming_pair

log = logging.getLogger("binjl")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_REGIME = 0, 1, 2, 3
ROWS = {"first": "first_m", "random": "seeded_random_subset"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _lambda(args, radius: float) -> float:
    if args.lam is not None:
        return args.lam
    if args.delta is None:
        raise ValueError("give --lambda, or --delta to derive a default lambda from the dataset radius")
    return default_lambda(radius, args.delta)


def cmd_embed(args) -> int:
    data = load_dataset(args.data, args.format)
    lam = _lambda(args, data.radius)
    if args.kind == "gaussian":
        sk = sample_gaussian_sketcher(args.seed, args.m, data.n, lam)
        words = embed_words(sk, data.points)[:, None, :]
    else:
        sk = sample_circulant_sketcher(args.seed, args.m, data.n, lam, args.xi, ROWS[args.rows])
        w1, w2 = embed_dual_words(sk, data.points)
        words = np.stack([w1, w2], axis=1)
    manifest = SketchManifest.for_sketcher(sk)
    if not args.out:
        raise ValueError("embed needs --out for the code file")
    save_codes(words, manifest, args.out)
    print(json.dumps({"format_version": FORMAT_VERSION, "manifest": manifest.to_dict(),
                      "manifest_sha256": manifest.content_hash(), "count": data.count, "out": args.out}, sort_keys=True))
    return EXIT_OK


def cmd_query(args) -> int:
    words, manifest = load_code_words(args.codes)
    params = EstimatorParams(manifest.lam, manifest.m)
    m = manifest.m
    results = []
    for i, j in args.pair:
        if not (0 <= i < words.shape[0] and 0 <= j < words.shape[0]):
            raise ValueError(f"pair ({i}, {j}) out of range for {words.shape[0]} codes")
        row = {"i": i, "j": j}
        if manifest.kind == "gaussian":
            row["distance"] = params.distance_scale * hamming_pair(words[i, 0], words[j, 0])
        else:
            def pairing(a, b):
                return (m - 2 * hamming_pair(words[a, 0], words[b, 1])) + (m - 2 * hamming_pair(words[a, 1], words[b, 0]))

            row["inner_product"] = params.bilinear_scale * pairing(i, j)
            row["sq_distance"] = params.bilinear_scale * (pairing(i, i) + pairing(j, j) - 2 * pairing(i, j))
        results.append(row)
    _emit({"format_version": FORMAT_VERSION, "manifest": manifest.to_dict(), "estimates": results}, args.out)
    return EXIT_OK


def cmd_complexity(args) -> int:
    data = load_dataset(args.data, args.format)
    rep = complexity_report(data.points, args.epsilon, args.trials, args.seed)
    _emit({"format_version": FORMAT_VERSION, "report": rep.to_dict(), "seed": args.seed}, args.out)
    return EXIT_OK


def cmd_advise(args) -> int:
    payload = json.loads(Path(args.report).read_text())
    rep = ComplexityReport(**payload.get("report", payload))
    radius = args.radius if args.radius is not None else rep.radius
    consts = AdvisorConstants(args.c_lambda, args.c_eps, args.c1, args.c2, args.c_r)
    if args.kind == "gaussian":
        advice = advise_gaussian(radius, args.delta, rep, consts)
    else:
        n = args.dim or rep.dimension
        advice = advise_circulant(radius, args.delta, args.eta, n, rep, consts)
    _emit({"format_version": FORMAT_VERSION, "kind": args.kind, "advice": advice.to_dict(),
           "inputs": {"R": radius, "delta": args.delta, "eta": args.eta, "report": rep.to_dict()}}, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    data = load_dataset(args.data, args.format)
    if args.delta is None:
        raise ValueError("verify needs --delta")
    lam = _lambda(args, data.radius)
    estimator = args.estimator or ("distance" if args.kind == "gaussian" else "inner_product")
    if estimator == "distance":
        if args.kind != "gaussian":
            raise ValueError("the distance estimator needs --kind gaussian")
        rep = verify_distance_embedding(data, args.delta, lam, args.m, args.seeds, args.seed, workers=args.workers)
    else:
        rep = verify_inner_product_embedding(
            data, args.delta, lam, args.m, args.seeds, args.seed,
            kind=args.kind, xi_distribution=args.xi, row_policy=ROWS[args.rows], workers=args.workers,
        )
    _emit(rep.to_dict(include_wall_times=not args.no_wall_times), args.out)
    return EXIT_OK


def cmd_curve(args) -> int:
    data = load_dataset(args.data, args.format)
    res = error_curve(data, args.lam, args.m, args.seeds, args.seed, workers=args.workers)
    _emit(res, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="binjl", description="Dithered one-bit random-projection sketches")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_args(sp):
        sp.add_argument("data", help="dataset file")
        sp.add_argument("--format", choices=["csv", "packed_f32"], default="csv")

    def sketch_args(sp):
        sp.add_argument("--kind", choices=["gaussian", "circulant"], default="gaussian")
        sp.add_argument("--lambda", dest="lam", type=float)
        sp.add_argument("--m", type=int, required=True)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--xi", choices=["rademacher", "gaussian"], default="rademacher")
        sp.add_argument("--rows", choices=list(ROWS), default="first")

    sp = sub.add_parser("embed", help="dataset -> code file")
    data_args(sp)
    sketch_args(sp)
    sp.add_argument("--delta", type=float, help="only used to derive a default lambda")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_embed)

    sp = sub.add_parser("query", help="code file + pair indices -> estimates")
    sp.add_argument("codes")
    sp.add_argument("--pair", type=int, nargs=2, action="append", required=True, metavar=("I", "J"))
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_query)

    sp = sub.add_parser("complexity", help="dataset -> complexity report JSON")
    data_args(sp)
    sp.add_argument("--epsilon", type=float, required=True)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_complexity)

    sp = sub.add_parser("advise", help="complexity report -> (lambda, m) advice JSON")
    sp.add_argument("--kind", choices=["gaussian", "circulant"], default="gaussian")
    sp.add_argument("--report", required=True)
    sp.add_argument("--radius", type=float, help="R; defaults to the report's radius")
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--eta", type=float, default=0.1)
    sp.add_argument("--dim", type=int, help="ambient dimension n (circulant); defaults to the report's")
    for name in ("c-lambda", "c-eps", "c1", "c2", "c-r"):
        sp.add_argument(f"--{name}", type=float, default=1.0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_advise)

    sp = sub.add_parser("verify", help="run a verification campaign -> report JSON")
    data_args(sp)
    sketch_args(sp)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--seeds", type=int, default=10)
    sp.add_argument("--estimator", choices=["distance", "inner_product"])
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--no-wall-times", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("curve", help="error vs m sweep -> table JSON")
    data_args(sp)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--m", type=int, nargs="+", required=True)
    sp.add_argument("--seeds", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_curve)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except RegimeInfeasibleError as exc:
        print(f"binjl: regime infeasible: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (FormatError, OSError, json.JSONDecodeError) as exc:
        print(f"binjl: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, TypeError) as exc:
        print(f"binjl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
