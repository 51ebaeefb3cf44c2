"""Command-line driver.

    jacobi-szego forward ALPHA.json          Jacobi parameters, tail sums and norms
    jacobi-szego solve TAILS.json            recover alpha from (lambda, kappa)
    jacobi-szego equivalence --direction D   decay-profile sweep, CSV + JSON reports

Exit codes: 0 ok, 2 bad input or configuration, 3 domain error,
4 no contraction, 5 iteration cap reached.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import MaxIterExceeded, NoContraction, SpectralError
from .experiments import ExperimentConfig, run_equivalence, write_reports
from .geronimus import JacobiParams, SolverOptions, VerblunskySeq, forward, solve, strip_and_solve, verblunsky_norm
from .seqspace import INTERSECTION, L11, L21, DecaySeq, SpaceSpec, norm

log = logging.getLogger("jacobi_szego")

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_NO_CONTRACTION, EXIT_MAX_ITER = 0, 2, 3, 4, 5
NORM_SPACES = (L11, L21, INTERSECTION)


class ConfigError(Exception):
    pass


def _dump(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _space(text: str) -> SpaceSpec:
    try:
        return SpaceSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _grid(text: str) -> int:
    try:
        g = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text}") from exc
    if g < 256 or g & (g - 1):
        raise argparse.ArgumentTypeError(f"grid size must be a power of two >= 256, got {g}")
    return g


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _mass(text: str) -> tuple[float, float]:
    try:
        x, m = (float(t) for t in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected X:WEIGHT, got {text!r}") from exc
    return x, m


def cmd_forward(args) -> int:
    try:
        alpha = VerblunskySeq.from_json(_load(args.input))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad alpha file: {exc}") from exc
    J = forward(alpha)
    lam, kap = J.tail_sums()
    norms = {
        sp.label: {
            "alpha": verblunsky_norm(alpha.alpha, sp),
            "lambda": norm(lam, sp),
            "kappa": norm(kap, sp),
        }
        for sp in NORM_SPACES
    }
    doc = {**J.to_json(), "lambda": lam.to_json(), "kappa": kap.to_json(), "norms": norms}
    _dump(doc, args.out)
    return EXIT_OK


def _read_tails(obj) -> tuple[DecaySeq, DecaySeq]:
    if isinstance(obj, dict) and "lambda" in obj and "kappa" in obj:
        return DecaySeq.from_json(obj["lambda"]), DecaySeq.from_json(obj["kappa"])
    if isinstance(obj, dict) and "a" in obj and "b" in obj:
        return JacobiParams.from_json(obj).tail_sums()
    raise ConfigError("tails file needs 'lambda' and 'kappa' (or an operator with 'a' and 'b')")


def cmd_solve(args) -> int:
    try:
        lam, kap = _read_tails(_load(args.input))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad tails file: {exc}") from exc
    opts = SolverOptions(tol=args.tol, max_iter=args.max_iter)
    if args.no_strip:
        n_strip, alpha = 0, solve(lam, kap, opts, args.space)
    else:
        J = JacobiParams.from_tail_sums(lam, kap)
        n_strip, alpha = strip_and_solve(J, args.space, opts)
    doc = {
        "alpha": [float(x) for x in alpha.alpha],
        "N_stripped": n_strip,
        "residual": alpha.residual,
        "iterations": alpha.iterations,
    }
    _dump(doc, args.out)
    return EXIT_OK


def cmd_equivalence(args) -> int:
    try:
        cfg = ExperimentConfig(
            seed=args.seed,
            grid_size=args.grid_size,
            space=args.space or INTERSECTION,
            tol=args.tol,
            max_support=args.max_support,
            output_dir=Path(args.out or "out"),
            max_iter=args.max_iter,
            samples=args.samples,
            direction=args.direction,
            strip=not args.no_strip,
            masses=tuple(args.mass or ()),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    results = run_equivalence(cfg)
    csv_path, json_path = write_reports(cfg, results)
    bad = sum(r.verdict != "consistent" for r in results)
    print(f"{len(results)} samples, {len(results) - bad} consistent -> {csv_path}, {json_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jacobi-szego", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("forward", help="Jacobi parameters and tail sums from Verblunsky coefficients")
    f.add_argument("input", help="JSON file: {\"alpha\": [...]} or a bare list")
    f.add_argument("--out")
    f.set_defaults(func=cmd_forward)

    s = sub.add_parser("solve", help="Verblunsky coefficients from tail sums by fixed-point iteration")
    s.add_argument("input", help="JSON file with 'lambda' and 'kappa' (output of 'forward' works)")
    s.add_argument("--tol", type=_positive, default=1e-12)
    s.add_argument("--max-iter", type=int, default=500)
    s.add_argument("--space", type=_space, default=None, help="l11, l21, intersection or l1s:<s>")
    s.add_argument("--no-strip", action="store_true", help="fail instead of stripping rows")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("equivalence", help="decay-profile sweep in either direction")
    e.add_argument("--direction", choices=("forward", "reverse"), default="forward")
    e.add_argument("--seed", type=int, default=1)
    e.add_argument("--samples", type=int, default=10)
    e.add_argument("--grid-size", type=_grid, default=4096)
    e.add_argument("--tol", type=_positive, default=1e-12)
    e.add_argument("--max-iter", type=int, default=500)
    e.add_argument("--max-support", type=int, default=8)
    e.add_argument("--space", type=_space, default=None)
    e.add_argument("--mass", type=_mass, action="append", help="extra point mass X:WEIGHT off [-2, 2] (reverse)")
    e.add_argument("--no-strip", action="store_true")
    e.add_argument("--out", help="output directory (default ./out)")
    e.set_defaults(func=cmd_equivalence)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    np.seterr(over="ignore")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoContraction as exc:
        print(f"no contraction: {exc}", file=sys.stderr)
        return EXIT_NO_CONTRACTION
    except MaxIterExceeded as exc:
        print(f"iteration cap: {exc}", file=sys.stderr)
        return EXIT_MAX_ITER
    except SpectralError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
