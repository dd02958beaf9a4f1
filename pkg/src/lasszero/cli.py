"""Command-line front end.

Subcommands: fit (sparse fit on a CSV), synth (write a synthetic
dataset), recover (synthetic support-recovery experiment), bench
(held-out accuracy comparison on a CSV), oracle-check (seeded property
suites). Machine output goes to stdout or --output; diagnostics go to
stderr. Flags override --config file values, which override defaults.

Exit codes: 0 success, 1 bad input, 2 internal failure, 3 property
failure in oracle-check.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import _kernels
from .data import (
    RNG_FAMILY,
    SyntheticSpec,
    generate_synthetic,
    load_csv,
)
from .evaluate import FoldPlan, run_accuracy_comparison, run_support_recovery
from .lass0 import pipeline_solutions
from .lasso import LassoConfig, default_grid
from .selfcheck import run_all

SCHEMA_VERSION = 1


class CliError(Exception):
    """Bad invocation or bad input; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="lasszero", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file of flag defaults (flags win)")
        p.add_argument("--format", choices=("json", "text", "csv"), default=None)
        p.add_argument("--output", default=None, help="write result here instead of stdout")

    p_fit = sub.add_parser("fit", help="sparse fit on a numeric CSV")
    common(p_fit)
    p_fit.add_argument("--input", default=None)
    p_fit.add_argument("--target", default=None, help="target column name or index (default: last)")
    p_fit.add_argument("--no-header", action="store_const", const=True, default=None)
    p_fit.add_argument("--lambda", dest="lam", type=float, default=None)
    p_fit.add_argument("--grid-size", type=int, default=None)
    p_fit.add_argument("--grid-min-ratio", type=float, default=None)
    p_fit.add_argument("--cv-folds", type=int, default=None)
    p_fit.add_argument("--seed", type=int, default=None)
    p_fit.add_argument("--no-standardize", action="store_const", const=True, default=None)
    p_fit.add_argument("--coef-tol", type=float, default=None)
    p_fit.add_argument("--max-iters", type=int, default=None)

    p_synth = sub.add_parser("synth", help="write a synthetic dataset as CSV")
    common(p_synth)
    p_synth.add_argument("--n", type=int, default=None)
    p_synth.add_argument("--p", type=int, default=None)
    p_synth.add_argument("--sparsity", type=int, default=None)
    p_synth.add_argument("--correlation", choices=("compound", "ar1"), default=None)
    p_synth.add_argument("--rho", type=float, default=None)
    p_synth.add_argument("--noise-sigma", type=float, default=None)
    p_synth.add_argument("--seed", type=int, default=None)
    p_synth.add_argument("--truth-output", default=None, help="also write the generating truth as JSON")

    p_rec = sub.add_parser("recover", help="synthetic support-recovery experiment")
    common(p_rec)
    p_rec.add_argument("--n", type=int, default=None)
    p_rec.add_argument("--p", type=int, default=None)
    p_rec.add_argument("--correlation", choices=("compound", "ar1"), default=None)
    p_rec.add_argument("--rho", type=float, default=None)
    p_rec.add_argument("--noise-sigma", type=float, default=None)
    p_rec.add_argument(
        "--sparsity-levels", default=None,
        help="comma-separated true support sizes (default: 1..p/2)",
    )
    p_rec.add_argument("--instances-per-level", type=int, default=None)
    p_rec.add_argument("--seed", type=int, default=None)
    p_rec.add_argument("--folds", type=int, default=None)
    p_rec.add_argument("--k-inner", type=int, default=None)
    p_rec.add_argument("--grid-size", type=int, default=None)
    p_rec.add_argument("--grid-min-ratio", type=float, default=None)
    p_rec.add_argument("--selection", choices=("cv_min", "cv_1se"), default=None)
    p_rec.add_argument("--coef-tol", type=float, default=None)
    p_rec.add_argument("--max-iters", type=int, default=None)

    p_bench = sub.add_parser("bench", help="held-out accuracy comparison on a CSV")
    common(p_bench)
    p_bench.add_argument("--input", default=None)
    p_bench.add_argument("--target", default=None)
    p_bench.add_argument("--no-header", action="store_const", const=True, default=None)
    p_bench.add_argument("--folds", type=int, default=None)
    p_bench.add_argument("--k-inner", type=int, default=None)
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.add_argument("--grid-size", type=int, default=None)
    p_bench.add_argument("--grid-min-ratio", type=float, default=None)
    p_bench.add_argument("--selection", choices=("cv_min", "cv_1se"), default=None)
    p_bench.add_argument("--coef-tol", type=float, default=None)
    p_bench.add_argument("--max-iters", type=int, default=None)

    p_chk = sub.add_parser("oracle-check", help="run the seeded property suites")
    common(p_chk)
    p_chk.add_argument("--seed", type=int, default=None)
    p_chk.add_argument("--instances", type=int, default=None)

    return parser


DEFAULTS = {
    "fit": {
        "target": "-1", "no_header": False, "lam": None, "grid_size": 100,
        "grid_min_ratio": 1e-3, "cv_folds": 5, "seed": 0, "no_standardize": False,
        "coef_tol": 1e-8, "max_iters": 10_000, "format": "text", "output": None,
    },
    "synth": {
        "n": 200, "p": 20, "sparsity": 5, "correlation": "compound", "rho": 0.7,
        "noise_sigma": 0.5, "seed": 0, "truth_output": None, "format": "csv", "output": None,
    },
    "recover": {
        "n": 200, "p": 20, "correlation": "compound", "rho": 0.7, "noise_sigma": 0.5,
        "sparsity_levels": "auto", "instances_per_level": 3, "seed": 0, "folds": 10,
        "k_inner": 5, "grid_size": 50, "grid_min_ratio": 1e-3, "selection": "cv_min",
        "coef_tol": 1e-8, "max_iters": 10_000, "format": "json", "output": None,
    },
    "bench": {
        "target": "-1", "no_header": False, "folds": 10, "k_inner": 5, "seed": 0,
        "grid_size": 100, "grid_min_ratio": 1e-3, "selection": "cv_min",
        "coef_tol": 1e-8, "max_iters": 10_000, "format": "json", "output": None,
    },
    "oracle-check": {"seed": 0, "instances": None, "format": "text", "output": None},
}


def _merge_config(args: argparse.Namespace, command: str) -> set[str]:
    """Resolve each option as: CLI flag, else config file entry, else default.

    Returns the keys that were set explicitly (either way), for
    mutual-exclusion checks that must not fire on defaults.
    """
    defaults = DEFAULTS[command]
    explicit = {k for k in list(defaults) + ["input"] if getattr(args, k, None) is not None}
    file_values = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise CliError(f"config file not found: {path}")
        try:
            file_values = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise CliError(f"config file {path} is not valid JSON: {e}") from None
        if not isinstance(file_values, dict):
            raise CliError(f"config file {path} must hold a JSON object")
        unknown = set(file_values) - set(defaults) - {"input"}
        if unknown:
            raise CliError(f"config file {path} has unknown keys: {sorted(unknown)}")
        explicit |= set(file_values)
    for key, default in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, file_values.get(key, default))
    if hasattr(args, "input") and args.input is None:
        args.input = file_values.get("input")
    return explicit


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_input(args) -> tuple[np.ndarray, np.ndarray, list[str] | None]:
    if not args.input:
        raise CliError("--input is required")
    path = Path(args.input)
    if not path.exists():
        raise CliError(f"input file not found: {path}")
    X, y = load_csv(path, has_header=not args.no_header, target_column=args.target)
    names = None
    if not args.no_header:
        header = path.read_text(encoding="utf-8").splitlines()[0].split(",")
        names = [s.strip() for s in header]
        target = args.target
        if isinstance(target, str):
            try:
                target = int(target)
            except ValueError:
                target = names.index(target)
        names = [nm for i, nm in enumerate(names) if i != target % len(header)]
    return X, y, names


def cmd_fit(args) -> int:
    explicit = _merge_config(args, "fit")
    if args.lam is not None and explicit & {"grid_size", "grid_min_ratio", "cv_folds"}:
        raise CliError("--lambda and grid flags (--grid-size/--grid-min-ratio/--cv-folds) are mutually exclusive")
    X, y, names = _load_input(args)
    lasso_cfg = LassoConfig(
        lam=1.0, max_iters=args.max_iters, coef_tol=args.coef_tol,
        standardize=not args.no_standardize,
    )
    if args.lam is not None:
        lam, lam_source = float(args.lam), "given"
    else:
        from .evaluate import select_lambda

        grid = default_grid(X, y, args.grid_size, args.grid_min_ratio, lasso_cfg.standardize)
        lam = select_lambda(X, y, grid, args.cv_folds, args.seed, lasso_cfg)
        lam_source = "cv"
        print(f"selected lambda {lam:.6g} by {args.cv_folds}-fold CV", file=sys.stderr)
    res = pipeline_solutions(X, y, lam, lasso_cfg=lasso_cfg)
    sol = res.lass0
    payload = {
        "schema_version": SCHEMA_VERSION,
        "backend": _kernels.BACKEND_NAME,
        "input": str(args.input),
        "n": int(X.shape[0]),
        "p": int(X.shape[1]),
        "lambda": float(lam),
        "lambda_source": lam_source,
        "intercept": float(sol.intercept),
        "support_size": len(sol.support),
        "objective": float(sol.objective),
        "lasso_support_size": len(res.lasso.support),
        "converged": {"lasso": bool(res.lasso.converged), "lass0": bool(sol.converged)},
        "coefficients": [
            {"index": int(j), "name": names[j] if names else None, "value": float(sol.beta[j])}
            for j in sol.support
        ],
    }
    if args.format == "json":
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.output)
    else:
        lines = [
            f"n={payload['n']} p={payload['p']} lambda={lam:.6g} ({lam_source})",
            f"support={payload['support_size']} (lasso kept {payload['lasso_support_size']}) "
            f"objective={sol.objective:.6g} converged={payload['converged']}",
            f"intercept  {sol.intercept: .6g}",
        ]
        for c in payload["coefficients"]:
            label = c["name"] if c["name"] is not None else f"x{c['index']}"
            lines.append(f"{label:<12} {c['value']: .6g}")
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_synth(args) -> int:
    _merge_config(args, "synth")
    spec = SyntheticSpec(
        n=args.n, p=args.p, sparsity=args.sparsity, correlation_model=args.correlation,
        rho=args.rho, noise_sigma=args.noise_sigma, seed=args.seed,
    )
    inst = generate_synthetic(spec)
    lines = [",".join([f"x{j}" for j in range(spec.p)] + ["y"])]
    for i in range(spec.n):
        lines.append(",".join(repr(float(v)) for v in [*inst.X[i], inst.y[i]]))
    _emit("\n".join(lines) + "\n", args.output)
    if args.truth_output:
        truth = {
            "schema_version": SCHEMA_VERSION,
            "rng": RNG_FAMILY,
            "spec": {
                "n": spec.n, "p": spec.p, "sparsity": spec.sparsity,
                "correlation_model": spec.correlation_model, "rho": spec.rho,
                "noise_sigma": spec.noise_sigma, "seed": spec.seed,
            },
            "beta_true": [float(v) for v in inst.beta_true],
            "support_true": [int(i) for i in inst.support_true],
        }
        Path(args.truth_output).write_text(json.dumps(truth, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


def cmd_recover(args) -> int:
    _merge_config(args, "recover")
    if args.sparsity_levels == "auto":
        levels = list(range(1, args.p // 2 + 1))
    else:
        try:
            levels = [int(s) for s in str(args.sparsity_levels).split(",") if s.strip() != ""]
        except ValueError:
            raise CliError(f"bad --sparsity-levels value: {args.sparsity_levels!r}") from None
    if not levels:
        raise CliError("--sparsity-levels must name at least one level")
    specs = []
    for li, level in enumerate(levels):
        for j in range(args.instances_per_level):
            specs.append(
                SyntheticSpec(
                    n=args.n, p=args.p, sparsity=level, correlation_model=args.correlation,
                    rho=args.rho, noise_sigma=args.noise_sigma,
                    seed=args.seed + 1000 * li + j,
                )
            )
    ref = generate_synthetic(specs[0])
    grid = default_grid(ref.X, ref.y, args.grid_size, args.grid_min_ratio)
    folds = FoldPlan.build(args.n, args.folds, args.seed)
    print(
        f"recover: {len(specs)} instances, {args.folds}-fold CV, grid of {len(grid)}",
        file=sys.stderr,
    )
    lasso_cfg = LassoConfig(lam=grid[0], max_iters=args.max_iters, coef_tol=args.coef_tol)
    report = run_support_recovery(
        specs, grid, folds, lasso_cfg=lasso_cfg, k_inner=args.k_inner, selection=args.selection
    )
    if args.format == "json":
        _emit(report.to_json(), args.output)
    elif args.format == "csv":
        _emit(report.by_sparsity_csv(), args.output)
    else:
        _emit(report.to_text(), args.output)
    return 0


def cmd_bench(args) -> int:
    _merge_config(args, "bench")
    X, y, _ = _load_input(args)
    grid = default_grid(X, y, args.grid_size, args.grid_min_ratio)
    folds = FoldPlan.build(X.shape[0], args.folds, args.seed)
    lasso_cfg = LassoConfig(lam=grid[0], max_iters=args.max_iters, coef_tol=args.coef_tol)
    report = run_accuracy_comparison(
        X, y, grid, folds, lasso_cfg=lasso_cfg, k_inner=args.k_inner, selection=args.selection
    )
    if args.format == "json":
        _emit(report.to_json(), args.output)
    elif args.format == "csv":
        _emit(report.records_csv(), args.output)
    else:
        _emit(report.to_text(), args.output)
    return 0


def cmd_oracle_check(args) -> int:
    _merge_config(args, "oracle-check")
    results = run_all(seed=args.seed, instances=args.instances)
    width = max(len(r.name) for r in results)
    lines = [f"seed={args.seed} backend={_kernels.BACKEND_NAME}"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{r.name:<{width}}  {status}  cases={r.cases}"
        if not r.passed:
            line += f"  seed={r.failing_seed}  {r.detail}"
        lines.append(line)
    _emit("\n".join(lines) + "\n", args.output)
    return 0 if all(r.passed for r in results) else 3


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "fit": cmd_fit,
            "synth": cmd_synth,
            "recover": cmd_recover,
            "bench": cmd_bench,
            "oracle-check": cmd_oracle_check,
        }[args.command]
        return handler(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # pragma: no cover - internal failure path
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
