"""Seeded property suites behind the `oracle-check` CLI subcommand.

Each suite replays one of the solver's provable guarantees on freshly
generated instances and reports the first failure with the seed that
produced it, so a red run is directly reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import SyntheticSpec, generate_orthogonal, generate_synthetic, inject_collinear, rng_stream
from .lass0 import Lass0Config, improving_step, lass0_fit, lass0_pipeline, pipeline_solutions
from .lasso import LassoConfig, standardize
from .oracle import exhaustive_l0, hard_threshold_oracle
from .types import SupportSet

__all__ = ["CheckResult", "orthogonal_suite", "collinear_suite", "dominance_suite", "run_all"]

BOUNDARY_MARGIN = 1e-6


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    detail: str = ""
    failing_seed: int | None = None


def orthogonal_suite(instances: int = 50, seed: int = 0, lambdas=(0.5, 2.0, 5.0)) -> CheckResult:
    """On orthonormal designs the pipeline must reproduce hard thresholding
    and agree with exhaustive enumeration, at every penalty regime."""
    cases = 0
    for i in range(instances):
        case_seed = seed + i
        X = generate_orthogonal(10, 10, case_seed)
        y = X @ rng_stream(case_seed, 1).uniform(-5.0, 5.0, 10)
        xty = X.T @ y
        for lam in lambdas:
            if np.min(np.abs(np.abs(xty) - np.sqrt(2.0 * lam))) < BOUNDARY_MARGIN:
                continue  # undefined exactly at the threshold
            expected = hard_threshold_oracle(xty, lam)
            got = lass0_pipeline(X, y, lam, lasso_cfg=LassoConfig(lam=lam, standardize=False))
            if np.max(np.abs(got.beta - expected)) > 1e-8:
                return CheckResult(
                    "orthogonal-exactness", False, cases,
                    f"pipeline mismatch at lam={lam}", case_seed,
                )
            ex = exhaustive_l0(X, y, lam)
            if np.max(np.abs(ex.beta - expected)) > 1e-10:
                return CheckResult(
                    "orthogonal-exactness", False, cases,
                    f"enumeration disagrees with hard threshold at lam={lam}", case_seed,
                )
            cases += 1
    return CheckResult("orthogonal-exactness", True, cases)


def collinear_suite(instances: int = 100, seed: int = 0, ks=(1.0, -2.0, 0.5), lam: float = 1.0) -> CheckResult:
    """With exactly proportional columns 0 and 1, and both forced into the
    initial support, at most one may survive the search."""
    cases = 0
    for i in range(instances):
        case_seed = seed + i
        rng = rng_stream(case_seed, 2)
        X = rng.standard_normal((50, 8))
        k = ks[i % len(ks)]
        X = inject_collinear(X, 0, 1, k)
        beta_true = np.zeros(8)
        beta_true[[1, 4, 6]] = rng.uniform(-2.0, 2.0, 3)
        y = X @ beta_true + 0.3 * rng.standard_normal(50)
        init = SupportSet.from_iterable([0, 1, 4, 6], 8)
        sol, _ = lass0_fit(X, y, init, Lass0Config(lam=lam))
        if 0 in sol.support and 1 in sol.support:
            return CheckResult(
                "collinear-elimination", False, cases, f"both columns active with k={k}", case_seed
            )
        cases += 1
    return CheckResult("collinear-elimination", True, cases)


def dominance_suite(instances: int = 20, seed: int = 0, p: int = 12) -> CheckResult:
    """The local search can never beat exhaustive enumeration, must improve
    on its own initialization, and must end single-step optimal."""
    cases = 0
    for i in range(instances):
        case_seed = seed + i
        spec = SyntheticSpec(n=100, p=p, sparsity=4, rho=0.7, noise_sigma=0.5, seed=case_seed)
        inst = generate_synthetic(spec)
        Xs, ys, *_ = standardize(inst.X, inst.y)
        lam = 0.1 * float(np.max(np.abs(Xs.T @ ys)))
        res = pipeline_solutions(Xs, ys, lam, lasso_cfg=LassoConfig(lam=lam, standardize=False))
        ex = exhaustive_l0(Xs, ys, lam)
        if res.lass0.objective < ex.objective - 1e-10:
            return CheckResult("exhaustive-dominance", False, cases, "local beat global", case_seed)
        if res.lass0.objective > res.polished_objective + 1e-12:
            return CheckResult("exhaustive-dominance", False, cases, "worse than initialization", case_seed)
        if improving_step(Xs, ys, res.lass0, Lass0Config(lam=lam)) is not None:
            return CheckResult("exhaustive-dominance", False, cases, "not locally optimal", case_seed)
        cases += 1
    return CheckResult("exhaustive-dominance", True, cases)


def run_all(seed: int = 0, instances: int | None = None) -> list[CheckResult]:
    kw = {} if instances is None else {"instances": instances}
    return [
        orthogonal_suite(seed=seed, **kw),
        collinear_suite(seed=seed, **kw),
        dominance_suite(seed=seed, **kw),
    ]
