"""Cross-validation harness and metrics for comparing L1 against Lass0.

Two drivers share the protocol: per outer fold, the penalty is chosen by
inner cross-validated MSE over a fixed grid (training rows only, so
selection never sees the held-out fold), both methods are fit on the
training rows at that penalty, and held-out metrics are recorded per
fold. Everything randomized is keyed off explicit seeds and the runs are
single-threaded, so reports are byte-reproducible.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .data import RNG_FAMILY, SyntheticSpec, generate_synthetic, rng_stream
from .lass0 import Lass0Config, pipeline_solutions
from .lasso import LambdaGrid, LassoConfig, path_predictions
from .types import SupportSet, as_matrix, as_vector

__all__ = [
    "METHOD_L1",
    "METHOD_LASS0",
    "FoldPlan",
    "FoldRecord",
    "ComparisonReport",
    "hamming_support",
    "nrmse",
    "select_lambda",
    "run_support_recovery",
    "run_accuracy_comparison",
]

METHOD_L1 = "L1"
METHOD_LASS0 = "Lass0"
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class FoldPlan:
    """Deterministic assignment of n rows to k folds of near-equal size."""

    n: int
    k: int
    seed: int
    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 2 <= self.k <= self.n:
            raise ValueError(f"need 2 <= k <= n, got k={self.k}, n={self.n}")
        if len(self.assignment) != self.n:
            raise ValueError("assignment must cover every row exactly once")
        counts = np.bincount(np.asarray(self.assignment), minlength=self.k)
        if counts.size != self.k or counts.max() - counts.min() > 1 or counts.min() < 1:
            raise ValueError("fold sizes must differ by at most one")

    @classmethod
    def build(cls, n: int, k: int = 10, seed: int = 0, stream: tuple[int, ...] = ()) -> "FoldPlan":
        if not 2 <= k <= n:
            raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
        perm = rng_stream(seed, *stream).permutation(n)
        assignment = np.empty(n, dtype=np.intp)
        sizes = np.full(k, n // k)
        sizes[: n % k] += 1
        pos = 0
        for f, size in enumerate(sizes):
            assignment[perm[pos:pos + size]] = f
            pos += size
        return cls(n=n, k=k, seed=seed, assignment=tuple(int(a) for a in assignment))

    def fold_mask(self, fold: int) -> np.ndarray:
        return np.asarray(self.assignment) == fold


def hamming_support(a: SupportSet, b: SupportSet) -> int:
    """Size of the symmetric difference between two supports."""
    if a.universe != b.universe:
        raise ValueError(f"support universes differ: {a.universe} vs {b.universe}")
    return len(set(a.indices) ^ set(b.indices))


def nrmse(y_true, y_pred) -> float:
    """Root mean squared error over the population std of y_true, percent.

    Predicting the mean scores exactly 100.
    """
    y_true = as_vector(y_true, "y_true")
    y_pred = as_vector(y_pred, "y_pred")
    if y_true.shape[0] != y_pred.shape[0]:
        raise ValueError("y_true and y_pred have different lengths")
    if y_true.shape[0] < 2:
        raise ValueError("nrmse needs at least 2 observations")
    std = float(np.sqrt(np.mean((y_true - y_true.mean()) ** 2)))
    if std == 0.0:
        raise ValueError("y_true is constant; normalization undefined")
    rmse = float(np.sqrt(np.mean((y_true - y_pred) ** 2)))
    return 100.0 * rmse / std


def select_lambda(
    X,
    y,
    grid: LambdaGrid,
    k_inner: int,
    seed: int,
    lasso_cfg: LassoConfig,
    rule: str = "cv_min",
    stream: tuple[int, ...] = (),
) -> float:
    """Pick a grid value by k-fold cross-validated MSE.

    cv_min takes the minimizer of the mean validation MSE (ties go to the
    larger penalty); cv_1se takes the largest penalty within one standard
    error of that minimum.
    """
    if rule not in ("cv_min", "cv_1se"):
        raise ValueError(f"unknown selection rule {rule!r}")
    X = as_matrix(X)
    y = as_vector(y)
    plan = FoldPlan.build(X.shape[0], k_inner, seed, stream)
    mse = np.empty((k_inner, len(grid)))
    for f in range(k_inner):
        va = plan.fold_mask(f)
        tr = ~va
        preds = path_predictions(X[tr], y[tr], X[va], grid, lasso_cfg)
        mse[f] = np.mean((y[va][None, :] - preds) ** 2, axis=1)
    mean_mse = mse.mean(axis=0)
    best = int(np.argmin(mean_mse))
    if rule == "cv_min":
        return grid[best]
    se = float(np.std(mse[:, best], ddof=1)) / np.sqrt(k_inner) if k_inner > 1 else 0.0
    for gi in range(len(grid)):  # grid is decreasing: first hit is the largest penalty
        if mean_mse[gi] <= mean_mse[best] + se:
            return grid[gi]
    return grid[best]


@dataclass(frozen=True)
class FoldRecord:
    instance: int
    fold: int
    method: str
    lambda_selected: float
    nrmse: float
    support_size: int
    train_objective: float
    converged: bool
    hamming: int | None = None
    sparsity: int | None = None
    instance_seed: int | None = None


def _mean_std(values: Sequence[float]) -> dict[str, float]:
    arr = np.asarray(values, dtype=np.float64)
    std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return {"mean": float(arr.mean()), "std": std}


def aggregate_records(records: Sequence[FoldRecord]) -> dict:
    """Mean and standard deviation per method per metric (ddof=1)."""
    out: dict[str, dict] = {}
    for method in (METHOD_L1, METHOD_LASS0):
        rows = [r for r in records if r.method == method]
        if not rows:
            continue
        entry = {
            "nrmse": _mean_std([r.nrmse for r in rows]),
            "support_size": _mean_std([r.support_size for r in rows]),
        }
        if all(r.hamming is not None for r in rows):
            entry["hamming"] = _mean_std([r.hamming for r in rows])
        out[method] = entry
    return out


def aggregate_by_sparsity(records: Sequence[FoldRecord]) -> list[dict]:
    levels = sorted({r.sparsity for r in records if r.sparsity is not None})
    out = []
    for s in levels:
        row: dict = {"sparsity": int(s)}
        for method in (METHOD_L1, METHOD_LASS0):
            rows = [r for r in records if r.method == method and r.sparsity == s]
            row[method] = {
                "hamming": _mean_std([r.hamming for r in rows]),
                "support_size": _mean_std([r.support_size for r in rows]),
                "nrmse": _mean_std([r.nrmse for r in rows]),
            }
        out.append(row)
    return out


@dataclass
class ComparisonReport:
    """Per-fold records plus aggregates, with every input echoed back."""

    kind: str
    seed: int
    k_folds: int
    k_inner: int
    selection: str
    grid: tuple[float, ...]
    lasso_config: dict
    lass0_config: dict
    records: list[FoldRecord]
    instances: list[dict] = field(default_factory=list)
    dataset: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION
    rng: str = RNG_FAMILY
    backend: str = _kernels.BACKEND_NAME

    @property
    def aggregates(self) -> dict:
        return aggregate_records(self.records)

    @property
    def by_sparsity(self) -> list[dict]:
        return aggregate_by_sparsity(self.records)

    def to_dict(self) -> dict:
        out = {
            "schema_version": self.schema_version,
            "kind": self.kind,
            "rng": self.rng,
            "backend": self.backend,
            "seed": self.seed,
            "k_folds": self.k_folds,
            "k_inner": self.k_inner,
            "selection": self.selection,
            "grid": [float(v) for v in self.grid],
            "lasso_config": self.lasso_config,
            "lass0_config": self.lass0_config,
            "records": [_record_dict(r) for r in self.records],
            "aggregates": self.aggregates,
        }
        if self.instances:
            out["instances"] = self.instances
            out["by_sparsity"] = self.by_sparsity
        if self.dataset:
            out["dataset"] = self.dataset
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [f"{self.kind} ({self.k_folds}-fold CV, inner k={self.k_inner}, selection={self.selection})"]
        agg = self.aggregates
        lines.append("")
        header = f"{'method':<8} {'nrmse':>16} {'|support|':>16}" + (
            f" {'hamming':>16}" if any("hamming" in v for v in agg.values()) else ""
        )
        lines.append(header)
        for method in (METHOD_L1, METHOD_LASS0):
            if method not in agg:
                continue
            a = agg[method]
            row = (
                f"{method:<8} {a['nrmse']['mean']:>8.2f} ± {a['nrmse']['std']:<5.2f} "
                f"{a['support_size']['mean']:>8.2f} ± {a['support_size']['std']:<5.2f}"
            )
            if "hamming" in a:
                row += f" {a['hamming']['mean']:>8.2f} ± {a['hamming']['std']:<5.2f}"
            lines.append(row)
        if self.instances:
            lines.append("")
            lines.append(f"{'sparsity':>8} {'hamming L1':>12} {'hamming Lass0':>14}")
            for row in self.by_sparsity:
                lines.append(
                    f"{row['sparsity']:>8} {row[METHOD_L1]['hamming']['mean']:>12.3f} "
                    f"{row[METHOD_LASS0]['hamming']['mean']:>14.3f}"
                )
        return "\n".join(lines) + "\n"

    def records_csv(self) -> str:
        cols = [
            "instance", "instance_seed", "sparsity", "fold", "method",
            "lambda_selected", "nrmse", "support_size", "hamming",
            "train_objective", "converged",
        ]
        lines = [",".join(cols)]
        for r in self.records:
            d = _record_dict(r)
            lines.append(",".join("" if d[c] is None else str(d[c]) for c in cols))
        return "\n".join(lines) + "\n"

    def by_sparsity_csv(self) -> str:
        lines = ["sparsity,method,hamming_mean,hamming_std,support_mean,nrmse_mean"]
        for row in self.by_sparsity:
            for method in (METHOD_L1, METHOD_LASS0):
                a = row[method]
                lines.append(
                    f"{row['sparsity']},{method},{a['hamming']['mean']},{a['hamming']['std']},"
                    f"{a['support_size']['mean']},{a['nrmse']['mean']}"
                )
        return "\n".join(lines) + "\n"


def _record_dict(r: FoldRecord) -> dict:
    d = asdict(r)
    d["lambda_selected"] = float(d["lambda_selected"])
    d["nrmse"] = float(d["nrmse"])
    d["train_objective"] = float(d["train_objective"])
    return d


def _fit_both(Xtr, ytr, Xva, yva, lam, lasso_cfg, lass0_cfg, common, truth=None) -> list[FoldRecord]:
    res = pipeline_solutions(Xtr, ytr, lam, lass0_cfg, lasso_cfg)
    rows = []
    for method, sol, train_obj in (
        (METHOD_L1, res.lasso, res.polished_objective),
        (METHOD_LASS0, res.lass0, res.lass0.objective),
    ):
        rows.append(
            FoldRecord(
                method=method,
                lambda_selected=float(lam),
                nrmse=nrmse(yva, sol.predict(Xva)),
                support_size=len(sol.support),
                train_objective=float(train_obj),
                converged=bool(sol.converged),
                hamming=None if truth is None else hamming_support(sol.support, truth),
                **common,
            )
        )
    return rows


def run_support_recovery(
    specs: Sequence[SyntheticSpec],
    grid: LambdaGrid,
    folds: FoldPlan,
    lasso_cfg: LassoConfig | None = None,
    lass0_cfg: Lass0Config | None = None,
    k_inner: int = 5,
    selection: str = "cv_min",
) -> ComparisonReport:
    """Estimated-vs-true support comparison on synthetic instances.

    For each instance and outer fold: choose the penalty on the training
    rows, fit both methods there, and record the Hamming distance of each
    estimated support to the generating one, plus held-out NRMSE.
    """
    if not specs:
        raise ValueError("need at least one synthetic spec")
    lasso_cfg = lasso_cfg or LassoConfig(lam=grid[0])
    records: list[FoldRecord] = []
    instances_echo = []
    for ii, spec in enumerate(specs):
        inst = generate_synthetic(spec)
        instances_echo.append(_spec_dict(spec))
        plan = FoldPlan.build(spec.n, folds.k, folds.seed, stream=(ii,))
        for f in range(plan.k):
            va = plan.fold_mask(f)
            tr = ~va
            lam = select_lambda(
                inst.X[tr], inst.y[tr], grid, k_inner, folds.seed, lasso_cfg, selection, stream=(ii, f)
            )
            common = {
                "instance": ii,
                "instance_seed": spec.seed,
                "sparsity": spec.sparsity,
                "fold": f,
            }
            records.extend(
                _fit_both(
                    inst.X[tr], inst.y[tr], inst.X[va], inst.y[va], lam,
                    lasso_cfg, lass0_cfg, common, truth=inst.support_true,
                )
            )
    return ComparisonReport(
        kind="support_recovery",
        seed=folds.seed,
        k_folds=folds.k,
        k_inner=k_inner,
        selection=selection,
        grid=tuple(grid),
        lasso_config=_lasso_cfg_dict(lasso_cfg),
        lass0_config=_lass0_cfg_dict(lass0_cfg),
        records=records,
        instances=instances_echo,
    )


def run_accuracy_comparison(
    X,
    y,
    grid: LambdaGrid,
    folds: FoldPlan,
    lasso_cfg: LassoConfig | None = None,
    lass0_cfg: Lass0Config | None = None,
    k_inner: int = 5,
    selection: str = "cv_min",
) -> ComparisonReport:
    """Held-out NRMSE and support size for both methods on one dataset."""
    X = as_matrix(X)
    y = as_vector(y)
    if folds.n != X.shape[0]:
        raise ValueError(f"fold plan covers {folds.n} rows but data has {X.shape[0]}")
    lasso_cfg = lasso_cfg or LassoConfig(lam=grid[0])
    records: list[FoldRecord] = []
    for f in range(folds.k):
        va = folds.fold_mask(f)
        tr = ~va
        lam = select_lambda(X[tr], y[tr], grid, k_inner, folds.seed, lasso_cfg, selection, stream=(f,))
        common = {"instance": 0, "fold": f}
        records.extend(_fit_both(X[tr], y[tr], X[va], y[va], lam, lasso_cfg, lass0_cfg, common))
    return ComparisonReport(
        kind="accuracy_comparison",
        seed=folds.seed,
        k_folds=folds.k,
        k_inner=k_inner,
        selection=selection,
        grid=tuple(grid),
        lasso_config=_lasso_cfg_dict(lasso_cfg),
        lass0_config=_lass0_cfg_dict(lass0_cfg),
        records=records,
        dataset={"n": int(X.shape[0]), "p": int(X.shape[1])},
    )


def _spec_dict(spec: SyntheticSpec) -> dict:
    return {
        "n": spec.n,
        "p": spec.p,
        "sparsity": spec.sparsity,
        "correlation_model": spec.correlation_model,
        "rho": float(spec.rho),
        "noise_sigma": float(spec.noise_sigma),
        "mu": list(spec.mu) if spec.mu is not None else None,
        "seed": spec.seed,
    }


def _lasso_cfg_dict(cfg: LassoConfig) -> dict:
    return {
        "max_iters": cfg.max_iters,
        "coef_tol": float(cfg.coef_tol),
        "standardize": cfg.standardize,
    }


def _lass0_cfg_dict(cfg: Lass0Config | None) -> dict:
    cfg = cfg or Lass0Config(lam=0.0)
    return {
        "min_improvement": float(cfg.min_improvement),
        "max_steps": cfg.max_steps,
        "tie_break": cfg.tie_break,
    }
