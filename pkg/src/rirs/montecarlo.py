"""Replication harness for size, power and rank-estimation experiments.

Replicate ``r`` of an experiment with master seed ``s`` draws its matrix from
``derive_seed(s, r, 0)`` and its masks from ``derive_seed(s, r, 1)`` (which
:func:`rirs.rank_select.mask_seed` splits further per tested rank), so any
single replicate can be replayed without running the others.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .core import default_m, outcome_from_decomposition, resolve_variant
from .errors import DegenerateDenominator, InvalidArgument
from .models import ModelSpec
from .normal import normal_cdf
from .rank_select import estimate_k, mask_seed
from .seeds import MASK_STREAM, MODEL_STREAM, derive_seed
from .spectra import eigs_topk

SCHEMA_VERSION = 1
KS_TERMS = 100


@dataclass(frozen=True)
class ExperimentSpec:
    """An experiment: a model, what to test, and how many replicates.

    ``m_rule`` is ``"sqrt_n"`` or a positive number.  ``variants`` lists the
    statistics computed on every replicate (``"auto"`` picks by self-loops).
    """

    model: ModelSpec
    k0_list: tuple[int, ...] = (1,)
    alpha: float = 0.05
    reps: int = 200
    m_rule: str | float = "sqrt_n"
    master_seed: int = 0
    mode: str = "test"
    k_max: int = 6
    variants: tuple[str, ...] = ("auto",)

    def __post_init__(self):
        object.__setattr__(self, "k0_list", tuple(int(k) for k in self.k0_list))
        object.__setattr__(self, "variants", tuple(self.variants))
        if not isinstance(self.reps, (int, np.integer)) or self.reps < 1:
            raise InvalidArgument(f"reps must be a positive integer, got {self.reps!r}")
        if self.mode not in ("test", "estimate"):
            raise InvalidArgument(f"mode must be 'test' or 'estimate', got {self.mode!r}")
        if self.mode == "test" and not self.k0_list:
            raise InvalidArgument("k0_list must be non-empty in test mode")
        if any(k < 1 or k >= self.model.n for k in self.k0_list):
            raise InvalidArgument(f"k0 values must lie in [1, {self.model.n - 1}]")
        if not 0 < self.alpha < 1:
            raise InvalidArgument(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.mode == "estimate" and not 1 <= self.k_max < self.model.n:
            raise InvalidArgument(f"k_max must lie in [1, {self.model.n - 1}], got {self.k_max}")
        if self.m_rule != "sqrt_n" and not (isinstance(self.m_rule, (int, float)) and self.m_rule >= 1):
            raise InvalidArgument(f"m_rule must be 'sqrt_n' or a number >= 1, got {self.m_rule!r}")
        if self.master_seed < 0:
            raise InvalidArgument("master_seed must be non-negative")

    @property
    def m(self) -> float:
        return default_m(self.model.n) if self.m_rule == "sqrt_n" else float(self.m_rule)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["k0_list"] = list(self.k0_list)
        d["variants"] = list(self.variants)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentSpec:
        d = dict(d)
        d["model"] = ModelSpec.from_dict(d["model"])
        d["k0_list"] = tuple(d.get("k0_list", (1,)))
        d["variants"] = tuple(d.get("variants", ("auto",)))
        return cls(**d)


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    records: list[dict]
    aggregates: dict
    wall_clock_seconds: float = 0.0
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "spec": self.spec.to_dict(),
            "records": self.records,
            "aggregates": self.aggregates,
            "wall_clock_seconds": self.wall_clock_seconds,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentReport:
        if d.get("schema_version") != SCHEMA_VERSION:
            raise InvalidArgument(f"unsupported schema_version {d.get('schema_version')!r}")
        return cls(
            spec=ExperimentSpec.from_dict(d["spec"]),
            records=d["records"],
            aggregates=d["aggregates"],
            wall_clock_seconds=d["wall_clock_seconds"],
        )

    def rejection_rate(self, k0: int, variant: str | None = None) -> float:
        return self.aggregates["tests"][_key(self._variant(variant), k0)]["rejection_rate"]

    def statistics(self, k0: int, variant: str | None = None) -> np.ndarray:
        key = _key(self._variant(variant), k0)
        return np.array([
            t["statistic"] for rec in self.records for t in rec["tests"]
            if _key(t["variant"], t["k0"]) == key and not t["degenerate"]
        ])

    @property
    def correct_k_rate(self) -> float:
        return self.aggregates["estimate"]["correct_rate"]

    def _variant(self, variant):
        if variant is not None:
            return variant
        names = {k.split(":")[0] for k in self.aggregates.get("tests", {})}
        if len(names) != 1:
            raise InvalidArgument(f"report holds several variants {sorted(names)}; pick one")
        return names.pop()


def _key(variant: str, k0: int) -> str:
    return f"{variant}:{k0}"


def _replicate(spec: ExperimentSpec, r: int) -> dict:
    X = spec.model.generate(derive_seed(spec.master_seed, r, MODEL_STREAM))
    mseed = derive_seed(spec.master_seed, r, MASK_STREAM)
    rec = {"replicate": r, "seed": mseed}
    if spec.mode == "estimate":
        est = estimate_k(X, spec.alpha, spec.k_max, spec.m, mseed, spec.variants[0])
        rec["k_hat"] = est.k_hat
        rec["degenerate"] = bool(est.trail and est.trail[-1].degenerate)
        return rec
    decomp = eigs_topk(X, max(spec.k0_list))
    tests = []
    for variant in spec.variants:
        v = resolve_variant(X, variant)
        for k0 in spec.k0_list:
            try:
                out = outcome_from_decomposition(X, decomp, k0, spec.alpha, v, spec.m, mask_seed(mseed, k0))
                tests.append({"variant": v, "k0": k0, "statistic": out.statistic,
                              "p_value": out.p_value, "reject": out.reject, "degenerate": False})
            except DegenerateDenominator:
                tests.append({"variant": v, "k0": k0, "statistic": None,
                              "p_value": None, "reject": None, "degenerate": True})
    rec["tests"] = tests
    return rec


def aggregate(spec: ExperimentSpec, records: list[dict]) -> dict:
    """Summary statistics recomputed from per-replicate records."""
    if spec.mode == "estimate":
        valid = [rec["k_hat"] for rec in records]
        correct = sum(1 for k in valid if k == spec.model.K)
        hist = {}
        for k in valid:
            hist[str(k)] = hist.get(str(k), 0) + 1
        return {"estimate": {
            "reps": len(records),
            "correct": correct,
            "correct_rate": correct / len(records),
            "exhausted": sum(1 for k in valid if k is None),
            "degenerate": sum(1 for rec in records if rec["degenerate"]),
            "k_hat_counts": dict(sorted(hist.items())),
        }}
    tests = {}
    for rec in records:
        for t in rec["tests"]:
            tests.setdefault(_key(t["variant"], t["k0"]), []).append(t)
    out = {}
    for key, rows in tests.items():
        good = [t for t in rows if not t["degenerate"]]
        stats = np.array([t["statistic"] for t in good])
        rejections = sum(1 for t in good if t["reject"])
        out[key] = {
            "variant": rows[0]["variant"],
            "k0": rows[0]["k0"],
            "valid": len(good),
            "degenerate": len(rows) - len(good),
            "rejections": rejections,
            "rejection_rate": rejections / len(good) if good else math.nan,
            "statistic_mean": float(stats.mean()) if good else math.nan,
            "statistic_var": float(stats.var(ddof=1)) if len(good) > 1 else math.nan,
        }
    return {"tests": out}


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentReport:
    """Run every replicate of ``spec`` and aggregate.

    With ``workers > 1`` replicates run in a process pool; records are merged
    in replicate order, so the report does not depend on ``workers``.
    """
    t0 = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_replicate, [spec] * spec.reps, range(spec.reps), chunksize=4))
    else:
        records = []
        for r in range(spec.reps):
            try:
                records.append(_replicate(spec, r))
            except InvalidArgument as exc:
                raise InvalidArgument(f"replicate {r}: {exc}") from exc
    return ExperimentReport(spec, records, aggregate(spec, records), time.perf_counter() - t0)


def _kolmogorov_sf(lam: float) -> float:
    """P(K > lam) for the limiting Kolmogorov distribution."""
    if lam <= 0:
        return 1.0
    if lam < 0.3:
        # theta-function form converges fast for small arguments
        s = sum(math.exp(-((2 * j - 1) ** 2) * math.pi**2 / (8 * lam * lam)) for j in range(1, 6))
        return 1.0 - math.sqrt(2 * math.pi) / lam * s
    s = sum((-1) ** (j - 1) * math.exp(-2 * j * j * lam * lam) for j in range(1, KS_TERMS + 1))
    return min(1.0, max(0.0, 2.0 * s))


def ks_normality(samples) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov test against N(0, 1), asymptotic p-value."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < 20:
        raise InvalidArgument(f"ks_normality needs at least 20 samples, got {n}")
    cdf = np.array([normal_cdf(v) for v in x])
    i = np.arange(1, n + 1)
    d = float(max((i / n - cdf).max(), (cdf - (i - 1) / n).max()))
    return d, _kolmogorov_sf(math.sqrt(n) * d)


def _csv_text(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if report.spec.mode == "estimate":
        w.writerow(["replicate", "seed", "k_hat", "degenerate"])
        for rec in report.records:
            w.writerow([rec["replicate"], rec["seed"], "" if rec["k_hat"] is None else rec["k_hat"],
                        int(rec["degenerate"])])
        agg = report.aggregates["estimate"]
        buf.write(f"# schema_version={report.schema_version}\n")
        for k in ("reps", "correct", "correct_rate", "exhausted", "degenerate"):
            buf.write(f"# {k}={agg[k]}\n")
        return buf.getvalue()
    w.writerow(["replicate", "seed", "variant", "k0", "statistic", "p_value", "reject", "degenerate"])
    for rec in report.records:
        for t in rec["tests"]:
            w.writerow([rec["replicate"], rec["seed"], t["variant"], t["k0"],
                        "" if t["statistic"] is None else repr(t["statistic"]),
                        "" if t["p_value"] is None else repr(t["p_value"]),
                        "" if t["reject"] is None else int(t["reject"]), int(t["degenerate"])])
    buf.write(f"# schema_version={report.schema_version}\n")
    for key, agg in report.aggregates["tests"].items():
        buf.write(
            f"# {key} rejection_rate={agg['rejection_rate']} rejections={agg['rejections']} "
            f"valid={agg['valid']} degenerate={agg['degenerate']} "
            f"statistic_mean={agg['statistic_mean']} statistic_var={agg['statistic_var']}\n"
        )
    return buf.getvalue()


def render_report(report: ExperimentReport, format: str = "json") -> str:
    if format == "json":
        return json.dumps(report.to_dict(), indent=2, allow_nan=True) + "\n"
    if format == "csv":
        return _csv_text(report)
    raise InvalidArgument(f"unknown report format {format!r}; expected 'json' or 'csv'")


def write_report(report: ExperimentReport, path, format: str = "json") -> None:
    Path(path).write_text(render_report(report, format), encoding="utf-8")


def read_report(path) -> ExperimentReport:
    return ExperimentReport.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
