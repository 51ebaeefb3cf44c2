"""Desk-scale sweeps comparing the coefficient side (tail sums lambda, kappa)
with the spectral side (edge exponents and log v0) of the same operator.

forward: sample finitely supported alpha, form (lambda, kappa) from its
    Jacobi parameters, recover alpha by the fixed-point solver (stripping
    if needed), build the Bernstein-Szego measure and push it to [-2, 2].
reverse: sample Bernstein-Szego measures, push them to [-2, 2], optionally
    add point masses off the interval, and extract Jacobi parameters by the
    Stieltjes procedure.

Each sample gets a verdict: "consistent" when both sides agree on membership
(decay profiles flat within the diagnostic window), "inconsistent" when they
disagree, and "error: ..." when a step failed.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import SpectralError
from .geronimus import JacobiParams, SolverOptions, VerblunskySeq, forward, strip_and_solve
from .harmonic import analytic_calculus, analyze
from .jacobi import eigenvalues_off_band, jacobi_from_measure
from .measures import IntervalMeasure, check_class_V, szego_forward, szego_inverse
from .opuc import bernstein_szego, verify_gi_baxter
from .seqspace import INTERSECTION, DecaySeq, SpaceSpec, dyadic_truncations, partial_norm_profile, profile_growth

log = logging.getLogger(__name__)

__all__ = ["ExperimentConfig", "SampleResult", "run_equivalence", "write_reports", "REPORT_HEADER"]

REPORT_HEADER = (
    "Desk-scale consistency check of the equivalence between decay of the "
    "Jacobi tail sums and the class of the spectral measure. Finite grids and "
    "finite truncations can only show agreement of flat decay profiles; this "
    "is not a proof-strength reproduction."
)
MIN_GRID = 256
FLAT_TOL = 1e-3
CSV_COLUMNS = [
    "sample_id",
    "truncation",
    "partial_norm_alpha",
    "partial_norm_logw",
    "partial_norm_lambda",
    "partial_norm_kappa",
    "verdict",
]


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 1
    grid_size: int = 4096
    space: SpaceSpec = INTERSECTION
    tol: float = 1e-12
    max_support: int = 8
    output_dir: Path = Path("out")
    max_iter: int = 500
    samples: int = 10
    direction: str = "forward"
    strip: bool = True
    max_alpha: float = 0.5
    masses: tuple[tuple[float, float], ...] = ()
    threads: int | None = None

    def __post_init__(self):
        g = self.grid_size
        if g < MIN_GRID or g & (g - 1):
            raise ValueError(f"grid_size must be a power of two >= {MIN_GRID}, got {g}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.direction not in ("forward", "reverse"):
            raise ValueError("direction is 'forward' or 'reverse'")
        if self.max_support < 1 or self.samples < 0 or self.max_iter < 1:
            raise ValueError("max_support, samples and max_iter must be positive")
        if not 0 < self.max_alpha < 1:
            raise ValueError("max_alpha must lie in (0, 1)")
        for x, m in self.masses:
            if abs(x) <= 2.0 or not m > 0:
                raise ValueError("extra masses must sit off [-2, 2] with positive weight")

    @property
    def window(self) -> int:
        return self.grid_size // 8

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "grid_size": self.grid_size,
            "space": self.space.label,
            "tol": self.tol,
            "max_support": self.max_support,
            "max_iter": self.max_iter,
            "samples": self.samples,
            "direction": self.direction,
            "strip": self.strip,
            "max_alpha": self.max_alpha,
            "masses": [list(m) for m in self.masses],
            "window": self.window,
        }


@dataclass
class SampleResult:
    sample_id: int
    verdict: str
    truncations: list[int] = field(default_factory=list)
    profiles: dict[str, list[float]] = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"sample_id": self.sample_id, "verdict": self.verdict, "details": self.details}


def _thread_count(cfg: ExperimentConfig) -> int:
    if cfg.threads is not None:
        return max(1, cfg.threads)
    env = os.environ.get("SZJ_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer SZJ_THREADS=%r", env)
    return min(4, os.cpu_count() or 1)


def _sample_alpha(rng: np.random.Generator, cfg: ExperimentConfig) -> np.ndarray:
    n = int(rng.integers(1, cfg.max_support + 1))
    # geometric envelope keeps the samples well inside the disc
    return rng.uniform(-cfg.max_alpha, cfg.max_alpha, n) * 0.7 ** np.arange(n)


def _seq_profile(seq: DecaySeq, space: SpaceSpec, truncs: list[int]) -> list[float]:
    # index 0 is weighted as 1 so every entry counts in the weighted norms
    return partial_norm_profile(seq.indices + 1, seq.values, space, truncs)


def _coefficient_side(J: JacobiParams, cfg: ExperimentConfig, truncs: list[int]) -> tuple[bool, dict, dict]:
    lam, kap = J.tail_sums()
    prof = {
        "lambda": _seq_profile(lam, cfg.space, truncs),
        "kappa": _seq_profile(kap, cfg.space, truncs),
    }
    opts = SolverOptions(tol=cfg.tol, max_iter=cfg.max_iter)
    if cfg.strip:
        n_strip, alpha = strip_and_solve(J, opts=opts)
    else:
        from .geronimus import solve

        n_strip, alpha = 0, solve(lam, kap, opts)
    prof["alpha"] = partial_norm_profile(np.arange(1, alpha.alpha.size + 1), alpha.alpha, cfg.space, truncs)
    lam_g = profile_growth(prof["lambda"], float(np.sum(np.abs(lam.values))))
    kap_g = profile_growth(prof["kappa"], float(np.sum(np.abs(kap.values))))
    holds = lam_g <= FLAT_TOL and kap_g <= FLAT_TOL
    info = {
        "n_stripped": n_strip,
        "solver_iterations": alpha.iterations,
        "solver_residual": alpha.residual,
        "lambda_growth": lam_g,
        "kappa_growth": kap_g,
    }
    return holds, prof, {"alpha": alpha, **info}


def _spectral_side(nu, cfg: ExperimentConfig) -> tuple[bool, dict]:
    rep = check_class_V(nu, cfg.space, cfg.window)
    holds = rep.eigenvalues_ok and rep.log_v0_flat
    return holds, rep.to_json()


def _logw_profile(weight: np.ndarray, space: SpaceSpec, truncs: list[int]) -> tuple[list[float], float]:
    logw = analytic_calculus(analyze(weight, 0.5), "log")
    prof = partial_norm_profile(logw.indices, logw.coeffs, space, truncs)
    return prof, profile_growth(prof, float(np.sum(np.abs(logw.coeffs))))


def _forward_sample(sid: int, cfg: ExperimentConfig) -> SampleResult:
    rng = np.random.default_rng([cfg.seed, sid])
    alpha = _sample_alpha(rng, cfg)
    truncs = dyadic_truncations(cfg.window)
    J = forward(VerblunskySeq(alpha))
    coef_ok, prof, info = _coefficient_side(J, cfg, truncs)
    recovered: VerblunskySeq = info.pop("alpha")
    # the recovered alpha describes J^(N) with a modified first row; its
    # measure differs from that of J by a finite-rank change
    mu = bernstein_szego(recovered, grid_size=cfg.grid_size)
    gb = verify_gi_baxter(recovered, mu, cfg.space, cfg.window)
    prof["logw"] = gb.logw_profile
    spec_ok, spec_info = _spectral_side(szego_forward(mu), cfg)
    spec_ok = spec_ok and gb.logw_flat
    roundtrip = None
    if info["n_stripped"] == 0:
        size = max(alpha.size, recovered.alpha.size)
        diff = np.pad(recovered.alpha, (0, size - recovered.alpha.size)) - np.pad(alpha, (0, size - alpha.size))
        roundtrip = float(np.max(np.abs(diff), initial=0.0))
    details = {
        "alpha": alpha.tolist(),
        "recovered_alpha": recovered.alpha.tolist(),
        "coefficient_side": coef_ok,
        "spectral_side": spec_ok,
        "gi_baxter": gb.to_json(),
        "class_V": spec_info,
        "roundtrip_error": roundtrip,
        **info,
    }
    return _result(sid, coef_ok, spec_ok, truncs, prof, details)


def _reverse_sample(sid: int, cfg: ExperimentConfig) -> SampleResult:
    rng = np.random.default_rng([cfg.seed, sid])
    alpha = _sample_alpha(rng, cfg)
    truncs = dyadic_truncations(cfg.window)
    mu = bernstein_szego(alpha, grid_size=cfg.grid_size)
    nu = szego_forward(mu)
    for x, m in cfg.masses:
        nu = nu.with_mass(x, m)
    J = jacobi_from_measure(nu, cfg.window)
    eig = eigenvalues_off_band(J)
    coef_ok, prof, info = _coefficient_side(J, cfg, truncs)
    info.pop("alpha")
    spec_ok, spec_info = _spectral_side(nu, cfg)
    # the circle weight of the absolutely continuous part; atoms off [-2, 2]
    # have no circle preimage and do not enter log w
    ac = IntervalMeasure(nu.density, (), nu.grid_size, check=False)
    prof["logw"], logw_growth = _logw_profile(szego_inverse(ac).weight, cfg.space, truncs)
    spec_ok = spec_ok and logw_growth <= FLAT_TOL
    details = {
        "alpha": alpha.tolist(),
        "masses": [list(m) for m in nu.masses],
        "eigenvalues": eig.tolist(),
        "coefficient_side": coef_ok,
        "spectral_side": spec_ok,
        "class_V": spec_info,
        **info,
    }
    return _result(sid, coef_ok, spec_ok, truncs, prof, details)


def _result(sid, coef_ok, spec_ok, truncs, prof, details) -> SampleResult:
    verdict = "consistent" if coef_ok == spec_ok else "inconsistent"
    return SampleResult(sid, verdict, truncs, prof, details)


def _run_one(sid: int, cfg: ExperimentConfig) -> SampleResult:
    fn = _forward_sample if cfg.direction == "forward" else _reverse_sample
    try:
        return fn(sid, cfg)
    except (SpectralError, ValueError, FloatingPointError) as exc:
        log.info("sample %d failed: %s", sid, exc)
        return SampleResult(sid, f"error: {type(exc).__name__}: {exc}")


def run_equivalence(cfg: ExperimentConfig) -> list[SampleResult]:
    """Run all samples; results come back in sample order regardless of threading."""
    ids = range(cfg.samples)
    threads = _thread_count(cfg)
    if threads == 1:
        return [_run_one(i, cfg) for i in ids]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda i: _run_one(i, cfg), ids))


def write_reports(cfg: ExperimentConfig, results: list[SampleResult]) -> tuple[Path, Path]:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"equivalence_{cfg.direction}"
    csv_path, json_path = out / f"{stem}.csv", out / f"{stem}.json"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in results:
            for i, t in enumerate(r.truncations):
                w.writerow(
                    [r.sample_id, t]
                    + [repr(float(r.profiles[k][i])) for k in ("alpha", "logw", "lambda", "kappa")]
                    + [r.verdict]
                )
    counts: dict[str, int] = {}
    for r in results:
        key = r.verdict if not r.verdict.startswith("error") else "error"
        counts[key] = counts.get(key, 0) + 1
    doc = {
        "header": REPORT_HEADER,
        "config": cfg.to_json(),
        "summary": counts,
        "samples": [r.to_json() for r in results],
    }
    with open(json_path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path
