"""Simulation scenarios and evaluation metrics.

All series are ``Y_t = signal_t + X_t`` with an AR(1) backbone
``X_t = 0.3 X_{t-1} + eps_t`` started at zero and run through a burn-in.
Scenarios S1-S5 switch the signal on for ``T//3 < t <= 2T//3``; INFER adds
the mean ``1_p`` for ``t > T//2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

log = logging.getLogger(__name__)

SCENARIOS = ("S1", "S2", "S3", "S4", "S5", "INFER")

PARETO_MEAN = 1.5
PARETO_SD = math.sqrt(0.75)
LOGNORMAL_MEAN = math.exp(0.5)
LOGNORMAL_SD = math.sqrt(math.e * (math.e - 1.0))


@dataclass(frozen=True)
class ScenarioSpec:
    id: str = "S1"
    T: int = 150
    p: int = 3
    seed: int = 0
    ar_coef: float = 0.3
    burn_in: int = 500

    def __post_init__(self):
        if self.id not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.id!r}; choose from {SCENARIOS}")
        if self.T < 30:
            raise ValueError("scenarios need T >= 30")
        if self.p < 1:
            raise ValueError("p must be at least 1")


@dataclass
class LabeledSeries:
    obs: np.ndarray
    true_cps: list[int]
    scenario: ScenarioSpec


def standardized_pareto(rng, size):
    """Pareto(shape 3, scale 1) shifted and scaled to mean 0, variance 1."""
    return (1.0 + rng.pareto(3.0, size) - PARETO_MEAN) / PARETO_SD


def standardized_lognormal(rng, size):
    return (rng.lognormal(0.0, 1.0, size) - LOGNORMAL_MEAN) / LOGNORMAL_SD


def ar1(innovations: np.ndarray, coef: float, burn_in: int, drift: float = 0.0) -> np.ndarray:
    """AR(1) path driven by ``innovations`` (burn-in rows first), burn-in dropped."""
    out = np.empty_like(innovations)
    prev = np.zeros(innovations.shape[1:])
    for t in range(innovations.shape[0]):
        prev = coef * prev + innovations[t] + drift
        out[t] = prev
    return out[burn_in:]


def _draw(rng, kind, n, p):
    if kind == "normal":
        return rng.standard_normal((n, p))
    if kind == "unif1":
        return rng.uniform(-1.0, 1.0, (n, p))
    if kind == "unif3":
        return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), (n, p))
    if kind == "pareto":
        return standardized_pareto(rng, (n, p))
    if kind == "lognormal":
        return standardized_lognormal(rng, (n, p))
    raise ValueError(kind)


# (noise innovations, signal innovations) per scenario
_NOISE = {"S1": "normal", "S2": "unif3", "S3": "lognormal", "S4": "normal",
          "S5": "pareto", "INFER": "normal"}
_SIGNAL = {"S2": "unif1", "S3": "pareto", "S5": "unif3"}


def generate_scenario(spec: ScenarioSpec) -> LabeledSeries:
    rng = np.random.default_rng(spec.seed)
    T, p, n = spec.T, spec.p, spec.T + spec.burn_in
    X = ar1(_draw(rng, _NOISE[spec.id], n, p), spec.ar_coef, spec.burn_in)
    t = np.arange(1, T + 1)
    if spec.id == "INFER":
        active = t > T // 2
        Y = X + active[:, None] * np.ones(p)
        return LabeledSeries(Y, [T // 2], spec)

    active = (t > T // 3) & (t <= 2 * T // 3)
    if spec.id == "S1":
        Z = np.zeros((T, p))
        Z[:, math.ceil(p / 2):] = 2.0
    elif spec.id == "S4":
        u = rng.integers(0, 2, size=T)
        Z = np.where(u[:, None] == 1, 1.5, -1.5) * np.ones(p)
    else:
        drift = 0.5 if spec.id == "S5" else 0.0
        Z = ar1(_draw(rng, _SIGNAL[spec.id], n, p), spec.ar_coef, spec.burn_in, drift)
    Y = X + active[:, None] * Z
    return LabeledSeries(Y, [T // 3, 2 * T // 3], spec)


def hausdorff(est, truth, T: int) -> float:
    """Scaled two-sided Hausdorff distance between change-point sets.

    Both sets are augmented with the boundary points 1 and T + 1.
    """
    a = np.array(sorted({1, T + 1, *map(int, est)}), dtype=float)
    b = np.array(sorted({1, T + 1, *map(int, truth)}), dtype=float)
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(1).max(), d.min(0).max()) / T)


@dataclass
class EvalReport:
    scenario: str
    T: int
    p: int
    reps: int
    prop_K_wrong: float
    dH_mean: float
    dH_sd: float
    failures: int = 0
    coverage: dict = field(default_factory=dict)
    width_mean: dict = field(default_factory=dict)
    width_sd: dict = field(default_factory=dict)
    n_K_correct: int = 0
    refine_error_prelim: float | None = None
    refine_error_final: float | None = None
    settings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def table(self) -> str:
        """Plain-text rendering in the "mean (sd)" layout."""
        lines = [f"Scenario {self.scenario}  T={self.T}  p={self.p}  reps={self.reps}"
                 f"  failures={self.failures}",
                 f"proportion K_hat != K : {self.prop_K_wrong:.3f}",
                 f"d_H                   : {self.dH_mean:.3f} ({self.dH_sd:.3f})"]
        for a in sorted(self.coverage, key=float):
            lines.append(f"alpha={a:<5} cover={self.coverage[a]:.3f}  "
                         f"width={self.width_mean[a]:.3f} ({self.width_sd[a]:.3f})")
        return "\n".join(lines)


def _rep_seeds(master, reps):
    children = np.random.SeedSequence(master).spawn(reps)
    return [tuple(int(x) for x in c.generate_state(2)) for c in children]


def run_study(scenario: ScenarioSpec, reps: int, cfg=None, settings=None, table=None,
              generator=None) -> EvalReport:
    """Repeat generate -> detect -> refine -> long-run variance -> intervals.

    ``scenario.seed`` is the master seed; every replicate gets its own data
    and permutation seeds spawned from it.  Coverage and widths use only the
    replicates with the correct number of change points.  Refinement errors
    compare each preliminary and refined estimate with the true change point
    nearest to the preliminary one.  A failing replicate is counted and
    skipped.
    """
    from .detect import DetectionConfig
    from .pipeline import InferenceSettings, run_inference

    if reps < 1:
        raise ValueError("reps must be at least 1")
    cfg = cfg or DetectionConfig()
    settings = settings or InferenceSettings()
    generator = generator or generate_scenario
    alphas = [float(a) for a in settings.alphas] if table is not None else []
    k_wrong, dh, err_pre, err_ref = [], [], [], []
    hits = {a: [] for a in alphas}
    widths = {a: [] for a in alphas}
    failures = 0
    for data_seed, algo_seed in _rep_seeds(scenario.seed, reps):
        try:
            series = generator(replace(scenario, seed=data_seed))
            rep_cfg = replace(cfg, seed=algo_seed)
            res = run_inference(series.obs, rep_cfg, table, settings)
        except Exception as exc:  # noqa: BLE001 - a bad replicate must not end the study
            log.warning("replicate with seed %d failed: %s", data_seed, exc)
            failures += 1
            continue
        truth = series.true_cps
        est = res.prelim.estimates
        k_wrong.append(len(est) != len(truth))
        dh.append(hausdorff(est, truth, scenario.T))
        for r in res.refined:
            nearest = min(truth, key=lambda x: abs(x - r.eta_hat))
            err_pre.append(abs(r.eta_hat - nearest))
            err_ref.append(abs(r.eta_tilde - nearest))
        if len(est) == len(truth):
            for pt, eta in zip(res.points, truth):
                for a in alphas:
                    ci = pt.intervals.get(a)
                    if ci is None:
                        continue
                    hits[a].append(ci.lo <= eta <= ci.hi)
                    widths[a].append(ci.width)
    done = len(dh)
    dh_arr = np.asarray(dh, dtype=float)
    return EvalReport(
        scenario=scenario.id, T=scenario.T, p=scenario.p, reps=reps,
        prop_K_wrong=float(np.mean(k_wrong)) if done else float("nan"),
        dH_mean=float(dh_arr.mean()) if done else float("nan"),
        dH_sd=float(dh_arr.std(ddof=1)) if done > 1 else 0.0,
        failures=failures,
        coverage={str(a): float(np.mean(hits[a])) for a in alphas if hits[a]},
        width_mean={str(a): float(np.mean(widths[a])) for a in alphas if widths[a]},
        width_sd={str(a): float(np.std(widths[a], ddof=1)) if len(widths[a]) > 1 else 0.0
                  for a in alphas if widths[a]},
        n_K_correct=int(done - np.sum(k_wrong)) if done else 0,
        refine_error_prelim=float(np.mean(err_pre)) if err_pre else None,
        refine_error_final=float(np.mean(err_ref)) if err_ref else None,
        settings={"master_seed": scenario.seed, "r": cfg.r, "c_h": cfg.c_h, "tau": cfg.tau,
                  "n_permutations": cfg.n_permutations, "h_tilde": settings.h_tilde,
                  "c_kappa": settings.c_kappa, "means": settings.means},
    )
