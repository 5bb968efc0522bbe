"""Quantiles of the two-sided drifted Brownian argmin and change-point confidence intervals."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = "1.0"
DEFAULT_ALPHAS = (0.001, 0.005, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5,
                  0.75, 0.9, 0.95, 0.975, 0.99, 0.995, 0.999)


class HalfwidthTooSmall(RuntimeError):
    """Too many simulated minimisers sit on the edge of the grid."""


def simulate_argmin(n_draws: int, grid_step: float = 0.01, halfwidth: float = 30.0,
                    sigma: float = 1.0, seed=None, chunk: int = 500,
                    max_boundary_frac: float = 0.01) -> np.ndarray:
    """Draws of ``argmin_u sigma * B(u) + |u|`` for a two-sided Brownian motion.

    Each side is an independent Brownian path sampled on ``0, d, 2d, ..., M``
    with Gaussian increments; the process is 0 at the origin.
    """
    rng = np.random.default_rng(seed)
    n = int(round(halfwidth / grid_step))
    drift = grid_step * np.arange(1, n + 1)
    out = np.empty(n_draws)
    boundary = 0
    for lo in range(0, n_draws, chunk):
        m = min(chunk, n_draws - lo)
        sides = []
        for _ in range(2):
            path = sigma * math.sqrt(grid_step) * np.cumsum(rng.standard_normal((m, n)), axis=1)
            path += drift
            j = np.argmin(path, axis=1)
            sides.append((path[np.arange(m), j], j))
        (vl, jl), (vr, jr) = sides
        u = np.zeros(m)
        left_wins = (vl < 0.0) & (vl <= vr)
        right_wins = (vr < 0.0) & (vr < vl)
        u[left_wins] = -(jl[left_wins] + 1) * grid_step
        u[right_wins] = (jr[right_wins] + 1) * grid_step
        boundary += int(np.sum(left_wins & (jl == n - 1)) + np.sum(right_wins & (jr == n - 1)))
        out[lo:lo + m] = u
    if boundary > max_boundary_frac * n_draws:
        raise HalfwidthTooSmall(f"{boundary} of {n_draws} minimisers at +/-{halfwidth}; "
                                "increase the halfwidth")
    return out


def quantile_se(draws: np.ndarray, alpha: float) -> float:
    """Standard error of an empirical quantile from order-statistic spacing."""
    x = np.sort(draws)
    n = x.shape[0]
    half = math.sqrt(n * alpha * (1.0 - alpha))
    lo = int(max(0, math.floor(n * alpha - half)))
    hi = int(min(n - 1, math.ceil(n * alpha + half)))
    return float(x[hi] - x[lo]) / 2.0


@dataclass
class QuantileTable:
    alphas: list[float]
    q_star: list[float]
    n_draws: int
    grid_step: float
    grid_halfwidth: float
    seed: int | None = None
    draws: np.ndarray | None = field(default=None, repr=False)

    def quantile(self, beta: float) -> float:
        if not 0.0 < beta < 1.0:
            raise ValueError("quantile level must lie in (0, 1)")
        if self.draws is not None:
            return float(np.quantile(self.draws, beta))
        return float(np.interp(beta, self.alphas, self.q_star))

    def to_json(self) -> str:
        return json.dumps({
            "schema_version": SCHEMA_VERSION,
            "kind": "quantile_table",
            "alphas": list(self.alphas),
            "q_star": list(self.q_star),
            "n_draws": self.n_draws,
            "grid_step": self.grid_step,
            "grid_halfwidth": self.grid_halfwidth,
            "seed": self.seed,
        }, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "QuantileTable":
        doc = json.loads(text)
        if doc.get("kind") != "quantile_table":
            raise ValueError("not a quantile table document")
        if str(doc.get("schema_version", "")).split(".")[0] != SCHEMA_VERSION.split(".")[0]:
            raise ValueError(f"unsupported schema version {doc.get('schema_version')}")
        return cls(doc["alphas"], doc["q_star"], doc["n_draws"], doc["grid_step"],
                   doc["grid_halfwidth"], doc.get("seed"))


def simulate_standard_quantiles(n_draws: int = 10_000, grid_step: float = 0.01,
                                halfwidth: float = 30.0, seed=0,
                                alphas=DEFAULT_ALPHAS) -> QuantileTable:
    """Empirical quantiles of ``argmin_u B(u) + |u|``."""
    if n_draws < 1000:
        raise ValueError("need at least 1000 draws")
    if grid_step > 0.05:
        raise ValueError("grid step must be at most 0.05")
    if halfwidth < 20:
        raise ValueError("halfwidth must be at least 20")
    draws = simulate_argmin(n_draws, grid_step, halfwidth, 1.0, seed)
    q = np.quantile(draws, alphas)
    return QuantileTable(list(map(float, alphas)), q.tolist(), n_draws, grid_step,
                         halfwidth, seed, draws)


@dataclass
class ConfidenceInterval:
    k: int
    level: float
    lo: int
    hi: int
    lo_raw: float
    hi_raw: float
    flag: str | None = None

    @property
    def width(self) -> int:
        return self.hi - self.lo


def interval_scale(kappa_hat: float, sigma2_inf: float, p: int, r: float) -> float:
    """Factor turning standard quantiles into time offsets: sigma^2 / kappa^(p/r + 2)."""
    return sigma2_inf / kappa_hat ** (p / r + 2.0)


def confidence_interval(eta_tilde: int, kappa_hat: float, sigma2_inf: float, p: int, r: float,
                        alpha: float, table: QuantileTable, T: int | None = None,
                        k: int = 1) -> ConfidenceInterval:
    """Interval ``eta_tilde + sigma^2 q*(beta) / kappa^(p/r+2)`` for beta = alpha/2, 1 - alpha/2.

    The standard quantiles are rescaled by ``sigma^2`` because
    ``argmin sigma B(u) + |u|`` has the law of ``sigma^2 argmin B(u) + |u|``.
    Endpoints are rounded outward and clipped to ``[1, T]``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if not kappa_hat > 0:
        raise ValueError("kappa_hat must be positive")
    if sigma2_inf < 0:
        raise ValueError("sigma2_inf must be non-negative")
    if sigma2_inf == 0.0:
        return ConfidenceInterval(k, 1.0 - alpha, int(eta_tilde), int(eta_tilde),
                                  float(eta_tilde), float(eta_tilde), flag="degenerate variance")
    scale = interval_scale(kappa_hat, sigma2_inf, p, r)
    lo_raw = eta_tilde + scale * table.quantile(alpha / 2.0)
    hi_raw = eta_tilde + scale * table.quantile(1.0 - alpha / 2.0)
    lo = int(math.floor(min(lo_raw, eta_tilde)))
    hi = int(math.ceil(max(hi_raw, eta_tilde)))
    if T is not None:
        lo, hi = max(lo, 1), min(hi, T)
    else:
        lo = max(lo, 1)
    return ConfidenceInterval(k, 1.0 - alpha, lo, hi, lo_raw, hi_raw)
