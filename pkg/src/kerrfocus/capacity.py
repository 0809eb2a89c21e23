"""Rate estimation on the focused single-filter channel.

Under focusing the interference collapses onto one known filter, leaving the
scalar channel Y = X*exp(i*h_self*|X|^2) + Z with circularly-symmetric
complex Gaussian Z of variance N_eff.  The conditional density is known in
closed form, so mutual information is estimated by a plug-in Monte-Carlo
average of the exact log density ratio.  Sweeps over the power budget fit
the rate slope against log2(P/N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import logsumexp
from scipy.stats import t as student_t

from .focusing import RingConstellation, build_constellation, default_phase_count, select_rings
from .params import Coefficients

LN2 = math.log(2.0)

# Above this many point-sample products the mixture density switches to a
# neighborhood evaluation backed by a KD-tree; terms dropped there are below
# double precision relative to the nearest one (see _TREE_CUTOFF).
_DENSE_LIMIT = 2.0e7
# exp(-60) ~ 9e-27: excluded mixture terms are at least this factor below
# the in-ball maximum, so truncation is invisible at double precision.
_TREE_CUTOFF = 60.0


class DegenerateConstellation(ValueError):
    """Mutual information is undefined for an empty constellation."""


class GridDegenerate(ValueError):
    """The sweep grid cannot support a slope fit."""


@dataclass(frozen=True)
class MIEstimate:
    """Monte-Carlo mutual information estimate in bits per symbol."""

    bits: float
    std_err: float
    samples: int


@dataclass
class SweepRow:
    p: float
    noise: float
    size: int
    rings: int
    phases: int
    estimate: MIEstimate

    @property
    def snr(self) -> float:
        return self.p / self.noise

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.snr)

    @property
    def snr_log2(self) -> float:
        return math.log2(self.snr)


@dataclass
class SweepResult:
    rows: list[SweepRow]
    slope: float
    ci_low: float
    ci_high: float
    fit_points: int


@dataclass
class SweepConfig:
    """Grid and estimator settings for a rate sweep.

    ``high_power`` mode walks a strictly increasing grid of P1 values at
    fixed noise, with the second user's budget tied as P2 = P1**beta.
    ``low_noise`` mode keeps both budgets fixed and walks a strictly
    increasing noise grid.  The swept user's constellation is rebuilt at
    every grid point (square-index rings, ``phases`` per ring or the default
    resolution rule when unset).
    """

    mode: str = "high_power"
    p1_grid: Sequence[float] | None = None
    beta: float = 1.0
    noise: float = 1.0
    p1: float | None = None
    p2: float | None = None
    noise_grid: Sequence[float] | None = None
    user: int = 1
    ring_scale: int = 1
    phases: int | None = None
    amplitude_only: bool = False
    samples: int = 20000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in ("high_power", "low_noise"):
            raise ValueError(f"unknown sweep mode {self.mode!r}")
        if self.user not in (1, 2):
            raise ValueError("user must be 1 or 2")
        grid = self.p1_grid if self.mode == "high_power" else self.noise_grid
        if grid is None:
            raise ValueError(f"{self.mode} mode needs its grid")
        grid = list(grid)
        if len(grid) < 4:
            raise GridDegenerate("slope fitting needs at least 4 grid points")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise GridDegenerate("grid must be strictly increasing")
        if self.mode == "high_power":
            if self.noise <= 0:
                raise ValueError("fixed noise must be > 0")
        else:
            if self.p1 is None or self.p2 is None:
                raise ValueError("low_noise mode needs fixed p1 and p2")


def log_density(y: complex, x: complex, h_self: float, N_eff: float) -> float:
    """Log density of Y = x*exp(i*h_self*|x|^2) + Z with Z ~ CN(0, N_eff)."""
    if N_eff <= 0:
        raise ValueError("N_eff must be > 0")
    mu = x * np.exp(1j * h_self * abs(x) ** 2)
    return float(-abs(y - mu) ** 2 / N_eff - math.log(math.pi * N_eff))


def _draw(means: np.ndarray, N_eff: float, S: int, seed) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, means.size, size=S)
    z = rng.standard_normal((S, 2))
    y = means[idx] + (z[:, 0] + 1j * z[:, 1]) * math.sqrt(N_eff / 2.0)
    return idx, y


def _bits_dense(y: np.ndarray, idx: np.ndarray, means: np.ndarray, N_eff: float) -> np.ndarray:
    K = means.size
    bits = np.empty(y.size)
    chunk = max(1, int(4e6 // max(K, 1)))
    for lo in range(0, y.size, chunk):
        hi = min(lo + chunk, y.size)
        d2 = np.abs(y[lo:hi, None] - means[None, :]) ** 2
        logits = -d2 / N_eff
        log_self = logits[np.arange(hi - lo), idx[lo:hi]]
        log_mix = logsumexp(logits, axis=1) - math.log(K)
        bits[lo:hi] = (log_self - log_mix) / LN2
    return bits


def _bits_tree(y: np.ndarray, idx: np.ndarray, means: np.ndarray, N_eff: float) -> np.ndarray:
    K = means.size
    pts = np.column_stack([means.real, means.imag])
    tree = cKDTree(pts)
    ys = np.column_stack([y.real, y.imag])
    d1, _ = tree.query(ys, k=1)
    radius = np.sqrt(d1**2 + _TREE_CUTOFF * N_eff)
    balls = tree.query_ball_point(ys, radius)
    counts = np.fromiter((len(b) for b in balls), dtype=np.int64, count=len(balls))
    flat = np.concatenate([np.asarray(b, dtype=np.int64) for b in balls])
    rep = np.repeat(y, counts)
    logits = -np.abs(rep - means[flat]) ** 2 / N_eff
    # segmented logsumexp; every ball holds the sample's nearest point
    bounds = np.concatenate([[0], np.cumsum(counts)[:-1]])
    seg_max = np.maximum.reduceat(logits, bounds)
    seg_sum = np.add.reduceat(np.exp(logits - np.repeat(seg_max, counts)), bounds)
    log_mix = seg_max + np.log(seg_sum) - math.log(K)
    log_self = -np.abs(y - means[idx]) ** 2 / N_eff
    return (log_self - log_mix) / LN2


def mi_monte_carlo(
    c: RingConstellation,
    h_self: float,
    N_eff: float,
    S: int,
    seed=0,
) -> MIEstimate:
    """Plug-in Monte-Carlo mutual information of the focused scalar channel.

    Inputs are uniform over the constellation points.  Estimates are clipped
    at zero (pure-noise runs can dip epsilon-negative) and never exceed
    log2 of the constellation size by construction.
    """
    points = np.asarray(c.points, dtype=complex)
    if points.size == 0:
        raise DegenerateConstellation("constellation has no points")
    if S < 1000:
        raise ValueError("need at least 1000 samples")
    if N_eff <= 0:
        raise ValueError("N_eff must be > 0")
    means = points * np.exp(1j * h_self * np.abs(points) ** 2)
    idx, y = _draw(means, N_eff, S, seed)
    if points.size * S <= _DENSE_LIMIT:
        bits = _bits_dense(y, idx, means, N_eff)
    else:
        bits = _bits_tree(y, idx, means, N_eff)
    est = float(np.mean(bits))
    se = float(np.std(bits, ddof=1) / math.sqrt(S)) if S > 1 else 0.0
    return MIEstimate(bits=max(0.0, est), std_err=se, samples=S)


def amplitude_only_mi(
    c: RingConstellation,
    h_self: float,
    N_eff: float,
    S: int,
    seed=0,
) -> MIEstimate:
    """Mutual information of the same ring set with a single phase per ring."""
    flat = RingConstellation(
        ring_powers=c.ring_powers,
        phases_per_ring=1,
        points=np.sqrt(np.asarray(c.ring_powers, dtype=float)).astype(complex),
        h_cross=c.h_cross,
        indices=c.indices,
    )
    return mi_monte_carlo(flat, h_self, N_eff, S, seed)


def prelog_fit(rows: Sequence[SweepRow]) -> tuple[float, tuple[float, float]]:
    """Least-squares slope of bits against log2(P/N) with a 95% interval."""
    if len(rows) < 4:
        raise GridDegenerate("slope fitting needs at least 4 rows")
    x = np.array([r.snr_log2 for r in rows])
    y = np.array([r.estimate.bits for r in rows])
    if np.ptp(x) == 0:
        raise GridDegenerate("all grid points share one abscissa")
    xc = x - x.mean()
    sxx = float(np.sum(xc**2))
    slope = float(np.sum(xc * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    dof = len(rows) - 2
    s2 = float(np.sum(resid**2) / dof)
    half = float(student_t.ppf(0.975, dof) * math.sqrt(s2 / sxx))
    return slope, (slope - half, slope + half)


def _grid_points(cfg: SweepConfig) -> list[tuple[float, float]]:
    """(P_user, N) per grid point for the swept user."""
    if cfg.mode == "high_power":
        out = []
        for p1 in cfg.p1_grid:
            p = p1 if cfg.user == 1 else p1**cfg.beta
            out.append((float(p), cfg.noise))
        return out
    p = cfg.p1 if cfg.user == 1 else cfg.p2
    return [(float(p), float(n)) for n in cfg.noise_grid]


def sweep(cfg: SweepConfig, coeffs: Coefficients) -> SweepResult:
    """Estimate mutual information across the grid and fit the rate slope.

    Every point rebuilds the swept user's focusing constellation under its
    budget, estimates the rate and records it; the slope is fitted over the
    high-SNR half of the grid (at least 4 points) because the slope is an
    asymptotic quantity that low-SNR points bias downward.
    """
    h_cross = coeffs.h21 if cfg.user == 1 else coeffs.h12
    h_self = coeffs.h11 if cfg.user == 1 else coeffs.h22
    rows: list[SweepRow] = []
    for i, (P, N) in enumerate(_grid_points(cfg)):
        rings = select_rings(P, h_cross, quadratic=cfg.ring_scale, owner=cfg.user)
        Q = 1 if cfg.amplitude_only else (cfg.phases or default_phase_count(P, N))
        const = build_constellation(rings, h_cross, Q)
        point_seed = np.random.SeedSequence((cfg.seed, i))
        mi = mi_monte_carlo(const, h_self, N, cfg.samples, point_seed)
        rows.append(
            SweepRow(p=P, noise=N, size=len(const), rings=len(rings), phases=Q, estimate=mi)
        )
    ordered = sorted(rows, key=lambda r: r.snr)
    k = max(4, math.ceil(len(ordered) / 2))
    slope, (lo, hi) = prelog_fit(ordered[-k:])
    return SweepResult(rows=rows, slope=slope, ci_low=lo, ci_high=hi, fit_points=k)
