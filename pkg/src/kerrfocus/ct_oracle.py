"""Waveform-level simulation used as an independent check of the discrete model.

Square pulses are laid on a uniform grid with OS samples per symbol, the
zero-dispersion propagation (pure walk-off delay plus power-driven phase
rotation) is applied sample by sample, and the receiver filter bank is
evaluated as a plain convolution sum.  Pulse shaping and the delay are exact
on the grid; the only discretization error lives in the phase integrals and
the filter sums, and it shrinks like 1/OS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dt_model import SymbolBlock, ReceiverOutput, simulate
from .focusing import FrequencySet
from .params import PhysicalParams, derive_coefficients

GRID_REL_TOL = 1e-9


class GridTooShort(ValueError):
    """A phase-integration or sampling window leaves the stored grid."""


class KeyMismatch(ValueError):
    """Receiver outputs cover different (j, f) keys or normalizations."""


@dataclass
class Waveform:
    """Uniformly sampled complex field, zero outside the stored interval.

    ``samples[k]`` holds the value on the cell [t0 + k*dt, t0 + (k+1)*dt);
    dt*OS is the symbol duration exactly.
    """

    samples: np.ndarray
    dt: float
    t0: float
    OS: int

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if self.OS < 8:
            raise ValueError(f"oversampling factor must be >= 8, got {self.OS!r}")

    @property
    def Ts(self) -> float:
        return self.dt * self.OS

    @property
    def t_end(self) -> float:
        return self.t0 + self.samples.size * self.dt

    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.dt)


def build_waveform(
    x: SymbolBlock,
    Ts: float,
    Es: float,
    OS: int,
    pad_before: int = 0,
    pad_after: int = 2,
) -> Waveform:
    """Square-pulse waveform of a symbol block: x[m]*sqrt(Es/Ts) on symbol m.

    ``pad_before``/``pad_after`` add empty symbols around the block so that
    walk-off windows and filter windows stay on the grid.
    """
    if OS < 8:
        raise ValueError(f"oversampling factor must be >= 8, got {OS!r}")
    if pad_before < 0 or pad_after < 0:
        raise ValueError("padding must be >= 0")
    n = len(x)
    dt = Ts / OS
    amp = math.sqrt(Es / Ts)
    body = np.repeat(x.symbols * amp, OS) if n else np.zeros(0, dtype=complex)
    samples = np.concatenate(
        [np.zeros(pad_before * OS, dtype=complex), body, np.zeros(pad_after * OS, dtype=complex)]
    )
    return Waveform(samples=samples, dt=dt, t0=-pad_before * Ts, OS=OS)


def psi12m(t, m: int, M: int, Es: float, Ts: float):
    """Walk-off overlap of pulse m: ramp up over one symbol, hold for M-1, ramp down.

    Accepts a scalar or array ``t`` and returns the overlap integral value
    (1/Ts times the window integral of the pulse power), scaled by Es/Ts^2.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    t = np.asarray(t, dtype=float)
    lo = m * Ts
    scale = Es / Ts**2
    out = np.select(
        [
            (t >= lo) & (t < lo + Ts),
            (t >= lo + Ts) & (t < lo + M * Ts),
            (t >= lo + M * Ts) & (t < lo + (M + 1) * Ts),
        ],
        [scale * (t - lo), scale * Ts, scale * ((m + M + 1) * Ts - t)],
        default=0.0,
    )
    return out if out.ndim else float(out)


def _delay_cells(L: float, d: float, dt: float) -> int:
    cells = L * d / dt
    W = int(round(cells))
    if W < 1 or abs(cells - W) > GRID_REL_TOL * max(W, 1):
        raise ValueError(f"walk-off L*d = {L * d!r} is not a whole number of grid cells")
    return W


def _check_aligned(w1: Waveform, w2: Waveform) -> None:
    if (
        w1.samples.size != w2.samples.size
        or w1.OS != w2.OS
        or abs(w1.dt - w2.dt) > GRID_REL_TOL * w1.dt
        or abs(w1.t0 - w2.t0) > GRID_REL_TOL * max(abs(w1.t0), w1.dt)
    ):
        raise ValueError("waveforms must share one grid (t0, dt, length)")


def _cumulative_power(w: Waveform) -> np.ndarray:
    c = np.empty(w.samples.size + 1)
    c[0] = 0.0
    np.cumsum(np.abs(w.samples) ** 2 * w.dt, out=c[1:])
    return c


def _support(w: Waveform) -> tuple[int, int] | None:
    nz = np.nonzero(w.samples)[0]
    if nz.size == 0:
        return None
    return int(nz[0]), int(nz[-1])


def phi1_grid(w1: Waveform, w2: Waveform, gamma1: float, L: float, d: float) -> np.ndarray:
    """Total phase on field 1: gamma1*L*|A1|^2 plus the trailing-window power of field 2.

    The window integral runs over [t - L*d, t].  Windows that would reach
    before the grid at times where field 1 is nonzero raise GridTooShort;
    where field 1 vanishes the phase is immaterial and a clipped window is
    used.
    """
    _check_aligned(w1, w2)
    W = _delay_cells(L, d, w1.dt)
    sup = _support(w1)
    if sup is not None and sup[0] - W < 0:
        raise GridTooShort(
            "field-2 power window reaches before the grid where field 1 is nonzero; "
            "extend the leading padding"
        )
    c2 = _cumulative_power(w2)
    k = np.arange(w1.samples.size)
    window = c2[k] - c2[np.maximum(k - W, 0)]
    phi11 = gamma1 * L * np.abs(w1.samples) ** 2
    phi12 = (2.0 * gamma1 / d) * window
    return phi11 + phi12


def phi2_grid(
    w1: Waveform,
    w2: Waveform,
    gamma2: float,
    L: float,
    d: float,
    variant: str = "symmetric",
) -> np.ndarray:
    """Total phase on field 2 at observation time t.

    The cross term integrates field 1's power over the leading window
    [t, t + L*d].  The own-power term reads |A2| at t (``advanced``) or at
    t - L*d, the delayed field's own sample (``symmetric``).
    """
    if variant not in ("symmetric", "advanced"):
        raise ValueError(f"unknown variant {variant!r}")
    _check_aligned(w1, w2)
    W = _delay_cells(L, d, w1.dt)
    n = w2.samples.size
    sup = _support(w2)
    if sup is not None and sup[1] + 2 * W > n:
        raise GridTooShort(
            "field-1 power window reaches past the grid where (delayed) field 2 is "
            "nonzero; extend the trailing padding"
        )
    c1 = _cumulative_power(w1)
    k = np.arange(n)
    window = c1[np.minimum(k + W, n)] - c1[k]
    p2 = np.abs(w2.samples) ** 2
    if variant == "advanced":
        own = p2
    else:
        own = np.zeros(n)
        own[W:] = p2[: n - W]
    return gamma2 * L * own + (2.0 * gamma2 / d) * window


def propagate(
    w1: Waveform,
    w2: Waveform,
    params: PhysicalParams,
    variant: str = "symmetric",
) -> tuple[Waveform, Waveform]:
    """Zero-dispersion propagation: phase rotation plus a walk-off delay of field 2."""
    _check_aligned(w1, w2)
    W = _delay_cells(params.L, params.d, w1.dt)
    out1 = w1.samples * np.exp(1j * phi1_grid(w1, w2, params.gamma1, params.L, params.d))
    phase2 = phi2_grid(w1, w2, params.gamma2, params.L, params.d, variant)
    delayed = np.zeros_like(w2.samples)
    delayed[W:] = w2.samples[: w2.samples.size - W]
    out2 = delayed * np.exp(1j * phase2)
    mk = lambda s, w: Waveform(samples=s, dt=w.dt, t0=w.t0, OS=w.OS)
    return mk(out1, w1), mk(out2, w2)


def with_grid_noise(w: Waveform, N: float, seed: int = 0) -> Waveform:
    """Add white complex noise of variance N/dt per sample (sanity checks only)."""
    rng = np.random.default_rng(seed)
    sigma = math.sqrt(N / w.dt / 2.0)
    z = rng.standard_normal((w.samples.size, 2))
    return Waveform(
        samples=w.samples + (z[:, 0] + 1j * z[:, 1]) * sigma, dt=w.dt, t0=w.t0, OS=w.OS
    )


def filter_and_sample(
    r: Waveform,
    F: FrequencySet,
    receiver: int,
    n: int,
    M: int,
    Es: float,
) -> ReceiverOutput:
    """Matched-filter bank outputs sampled once per symbol, physical normalization.

    Receiver 1 samples at j*Ts, receiver 2 at (j+M)*Ts so that output index
    j carries symbol j of the delayed signal.
    """
    if receiver not in (1, 2):
        raise ValueError("receiver must be 1 or 2")
    Ts = r.Ts
    OS = r.OS
    offset = M if receiver == 2 else 0
    starts = np.empty(n, dtype=int)
    for j in range(n):
        pos = ((j + offset) * Ts - r.t0) / r.dt
        i0 = int(round(pos))
        if abs(pos - i0) > 1e-6:
            raise ValueError("sampling instants do not sit on the grid")
        if i0 < 0 or i0 + OS > r.samples.size:
            raise GridTooShort(
                f"filter window for j={j} spans samples outside the grid"
            )
        starts[j] = i0
    windows = np.stack([r.samples[i : i + OS] for i in starts]) if n else np.zeros((0, OS))
    freqs = np.array(list(F))
    kernel = np.exp(-2j * np.pi * np.outer(freqs, np.arange(OS)) / OS)
    outs = windows @ kernel.T * (math.sqrt(Es / Ts) * r.dt)
    values = {
        (j, int(f)): complex(outs[j, fi])
        for j in range(n)
        for fi, f in enumerate(freqs)
    }
    return ReceiverOutput(
        values=values, freq_set=F, normalization="physical", receiver=receiver, es=Es
    )


def compare(oracle: ReceiverOutput, model: ReceiverOutput, x: SymbolBlock) -> float:
    """Worst-case relative deviation between two receiver outputs.

    Deviations are normalized per key by scale*max(|x[j]|, 1e-12), with
    scale = Es in physical normalization and 1 otherwise, so that filters
    with (near) zero output are judged against the symbol magnitude rather
    than against each other.
    """
    if oracle.values.keys() != model.values.keys():
        raise KeyMismatch("outputs cover different (j, f) keys")
    if oracle.normalization != model.normalization:
        raise KeyMismatch("outputs use different normalizations")
    scale = oracle.es if oracle.normalization == "physical" else 1.0
    worst = 0.0
    for (j, f), y in oracle.values.items():
        denom = scale * max(abs(x[j]), 1e-12)
        worst = max(worst, abs(y - model.values[(j, f)]) / denom)
    return worst


def model_comparison(
    params: PhysicalParams,
    x1: SymbolBlock,
    x2: SymbolBlock,
    F1: FrequencySet,
    F2: FrequencySet,
    OS: int,
    variant: str = "symmetric",
) -> tuple[dict[tuple[int, int, int], float], float]:
    """Run the waveform pipeline against the closed-form model, noiseless.

    Returns per-key relative errors keyed (receiver, j, f) and their max.
    """
    coeffs = derive_coefficients(params)
    M = coeffs.M
    n = max(len(x1), len(x2))
    pads = dict(pad_before=M, pad_after=2 * M + 2)
    w1 = build_waveform(x1, params.Ts, params.Es, OS, pads["pad_before"],
                        pads["pad_after"] + (n - len(x1)))
    w2 = build_waveform(x2, params.Ts, params.Es, OS, pads["pad_before"],
                        pads["pad_after"] + (n - len(x2)))
    r1, r2 = propagate(w1, w2, params, variant)
    o1 = filter_and_sample(r1, F1, receiver=1, n=len(x1), M=M, Es=params.Es)
    o2 = filter_and_sample(r2, F2, receiver=2, n=len(x2), M=M, Es=params.Es)
    m1, m2 = simulate(x1, x2, F1, F2, coeffs, variant=variant, noise_on=False)
    errors: dict[tuple[int, int, int], float] = {}
    for receiver, oracle, model, x in ((1, o1, m1, x1), (2, o2, m2, x2)):
        scale = params.Es
        for (j, f), y in oracle.values.items():
            denom = scale * max(abs(x[j]), 1e-12)
            errors[(receiver, j, f)] = abs(y - model.values[(j, f)]) / denom
    return errors, (max(errors.values()) if errors else 0.0)
