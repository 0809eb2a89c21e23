"""Closed-form discrete-time model of the two-user channel.

Each receiver sees its own symbol rotated by a power-dependent phase (its
own power plus a window of the other user's powers) and smeared across the
filter bank by a leakage factor that depends on the fractional frequency
``v`` induced by the power difference at the edges of the walk-off window.
Receiver 2, whose signal arrives one walk-off late, reads the other user's
powers at look-ahead indices.

Two conventions exist for the index of receiver 2's own-power phase term:
``symmetric`` anchors it on the detected symbol itself (index j, mirroring
receiver 1) and ``advanced`` on the look-ahead symbol j+M that shares the
filter window with the undelayed co-propagating field.  The waveform oracle
accepts either; the discrete model implements both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .focusing import FrequencySet
from .params import Coefficients

TWO_PI = 2.0 * math.pi

VARIANTS = ("symmetric", "advanced")
NORMALIZATIONS = ("physical", "normalized")

# Below this |v - f| the leakage factor switches to a series expansion to
# avoid 0/0; v is a real number for general (non-focused) inputs.
U_SERIES_THRESHOLD = 1e-8


class SymbolBlock:
    """Finite complex symbol sequence; any index outside 0..n-1 reads as 0."""

    def __init__(self, symbols, user: int = 1):
        arr = np.atleast_1d(np.asarray(symbols, dtype=complex))
        if arr.ndim != 1:
            raise ValueError("symbols must be one-dimensional")
        if user not in (1, 2):
            raise ValueError(f"user must be 1 or 2, got {user!r}")
        arr = arr.copy()
        arr.setflags(write=False)
        self.symbols = arr
        self.user = user
        self._power = np.abs(arr) ** 2

    def __len__(self) -> int:
        return int(self.symbols.size)

    def __getitem__(self, j: int) -> complex:
        if 0 <= j < len(self):
            return complex(self.symbols[j])
        return 0j

    def power(self, j: int) -> float:
        """|x[j]|^2 with the zero-outside convention."""
        if 0 <= j < len(self):
            return float(self._power[j])
        return 0.0

    def shifted(self, s: int) -> "SymbolBlock":
        """Block delayed by s symbols (zero padded at the front)."""
        if s < 0:
            raise ValueError("shift must be >= 0")
        return SymbolBlock(np.concatenate([np.zeros(s, dtype=complex), self.symbols]), self.user)


@dataclass
class ReceiverOutput:
    """Complex filter-bank samples keyed by (time index j, frequency index f)."""

    values: dict[tuple[int, int], complex]
    freq_set: FrequencySet
    normalization: str
    receiver: int
    es: float = 1.0

    def __post_init__(self) -> None:
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
        if self.receiver not in (1, 2):
            raise ValueError("receiver must be 1 or 2")

    @property
    def block_length(self) -> int:
        if not self.values:
            return 0
        return 1 + max(j for j, _ in self.values)

    def __getitem__(self, key: tuple[int, int]) -> complex:
        return self.values[key]


def receiver_output_rows(out: ReceiverOutput) -> list[tuple]:
    """Flatten to CSV rows (j, f, re, im, receiver, normalization)."""
    rows = []
    for j in range(out.block_length):
        for f in out.freq_set:
            y = out.values[(j, f)]
            rows.append((j, f, y.real, y.imag, out.receiver, out.normalization))
    return rows


def u_factor(v: float, f: float) -> complex:
    """Filter leakage factor: (exp(i*2*pi*(v-f)) - 1) / (i*2*pi*(v-f)), 1 at v = f.

    Equals 1 when the induced frequency v sits exactly on filter f, vanishes
    when v - f is any other integer, and rolls off like 1/|v - f| otherwise.
    """
    delta = v - f
    theta = TWO_PI * delta
    if abs(delta) < U_SERIES_THRESHOLD:
        # second-order expansion of (e^{i*theta} - 1)/(i*theta)
        return 1.0 + 0.5j * theta
    return (np.exp(1j * theta) - 1.0) / (1j * theta)


def v1(j: int, x2: SymbolBlock, h12: float, M: int) -> float:
    """Frequency induced at receiver 1: h12*(|x2[j]|^2 - |x2[j-M]|^2)/(2*pi)."""
    return h12 * (x2.power(j) - x2.power(j - M)) / TWO_PI


def v2(
    j: int,
    x1: SymbolBlock,
    h21: float,
    M: int,
    *,
    x2: SymbolBlock | None = None,
    mixed: bool = False,
) -> float:
    """Frequency induced at receiver 2: h21*(|x1[j+2M]|^2 - |x1[j+M]|^2)/(2*pi).

    With ``mixed=True`` the subtracted power is read from user 2's stream
    (|x2[j+M]|^2) instead.  That form mixes the two users inside one
    difference and is kept only as a diagnostic; it does not match the
    walk-off geometry and is never used by the simulation paths.
    """
    lead = x1.power(j + 2 * M)
    if mixed:
        if x2 is None:
            raise ValueError("mixed form needs the x2 block")
        return h21 * (lead - x2.power(j + M)) / TWO_PI
    return h21 * (lead - x1.power(j + M)) / TWO_PI


def _scale(coeffs: Coefficients, normalization: str) -> float:
    if normalization == "physical":
        return coeffs.Es
    if normalization == "normalized":
        return 1.0
    raise ValueError(f"normalization must be one of {NORMALIZATIONS}")


def rx1_noiseless(
    j: int,
    f: int,
    x1: SymbolBlock,
    x2: SymbolBlock,
    coeffs: Coefficients,
    normalization: str = "physical",
) -> complex:
    """Noiseless receiver-1 filter output at (j, f)."""
    amp = x1[j]
    scale = _scale(coeffs, normalization)
    if amp == 0:
        return 0j
    M = coeffs.M
    cross = sum(x2.power(j - r) for r in range(1, M + 1))
    phase = coeffs.h11 * x1.power(j) + coeffs.h12 * cross
    return amp * scale * np.exp(1j * phase) * u_factor(v1(j, x2, coeffs.h12, M), f)


def rx2_noiseless(
    j: int,
    f: int,
    x1: SymbolBlock,
    x2: SymbolBlock,
    coeffs: Coefficients,
    variant: str = "symmetric",
    normalization: str = "physical",
) -> complex:
    """Noiseless receiver-2 filter output at (j, f)."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    amp = x2[j]
    scale = _scale(coeffs, normalization)
    if amp == 0:
        return 0j
    M = coeffs.M
    cross = sum(x1.power(j + 2 * M - r) for r in range(1, M + 1))
    own_idx = j + M if variant == "advanced" else j
    phase = coeffs.h21 * cross + coeffs.h22 * x2.power(own_idx)
    return amp * scale * np.exp(1j * phase) * u_factor(v2(j, x1, coeffs.h21, M), f)


def noise_std(coeffs: Coefficients, normalization: str) -> float:
    """Per-sample complex noise standard deviation for the chosen normalization.

    The filter-output noise variance is N*Es in physical units; dividing the
    signal by Es leaves variance N/Es.
    """
    if normalization == "physical":
        var = coeffs.N * coeffs.Es
    elif normalization == "normalized":
        var = coeffs.N / coeffs.Es
    else:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    return math.sqrt(var)


def simulate(
    x1: SymbolBlock,
    x2: SymbolBlock,
    F1: FrequencySet,
    F2: FrequencySet,
    coeffs: Coefficients,
    variant: str = "symmetric",
    noise_on: bool = True,
    seed: int = 0,
    normalization: str = "physical",
) -> tuple[ReceiverOutput, ReceiverOutput]:
    """One seeded run of the discrete-time channel for both receivers.

    Noise samples are independent circularly-symmetric complex Gaussians per
    (j, f) key, drawn in a fixed key order from two per-receiver streams, so
    results are reproducible bit for bit from the seed alone.
    """
    ss1, ss2 = np.random.SeedSequence(seed).spawn(2)
    outputs = []
    for receiver, (block, fset, ss) in enumerate(
        [(x1, F1, ss1), (x2, F2, ss2)], start=1
    ):
        n = len(block)
        values: dict[tuple[int, int], complex] = {}
        for j in range(n):
            for f in fset:
                if receiver == 1:
                    y = rx1_noiseless(j, f, x1, x2, coeffs, normalization)
                else:
                    y = rx2_noiseless(j, f, x1, x2, coeffs, variant, normalization)
                values[(j, f)] = y
        if noise_on and coeffs.N > 0:
            rng = np.random.default_rng(ss)
            sigma = noise_std(coeffs, normalization) / math.sqrt(2.0)
            z = rng.standard_normal((n * len(fset), 2))
            noise = (z[:, 0] + 1j * z[:, 1]) * sigma
            for k, key in enumerate(values):
                values[key] += complex(noise[k])
        outputs.append(
            ReceiverOutput(
                values=values,
                freq_set=fset,
                normalization=normalization,
                receiver=receiver,
                es=coeffs.Es,
            )
        )
    return outputs[0], outputs[1]
