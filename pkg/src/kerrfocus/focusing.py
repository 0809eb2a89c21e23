"""Interference-focusing ring constellations and receiver frequency sets.

A transmitter focuses its interference by keeping every symbol power on the
grid 2*pi*n/h_cross, where h_cross is the coefficient through which that
power rotates the other receiver's phase.  The cross rotation is then always
a whole number of turns and lands on exactly one filter of the other
receiver's bank.  The filter indices a receiver needs are the pairwise
differences of the interfering user's ring indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

# Focusing congruence check: h_cross*|x|^2 must be a multiple of 2*pi to
# this relative tolerance.
CONGRUENCE_REL_TOL = 1e-9


class ZeroCoupling(ValueError):
    """h_cross = 0: no interference to focus, ring grid undefined."""


class InfeasiblePower(ValueError):
    """Even the smallest allowed ring violates the average-power budget."""


class InvalidExplicitSet(ValueError):
    """An explicitly requested ring set violates the average-power budget."""


@dataclass(frozen=True)
class RingIndexSet:
    """Strictly increasing positive ring indices used by one transmitter."""

    indices: tuple[int, ...]
    owner: int = 1

    def __post_init__(self) -> None:
        if len(self.indices) == 0:
            raise ValueError("ring index set must be non-empty")
        if any((not isinstance(n, int)) or n < 1 for n in self.indices):
            raise ValueError(f"ring indices must be integers >= 1, got {self.indices!r}")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("ring indices must be strictly increasing")
        if self.owner not in (1, 2):
            raise ValueError(f"owner must be 1 or 2, got {self.owner!r}")

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class FrequencySet:
    """Sorted integer filter offsets; always contains 0 and is symmetric."""

    frequencies: tuple[int, ...]

    def __post_init__(self) -> None:
        freqs = self.frequencies
        if sorted(freqs) != list(freqs) or len(set(freqs)) != len(freqs):
            raise ValueError("frequencies must be sorted and unique")
        if 0 not in freqs:
            raise ValueError("frequency set must contain 0")
        if set(freqs) != {-f for f in freqs}:
            raise ValueError("frequency set must be symmetric about 0")

    def __len__(self) -> int:
        return len(self.frequencies)

    def __iter__(self):
        return iter(self.frequencies)


@dataclass
class RingConstellation:
    """Points on rings of fixed powers with Q uniform phases per ring.

    ``points`` is ring-major: the q-th phase of the r-th ring sits at index
    r*Q + q.  All points are used with equal probability downstream.
    """

    ring_powers: np.ndarray
    phases_per_ring: int
    points: np.ndarray
    h_cross: float
    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        self.ring_powers = np.asarray(self.ring_powers, dtype=float)
        self.points = np.asarray(self.points, dtype=complex)
        if self.points.size != self.ring_powers.size * self.phases_per_ring:
            raise ValueError("point count must be #rings * phases_per_ring")
        turns = self.h_cross * np.abs(self.points) ** 2 / TWO_PI
        off = np.abs(turns - np.round(turns))
        if np.any(off > CONGRUENCE_REL_TOL * np.maximum(1.0, np.abs(turns))):
            raise ValueError("constellation points violate the focusing power grid")

    def __len__(self) -> int:
        return int(self.points.size)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.sqrt(self.ring_powers)

    @property
    def mean_power(self) -> float:
        return float(np.mean(self.ring_powers))


def ring_powers(n_set: RingIndexSet, h_cross: float) -> list[float]:
    """Powers 2*pi*n/h_cross of the selected rings, in index order."""
    if h_cross == 0:
        raise ZeroCoupling("h_cross = 0: focusing is undefined without interference")
    if h_cross < 0:
        raise ValueError("h_cross must be > 0")
    return [TWO_PI * n / h_cross for n in n_set.indices]


def _mean_power(indices: Sequence[int], h_cross: float) -> float:
    return TWO_PI * sum(indices) / (len(indices) * h_cross)


def select_rings(
    P: float,
    h_cross: float,
    *,
    explicit: Iterable[int] | None = None,
    quadratic: int | None = None,
    owner: int = 1,
) -> RingIndexSet:
    """Choose ring indices under the average-power budget P.

    Exactly one strategy must be given:

    explicit:  use the given indices, validated against the budget.
    quadratic: use indices c*k^2 for k = 1..K (c = the given integer),
               with K maximal such that the uniform average power
               (2*pi/h_cross)*mean(indices) stays within P.  Square
               indices make the ring amplitudes equally spaced.
    """
    if P <= 0:
        raise ValueError("power budget P must be > 0")
    if h_cross == 0:
        raise ZeroCoupling("h_cross = 0: focusing is undefined without interference")
    if h_cross < 0:
        raise ValueError("h_cross must be > 0")
    if (explicit is None) == (quadratic is None):
        raise ValueError("give exactly one of explicit= or quadratic=")

    if explicit is not None:
        idx = tuple(sorted(int(n) for n in explicit))
        s = RingIndexSet(idx, owner=owner)
        if _mean_power(idx, h_cross) > P * (1.0 + 1e-12):
            raise InvalidExplicitSet(
                f"explicit rings {idx} need average power "
                f"{_mean_power(idx, h_cross):.6g} > budget {P:.6g}"
            )
        return s

    c = int(quadratic)
    if c < 1:
        raise ValueError("quadratic strategy parameter c must be an integer >= 1")
    indices: list[int] = []
    k = 1
    while True:
        candidate = indices + [c * k * k]
        if _mean_power(candidate, h_cross) > P * (1.0 + 1e-12):
            break
        indices = candidate
        k += 1
    if not indices:
        raise InfeasiblePower(
            f"smallest ring power {TWO_PI * c / h_cross:.6g} exceeds budget {P:.6g}"
        )
    return RingIndexSet(tuple(indices), owner=owner)


def difference_set(n_set: RingIndexSet) -> FrequencySet:
    """All pairwise differences m1 - m2 of the ring indices, sorted."""
    diffs = {a - b for a in n_set.indices for b in n_set.indices}
    return FrequencySet(tuple(sorted(diffs)))


def build_constellation(n_set: RingIndexSet, h_cross: float, Q: int) -> RingConstellation:
    """Place Q uniform phases on every selected ring."""
    if not isinstance(Q, int) or Q < 1:
        raise ValueError(f"phase count Q must be an integer >= 1, got {Q!r}")
    powers = np.asarray(ring_powers(n_set, h_cross), dtype=float)
    amps = np.sqrt(powers)
    phases = np.exp(2j * np.pi * np.arange(Q) / Q)
    points = (amps[:, None] * phases[None, :]).ravel()
    return RingConstellation(
        ring_powers=powers,
        phases_per_ring=Q,
        points=points,
        h_cross=h_cross,
        indices=n_set.indices,
    )


def default_phase_count(P: float, N: float) -> int:
    """Phase resolution matched to amplitude resolution: max(4, round(pi*sqrt(P/N))).

    Both amplitude and phase then refine at the same rate as the power
    budget grows, which is what lets each contribute half the rate slope.
    """
    if P <= 0 or N <= 0:
        raise ValueError("P and N must be > 0")
    return max(4, int(round(math.pi * math.sqrt(P / N))))
