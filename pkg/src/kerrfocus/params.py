"""Fiber parameters and the phase-rotation coefficients of the discrete channel.

The discrete-time channel is fully characterized by four coefficients
``h11, h12, h21, h22`` (radians per power unit), an integer memory depth
``M`` and the signaling constants ``Es, N, Ts``.  The coefficients can be
derived from physical fiber parameters or set directly for synthetic
studies.  Units are abstract: any consistent power/time/length system works
because only the products entering the ``h`` values matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Relative tolerance when recovering the integer memory depth from L*d/Ts.
# Much looser than float rounding: meeting L*d = M*Ts is a deliberate
# modeling choice, not something to satisfy by luck.
MEMORY_REL_TOL = 1e-9


class NonPositiveGvm(ValueError):
    """The group-velocity mismatch d must be strictly positive."""


class NonIntegerMemory(ValueError):
    """L*d/Ts is not a positive integer, so the walk-off does not span whole symbols."""


def _memory_depth(L: float, d: float, Ts: float) -> int:
    ratio = L * d / Ts
    M = round(ratio)
    if M < 1 or abs(ratio - M) > MEMORY_REL_TOL * max(M, 1):
        raise NonIntegerMemory(
            f"L*d/Ts = {ratio!r} is not a positive integer; "
            "the walk-off must cover a whole number of symbols"
        )
    return M


@dataclass(frozen=True)
class PhysicalParams:
    """Physical description of the two-carrier link.

    gamma1, gamma2: nonlinear coefficients (rad per power unit per length unit)
    L: fiber length
    d: group-velocity mismatch (time per length), must be > 0
    Ts: symbol duration
    Es: pulse energy scale
    N: noise spectral density

    Second-order dispersion is zero by assumption, so no such fields exist.
    """

    gamma1: float
    gamma2: float
    L: float
    d: float
    Ts: float
    Es: float
    N: float = 0.0

    def __post_init__(self) -> None:
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ValueError("nonlinear coefficients must be >= 0")
        if self.L <= 0 or self.Ts <= 0 or self.Es <= 0:
            raise ValueError("L, Ts and Es must be > 0")
        if self.N < 0:
            raise ValueError("noise density N must be >= 0")
        if self.d <= 0:
            raise NonPositiveGvm(f"group-velocity mismatch must be > 0, got {self.d!r}")
        _memory_depth(self.L, self.d, self.Ts)  # raises NonIntegerMemory

    @property
    def memory(self) -> int:
        """Number of symbols the two carriers slide past each other."""
        return _memory_depth(self.L, self.d, self.Ts)

    @property
    def walkoff_distance(self) -> float:
        """Length over which the carriers walk through one symbol: Ts/d."""
        return self.Ts / self.d


@dataclass(frozen=True)
class Coefficients:
    """Phase-rotation coefficients of the discrete-time channel.

    ``h11``/``h22`` rotate each signal by its own power, ``h12``/``h21`` by
    the other signal's power.  ``Lw`` is the walk-off distance when the
    coefficients come from physical parameters and ``None`` for synthetic
    sets (a direct coefficient choice usually has no physical realization).
    """

    h11: float
    h12: float
    h21: float
    h22: float
    M: int
    Es: float
    N: float
    Ts: float
    Lw: float | None = None

    def __post_init__(self) -> None:
        for name in ("h11", "h12", "h21", "h22"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not isinstance(self.M, int) or self.M < 1:
            raise ValueError(f"memory depth M must be an integer >= 1, got {self.M!r}")
        if self.Es <= 0 or self.Ts <= 0:
            raise ValueError("Es and Ts must be > 0")
        if self.N < 0:
            raise ValueError("noise density N must be >= 0")


def derive_coefficients(p: PhysicalParams) -> Coefficients:
    """Compute the channel coefficients from physical parameters.

    h11 = gamma1*L*Es/Ts, h12 = 2*gamma1*Lw*Es/Ts and symmetrically for
    the second receiver (h22 with gamma2*L, h21 with 2*gamma2*Lw).
    """
    Lw = p.walkoff_distance
    scale = p.Es / p.Ts
    return Coefficients(
        h11=p.gamma1 * p.L * scale,
        h12=2.0 * p.gamma1 * Lw * scale,
        h21=2.0 * p.gamma2 * Lw * scale,
        h22=p.gamma2 * p.L * scale,
        M=p.memory,
        Es=p.Es,
        N=p.N,
        Ts=p.Ts,
        Lw=Lw,
    )


def direct_coefficients(
    h11: float,
    h12: float,
    h21: float,
    h22: float,
    M: int,
    Es: float = 1.0,
    N: float = 0.0,
    Ts: float = 1.0,
) -> Coefficients:
    """Build a synthetic coefficient set without physical provenance."""
    return Coefficients(h11=h11, h12=h12, h21=h21, h22=h22, M=M, Es=Es, N=N, Ts=Ts, Lw=None)
