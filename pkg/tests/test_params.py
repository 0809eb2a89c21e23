import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kerrfocus.params import (
    Coefficients,
    NonIntegerMemory,
    NonPositiveGvm,
    PhysicalParams,
    derive_coefficients,
    direct_coefficients,
)


def test_zero_nonlinearity_gives_zero_coefficients():
    p = PhysicalParams(gamma1=0, gamma2=0, L=1, d=1, Ts=1, Es=1)
    c = derive_coefficients(p)
    assert (c.h11, c.h12, c.h21, c.h22) == (0, 0, 0, 0)
    assert c.M == 1


def test_derived_coefficients_arithmetic():
    # Lw = Ts/d = 2, M = L*d/Ts = 1, h11 = gamma1*L*Es/Ts = 2, h12 = 2*gamma1*Lw*Es/Ts = 4
    p = PhysicalParams(gamma1=1, gamma2=1, L=2, d=0.5, Ts=1, Es=1)
    c = derive_coefficients(p)
    assert c.Lw == 2.0
    assert c.M == 1
    assert (c.h11, c.h12, c.h21, c.h22) == (2.0, 4.0, 4.0, 2.0)


def test_non_integer_memory_rejected():
    with pytest.raises(NonIntegerMemory):
        PhysicalParams(gamma1=1, gamma2=0, L=2, d=0.3, Ts=1, Es=1)  # L*d/Ts = 0.6


def test_negative_gvm_rejected():
    with pytest.raises(NonPositiveGvm):
        PhysicalParams(gamma1=1, gamma2=1, L=1, d=-1, Ts=1, Es=1)
    with pytest.raises(NonPositiveGvm):
        PhysicalParams(gamma1=1, gamma2=1, L=1, d=0, Ts=1, Es=1)


def test_direct_coefficients_worked_example():
    c = direct_coefficients(h11=0, h12=5, h21=4, h22=0, M=1)
    assert (c.h12, c.h21) == (5, 4)
    assert c.Lw is None


def test_direct_coefficients_linear_channel():
    c = direct_coefficients(0, 0, 0, 0, M=1)
    assert c.h11 == c.h12 == c.h21 == c.h22 == 0


def test_direct_coefficients_rejects_bad_domain():
    with pytest.raises(ValueError):
        direct_coefficients(0, 1, 1, 0, M=0)
    with pytest.raises(ValueError):
        direct_coefficients(-1, 1, 1, 0, M=1)


@st.composite
def physical_params(draw):
    M = draw(st.integers(min_value=1, max_value=6))
    d = draw(st.floats(min_value=0.05, max_value=2.0))
    Ts = draw(st.floats(min_value=0.1, max_value=4.0))
    return PhysicalParams(
        gamma1=draw(st.floats(min_value=0.0, max_value=5.0)),
        gamma2=draw(st.floats(min_value=0.0, max_value=5.0)),
        L=M * Ts / d,
        d=d,
        Ts=Ts,
        Es=draw(st.floats(min_value=0.1, max_value=10.0)),
    )


@given(physical_params(), st.floats(min_value=0.1, max_value=10.0))
def test_scaling_es_scales_every_coefficient(p, factor):
    base = derive_coefficients(p)
    scaled = derive_coefficients(
        PhysicalParams(p.gamma1, p.gamma2, p.L, p.d, p.Ts, p.Es * factor, p.N)
    )
    for name in ("h11", "h12", "h21", "h22"):
        assert np.isclose(getattr(scaled, name), factor * getattr(base, name), rtol=1e-12)


@given(physical_params())
def test_cross_to_self_ratio_identity(p):
    c = derive_coefficients(p)
    ratio = 2.0 * c.Lw / p.L
    # guard against denormal underflow of the products
    if c.h11 > 1e-300:
        assert np.isclose(c.h12 / c.h11, ratio, rtol=1e-12)
    if c.h22 > 1e-300:
        assert np.isclose(c.h21 / c.h22, ratio, rtol=1e-12)


def test_coefficients_reject_non_integer_memory_field():
    with pytest.raises(ValueError):
        Coefficients(h11=1, h12=1, h21=1, h22=1, M=1.5, Es=1, N=0, Ts=1)
