import math

import numpy as np
import pytest

from kerrfocus.ct_oracle import (
    GridTooShort,
    KeyMismatch,
    Waveform,
    build_waveform,
    compare,
    filter_and_sample,
    model_comparison,
    phi1_grid,
    phi2_grid,
    propagate,
    psi12m,
    with_grid_noise,
)
from kerrfocus.dt_model import SymbolBlock, simulate
from kerrfocus.focusing import FrequencySet
from kerrfocus.params import PhysicalParams, derive_coefficients

PI = math.pi


def gaussian_block(rng, n, user):
    z = rng.standard_normal((n, 2))
    return SymbolBlock((z[:, 0] + 1j * z[:, 1]) / math.sqrt(2), user=user)


class TestBuildWaveform:
    def test_empty_block_is_all_zero(self):
        w = build_waveform(SymbolBlock([]), Ts=1.0, Es=1.0, OS=8, pad_after=3)
        assert np.all(w.samples == 0)

    def test_single_symbol_square_pulse(self):
        w = build_waveform(SymbolBlock([1.0]), Ts=1.0, Es=1.0, OS=16, pad_after=2)
        assert np.allclose(w.samples[:16], 1.0)
        assert np.all(w.samples[16:] == 0)
        assert w.Ts == 1.0

    def test_per_symbol_energy_exact(self):
        rng = np.random.default_rng(0)
        x = gaussian_block(rng, 5, 1)
        Es, Ts = 2.3, 0.7
        w = build_waveform(x, Ts=Ts, Es=Es, OS=32)
        for m in range(5):
            cell = w.samples[m * 32 : (m + 1) * 32]
            energy = np.sum(np.abs(cell) ** 2) * w.dt
            assert energy == pytest.approx(abs(x[m]) ** 2 * Es, rel=1e-12)

    def test_rejects_low_oversampling(self):
        with pytest.raises(ValueError):
            build_waveform(SymbolBlock([1.0]), 1.0, 1.0, OS=4)


class TestPsi:
    def test_left_endpoint_zero(self):
        assert psi12m(2.0, m=2, M=3, Es=1.0, Ts=1.0) == 0.0

    def test_plateau_onset(self):
        Es, Ts = 1.7, 0.5
        assert psi12m((2 + 1) * Ts, m=2, M=3, Es=Es, Ts=Ts) == pytest.approx(Es / Ts)

    def test_outside_support(self):
        assert psi12m(-0.5, 0, 1, 1.0, 1.0) == 0.0
        assert psi12m(2.0, 0, 1, 1.0, 1.0) == 0.0  # support is [0, (M+1)Ts)

    def test_vectorized_matches_scalar(self):
        t = np.linspace(-1, 6, 200)
        vec = psi12m(t, m=1, M=2, Es=1.3, Ts=0.9)
        scalar = np.array([psi12m(ti, 1, 2, 1.3, 0.9) for ti in t])
        assert np.allclose(vec, scalar)


class TestPhaseGrids:
    def test_silent_interferer_gives_own_power_only(self):
        x1 = SymbolBlock([1.0, 2.0])
        w1 = build_waveform(x1, 1.0, 1.0, OS=16, pad_before=1, pad_after=4)
        w2 = build_waveform(SymbolBlock([], user=2), 1.0, 1.0, OS=16, pad_before=1, pad_after=6)
        phi = phi1_grid(w1, w2, gamma1=0.7, L=1.0, d=1.0)
        assert np.allclose(phi, 0.7 * np.abs(w1.samples) ** 2)

    def test_constant_interferer_plateau_value(self):
        # |A2|^2 = Es/Ts over the whole window -> cross phase 2*gamma*Lw*(Es/Ts)*M
        M, OS, Ts, Es = 3, 16, 1.0, 1.0
        gamma1, d = 0.45, 0.5
        L = M * Ts / d
        Lw = Ts / d
        x2 = SymbolBlock(np.ones(10), user=2)
        w2 = build_waveform(x2, Ts, Es, OS, pad_before=0, pad_after=2)
        w1 = build_waveform(SymbolBlock([]), Ts, Es, OS, pad_before=0, pad_after=12)
        phi = phi1_grid(w1, w2, gamma1, L, d)
        k_mid = 6 * OS  # t = 6*Ts, window [3Ts, 6Ts] fully inside the block
        assert phi[k_mid] == pytest.approx(2 * gamma1 * Lw * (Es / Ts) * M, rel=1e-12)

    def test_single_pulse_matches_overlap_function(self):
        M, OS, Ts, Es = 2, 32, 1.0, 1.3
        d = 0.25
        L = M * Ts / d
        Lw = Ts / d
        gamma1 = 0.8
        amp = 0.9 - 0.4j
        x2 = SymbolBlock([0, amp, 0], user=2)
        w2 = build_waveform(x2, Ts, Es, OS, pad_before=M, pad_after=2 * M + 2)
        w1 = build_waveform(SymbolBlock([]), Ts, Es, OS, pad_before=M, pad_after=2 * M + 5)
        phi = phi1_grid(w1, w2, gamma1, L, d)
        t = w2.t0 + np.arange(w2.samples.size) * w2.dt
        expected = 2 * gamma1 * Lw * abs(amp) ** 2 * psi12m(t, m=1, M=M, Es=Es, Ts=Ts)
        assert np.max(np.abs(phi - expected)) < 1e-9

    def test_phi2_variants_differ_by_shifted_own_power(self):
        rng = np.random.default_rng(2)
        M, OS = 2, 16
        d, Ts, Es = 0.5, 1.0, 1.0
        L = M * Ts / d
        x1 = gaussian_block(rng, 4, 1)
        x2 = gaussian_block(rng, 4, 2)
        w1 = build_waveform(x1, Ts, Es, OS, pad_before=M, pad_after=2 * M + 2)
        w2 = build_waveform(x2, Ts, Es, OS, pad_before=M, pad_after=2 * M + 2)
        gamma2 = 0.6
        adv = phi2_grid(w1, w2, gamma2, L, d, "advanced")
        sym = phi2_grid(w1, w2, gamma2, L, d, "symmetric")
        W = M * OS
        p2 = np.abs(w2.samples) ** 2
        shifted = np.zeros_like(p2)
        shifted[W:] = p2[:-W]
        assert np.allclose(adv - sym, gamma2 * L * (p2 - shifted))

    def test_grid_too_short_leading(self):
        # nonzero field 1 right at the grid start: trailing window cannot fit
        w1 = build_waveform(SymbolBlock([1.0, 1.0]), 1.0, 1.0, OS=8, pad_after=4)
        w2 = build_waveform(SymbolBlock([1.0, 1.0], user=2), 1.0, 1.0, OS=8, pad_after=4)
        with pytest.raises(GridTooShort):
            phi1_grid(w1, w2, 0.5, L=1.0, d=1.0)

    def test_grid_too_short_trailing(self):
        w1 = build_waveform(SymbolBlock([1.0, 1.0]), 1.0, 1.0, OS=8, pad_before=2, pad_after=0)
        w2 = build_waveform(SymbolBlock([1.0, 1.0], user=2), 1.0, 1.0, OS=8, pad_before=2, pad_after=0)
        with pytest.raises(GridTooShort):
            phi2_grid(w1, w2, 0.5, L=2.0, d=1.0)


class TestPropagate:
    def make(self, rng, gamma1=0.0, gamma2=0.0, M=1, n=4, OS=16):
        d, Ts, Es = 0.5, 1.0, 1.0
        p = PhysicalParams(gamma1, gamma2, L=M * Ts / d, d=d, Ts=Ts, Es=Es)
        x1 = gaussian_block(rng, n, 1)
        x2 = gaussian_block(rng, n, 2)
        w1 = build_waveform(x1, Ts, Es, OS, pad_before=M, pad_after=2 * M + 2)
        w2 = build_waveform(x2, Ts, Es, OS, pad_before=M, pad_after=2 * M + 2)
        return p, w1, w2

    def test_linear_channel_is_pure_delay(self):
        rng = np.random.default_rng(3)
        p, w1, w2 = self.make(rng)
        o1, o2 = propagate(w1, w2, p)
        W = p.memory * w1.OS
        assert np.allclose(o1.samples, w1.samples)
        assert np.allclose(o2.samples[W:], w2.samples[:-W])
        assert np.all(o2.samples[:W] == 0)

    def test_magnitudes_preserved(self):
        rng = np.random.default_rng(4)
        p, w1, w2 = self.make(rng, gamma1=0.8, gamma2=0.5, M=2)
        o1, o2 = propagate(w1, w2, p)
        W = p.memory * w1.OS
        assert np.allclose(np.abs(o1.samples), np.abs(w1.samples))
        assert np.allclose(np.abs(o2.samples[W:]), np.abs(w2.samples[:-W]))

    def test_energy_conserved(self):
        rng = np.random.default_rng(5)
        p, w1, w2 = self.make(rng, gamma1=1.2, gamma2=0.3, M=1)
        o1, o2 = propagate(w1, w2, p)
        assert o1.energy() == pytest.approx(w1.energy(), rel=1e-12)
        assert o2.energy() == pytest.approx(w2.energy(), rel=1e-12)


class TestFilterAndSample:
    def test_matched_filter_recovers_symbol_energy(self):
        Es, Ts, OS = 1.9, 0.8, 256
        x = SymbolBlock([0.7 + 0.2j])
        w = build_waveform(x, Ts, Es, OS, pad_after=2)
        out = filter_and_sample(w, FrequencySet((0,)), receiver=1, n=1, M=1, Es=Es)
        assert out.values[(0, 0)] == pytest.approx((0.7 + 0.2j) * Es, rel=1e-12)

    def test_off_frequency_orthogonality(self):
        Es, Ts, OS = 1.0, 1.0, 256
        w = build_waveform(SymbolBlock([1.0]), Ts, Es, OS, pad_after=2)
        out = filter_and_sample(w, FrequencySet((-3, 0, 3)), receiver=1, n=1, M=1, Es=Es)
        assert abs(out.values[(0, 3)]) < 1e-12
        assert abs(out.values[(0, -3)]) < 1e-12

    def test_grid_too_short(self):
        w = build_waveform(SymbolBlock([1.0]), 1.0, 1.0, OS=8, pad_after=0)
        with pytest.raises(GridTooShort):
            filter_and_sample(w, FrequencySet((0,)), receiver=2, n=1, M=3, Es=1.0)


class TestCompare:
    def test_identical_outputs_give_zero(self):
        rng = np.random.default_rng(6)
        x1, x2 = gaussian_block(rng, 4, 1), gaussian_block(rng, 4, 2)
        coeffs = derive_coefficients(PhysicalParams(0.5, 0.5, L=2, d=0.5, Ts=1, Es=1))
        F = FrequencySet((-1, 0, 1))
        o1, _ = simulate(x1, x2, F, F, coeffs, noise_on=False)
        assert compare(o1, o1, x1) == 0.0

    def test_key_mismatch(self):
        rng = np.random.default_rng(6)
        x1, x2 = gaussian_block(rng, 4, 1), gaussian_block(rng, 4, 2)
        coeffs = derive_coefficients(PhysicalParams(0.5, 0.5, L=2, d=0.5, Ts=1, Es=1))
        a, _ = simulate(x1, x2, FrequencySet((0,)), FrequencySet((0,)), coeffs, noise_on=False)
        b, _ = simulate(x1, x2, FrequencySet((-1, 0, 1)), FrequencySet((0,)), coeffs, noise_on=False)
        with pytest.raises(KeyMismatch):
            compare(a, b, x1)

    def test_zero_blocks_compare_to_zero(self):
        coeffs = derive_coefficients(PhysicalParams(0.5, 0.5, L=2, d=0.5, Ts=1, Es=1))
        zeros = SymbolBlock(np.zeros(3))
        F = FrequencySet((0,))
        o, _ = simulate(zeros, SymbolBlock(np.zeros(3), user=2), F, F, coeffs, noise_on=False)
        assert compare(o, o, zeros) == 0.0


class TestModelComparison:
    def test_convergence_first_order(self):
        rng = np.random.default_rng(8)
        p = PhysicalParams(gamma1=0.35, gamma2=0.6, L=4.0, d=0.5, Ts=1.0, Es=1.0)
        x1, x2 = gaussian_block(rng, 10, 1), gaussian_block(rng, 10, 2)
        F = FrequencySet(tuple(range(-4, 5)))
        _, e256 = model_comparison(p, x1, x2, F, F, OS=256)
        _, e512 = model_comparison(p, x1, x2, F, F, OS=512)
        assert e256 < 5e-3
        assert e256 / e512 > 1.8

    def test_zero_inputs_zero_error(self):
        p = PhysicalParams(gamma1=0.35, gamma2=0.6, L=2.0, d=0.5, Ts=1.0, Es=1.0)
        zeros1 = SymbolBlock(np.zeros(4))
        zeros2 = SymbolBlock(np.zeros(4), user=2)
        F = FrequencySet((-1, 0, 1))
        _, err = model_comparison(p, zeros1, zeros2, F, F, OS=64)
        assert err == 0.0


def test_grid_noise_variance_through_matched_filter():
    # white grid noise of variance N/dt filters to variance ~ N*Es
    Es, Ts, OS, N = 1.0, 1.0, 64, 0.2
    w = build_waveform(SymbolBlock(np.zeros(1)), Ts, Es, OS, pad_after=1)
    F = FrequencySet((0,))
    samples = []
    for seed in range(4000):
        noisy = with_grid_noise(w, N, seed=seed)
        out = filter_and_sample(noisy, F, receiver=1, n=1, M=1, Es=Es)
        samples.append(out.values[(0, 0)])
    var = np.mean(np.abs(samples) ** 2)
    assert var == pytest.approx(N * Es, rel=0.1)
