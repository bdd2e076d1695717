import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paddetect.channel import ImpairmentParams, RandomStream, impair
from paddetect.constellation import Constellation, make_qam
from paddetect.detector import (
    DetectorKind,
    count_errors,
    detect,
    detect_many,
    metric_euc,
    metric_gap,
    metric_pad,
    polar_residuals,
    wrap_phase,
)


def wrapped(x):
    """Independent principal-angle reduction via atan2."""
    return math.atan2(math.sin(x), math.cos(x))


class TestWrap:
    def test_interval(self):
        x = np.linspace(-20, 20, 10001)
        w = wrap_phase(x)
        assert np.all(w > -np.pi) and np.all(w <= np.pi)
        np.testing.assert_allclose(np.exp(1j * w), np.exp(1j * x), atol=1e-12)

    def test_pi_boundary(self):
        assert wrap_phase(np.pi) == np.pi
        assert wrap_phase(-np.pi) == np.pi


class TestEuc:
    def test_trivial(self):
        assert metric_euc(0.3 + 0.2j, 0.3 + 0.2j) == 0
        assert metric_euc(1, -1) == 4

    def test_componentwise(self):
        rng = np.random.default_rng(1)
        r = complex(*rng.standard_normal(2))
        s = complex(*rng.standard_normal(2))
        assert metric_euc(r, s) == pytest.approx((r.real - s.real) ** 2 + (r.imag - s.imag) ** 2, rel=1e-15)


class TestGap:
    def test_zero_residual(self):
        s = 0.6 * np.exp(0.4j)
        assert metric_gap(s, s, 1e-2, 1e-3) == pytest.approx(math.log(1e-3 + 1e-2 / (2 * 0.36)), rel=1e-14)

    def test_no_phase_noise(self):
        s, r = 0.9 * np.exp(0.2j), 0.85 * np.exp(0.25j)
        sn2 = 0.01
        amp = (abs(r) - abs(s)) ** 2 / (sn2 / 2)
        ph = abs(s) ** 2 * 0.05**2 * 2 / sn2
        assert metric_gap(r, s, sn2, 0.0) == pytest.approx(amp + ph + math.log(sn2 / (2 * abs(s) ** 2)), rel=1e-10)

    def test_formula_oracle(self):
        s = 1.0 + 0j
        r = s * complex(math.cos(0.1), math.sin(0.1))
        sn2, sp2 = 1e-3, 1e-2
        vt = sp2 + sn2 / 2
        expected = (abs(r) - 1) ** 2 / (sn2 / 2) + 0.1**2 / vt + math.log(vt)
        assert metric_gap(r, s, sn2, sp2) == pytest.approx(expected, rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            metric_gap(1, 0, 0.1, 0.1)
        with pytest.raises(ValueError):
            metric_gap(1, 1, 0.0, 0.0)


class TestPad:
    def test_zero_residual(self):
        p = ImpairmentParams(1e-3, 1e-3, 1e-4)
        s = 0.5j
        va = 5e-4 + 1e-3 * 0.25
        vt = 1e-4 + 1e-3 / 0.5
        assert metric_pad(s, s, p) == pytest.approx(math.log(va * vt), rel=1e-13)

    def test_formula_oracle(self):
        p = ImpairmentParams(1e-3, 1e-3, 1e-4)
        r = 1.05 * complex(math.cos(0.02), math.sin(0.02))
        va = 1e-3 / 2 + 1e-3
        vt = 1e-4 + 1e-3 / 2
        expected = 0.05**2 / va + 0.02**2 / vt + math.log(va * vt)
        assert metric_pad(r, 1.0, p) == pytest.approx(expected, rel=1e-12)

    def test_reduces_to_gap_plus_constant(self):
        p = ImpairmentParams(1e-2, 0.0, 1e-3)
        rng = np.random.default_rng(2)
        s = make_qam(16).points
        r = complex(*rng.standard_normal(2))
        diff = metric_pad(r, s, p) - metric_gap(r, s, p.sigma_n2, p.sigma_phi2)
        np.testing.assert_allclose(diff, math.log(p.sigma_n2 / 2), rtol=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            metric_pad(1, 0, ImpairmentParams(0.1))
        with pytest.raises(ValueError):
            metric_pad(1, 1, ImpairmentParams())

    def test_phase_residual_uses_principal_angle(self):
        s = np.exp(1j * 3.1)
        r = 1.01 * np.exp(-1j * 3.1)
        da, dt = polar_residuals(r, s)
        assert dt == pytest.approx(wrapped(-6.2), abs=1e-12)
        assert -np.pi < dt <= np.pi

    @settings(max_examples=50)
    @given(st.floats(-np.pi, np.pi), st.floats(0.1, 2.0), st.integers(0, 15))
    def test_two_pi_invariance(self, ang, amp, m):
        p = ImpairmentParams(1e-2, 1e-3, 1e-3)
        s = make_qam(16).points[m]
        r1 = amp * np.exp(1j * ang)
        r2 = amp * np.exp(1j * (ang + 2 * np.pi))
        assert metric_pad(r1, s, p) == pytest.approx(metric_pad(r2, s, p), rel=1e-9, abs=1e-9)
        assert np.isfinite(metric_pad(r1, s, p))


class TestDetect:
    def test_exact_point(self):
        c = make_qam(16)
        p = ImpairmentParams(1e-2)
        for m in range(16):
            assert detect(c.points[m], c, "euc", p) == m

    def test_nearer_point(self):
        c = Constellation(np.array([1, -1]))
        assert detect(0.2, c, DetectorKind.EUC, ImpairmentParams(0.1)) == 0

    def test_ties_lowest_index(self):
        c = Constellation(np.array([1, -1, 1j]))
        assert detect(0.0 - 0.5j, c, "euc", ImpairmentParams(0.1)) == 0

    def test_pad_equals_gap_without_gain_error(self):
        c = make_qam(16)
        p = ImpairmentParams(0.05, 0.0, 1e-2)
        rng = np.random.default_rng(3)
        tx = rng.integers(16, size=10**4)
        r = impair(c.points[tx], p, RandomStream(8))
        np.testing.assert_array_equal(detect_many(r, c, "pad", p), detect_many(r, c, "gap", p))

    def test_kernel_matches_numpy_metrics(self):
        c = make_qam(64)
        p = ImpairmentParams(3e-3, 1e-3, 1e-3)
        r = impair(c.points[np.arange(2000) % 64], p, RandomStream(10))
        for kind, metric in (("euc", lambda rr: metric_euc(rr, c.points)),
                             ("gap", lambda rr: metric_gap(rr, c.points, p.sigma_n2, p.sigma_phi2)),
                             ("pad", lambda rr: metric_pad(rr, c.points, p))):
            ref = np.array([np.argmin(metric(rr)) for rr in r])
            np.testing.assert_array_equal(detect_many(r, c, kind, p), ref)

    def test_count_errors(self):
        c = make_qam(16)
        p = ImpairmentParams(0.1, 1e-3, 1e-3)
        tx = np.arange(5000) % 16
        r = impair(c.points[tx], p, RandomStream(11))
        for kind in DetectorKind:
            assert count_errors(r, tx, c, kind, p) == int(np.sum(detect_many(r, c, kind, p) != tx))

    @settings(max_examples=30)
    @given(st.floats(-np.pi, np.pi), st.integers(0, 2**32 - 1))
    def test_euc_rotation_equivariance(self, theta, seed):
        c = make_qam(16)
        rng = np.random.default_rng(seed)
        r = complex(*rng.standard_normal(2))
        rot = np.exp(1j * theta)
        p = ImpairmentParams(0.1)
        assert detect(r * rot, c.rotated(theta), "euc", p) == detect(r, c, "euc", p)

    def test_scalar_and_array_shapes(self):
        c = make_qam(4)
        p = ImpairmentParams(0.1)
        assert isinstance(detect(0.5 + 0.5j, c, "pad", p), int)
        assert detect(np.array([[0.5 + 0.5j, -0.5 - 0.5j]]), c, "pad", p).shape == (1, 2)

    def test_kind_parsing(self):
        assert DetectorKind.parse("PAD-D") is DetectorKind.PAD
        assert DetectorKind.parse("gapd") is DetectorKind.GAP
        assert DetectorKind.parse("euc") is DetectorKind.EUC
        with pytest.raises(ValueError):
            DetectorKind.parse("ml")
