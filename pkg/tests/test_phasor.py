import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thevenin_esc.exceptions import ConfigurationError
from thevenin_esc.phasor import (
    NoiseChannel,
    Phasor,
    TheveninParams,
    measure,
    node_voltage,
    voltage_magnitude_squared,
    wrap_angle,
)

P1 = TheveninParams.from_degrees(245.0, 1.42, 35.3)
P2 = TheveninParams.from_degrees(245.0, 2.8, 54.7)
FORMS = ("eq2", "eq3", "eq4")


def rect_oracle(vth, zth, alpha, ij, theta):
    """|Vj| from explicit real/imaginary parts, no complex type involved."""
    re = vth + ij * zth * math.cos(theta + alpha)
    im = ij * zth * math.sin(theta + alpha)
    return math.hypot(re, im)


class TestPhasor:
    def test_angle_normalized_on_construction(self):
        assert Phasor(1.0, 3 * math.pi).angle == pytest.approx(math.pi)
        assert Phasor(1.0, -math.pi).angle == math.pi
        assert Phasor(1.0, -3 * math.pi / 2).angle == pytest.approx(math.pi / 2)

    @pytest.mark.parametrize("mag, ang", [(-1.0, 0.0), (math.inf, 0.0), (1.0, math.nan)])
    def test_invalid_rejected(self, mag, ang):
        with pytest.raises(ValueError):
            Phasor(mag, ang)

    def test_complex_round_trip(self):
        p = Phasor.from_degrees(10.0, -35.3)
        q = Phasor.from_complex(p.to_complex())
        assert q.magnitude == pytest.approx(10.0, rel=1e-15)
        assert q.angle_deg == pytest.approx(-35.3, rel=1e-13)

    def test_arithmetic(self):
        a = Phasor(2.0, math.pi / 2)
        b = Phasor(3.0, 0.0)
        assert (a * b).magnitude == pytest.approx(6.0)
        assert (a * b).angle == pytest.approx(math.pi / 2)
        assert (a + b).to_complex() == pytest.approx(3 + 2j)
        assert (a - b).to_complex() == pytest.approx(-3 + 2j)
        assert (a / b).magnitude == pytest.approx(2 / 3)
        assert (2 * b).magnitude == 6.0

    @given(
        st.lists(
            st.tuples(
                st.one_of(st.just(0.0), st.floats(1e-3, 1e3)),
                st.floats(-50, 50),
                st.sampled_from(["+", "*", "-", "/"]),
            ),
            min_size=1,
            max_size=8,
        )
    )
    def test_composition_keeps_angle_in_range(self, ops):
        acc = Phasor(1.0, 0.3)
        for mag, ang, op in ops:
            p = Phasor(mag, ang)
            assert -math.pi < p.angle <= math.pi
            if op == "+":
                acc = acc + p
            elif op == "-":
                acc = acc - p
            elif op == "*":
                acc = acc * p
            elif mag > 0:
                acc = acc / p
            assert -math.pi < acc.angle <= math.pi
            assert acc.magnitude >= 0

    @given(st.floats(-1e6, 1e6, allow_nan=False))
    def test_wrap_angle_range(self, angle):
        w = wrap_angle(angle)
        assert -math.pi < w <= math.pi
        assert math.isclose(math.cos(w), math.cos(angle), abs_tol=1e-9)


class TestTheveninParams:
    @pytest.mark.parametrize(
        "vth, zth, alpha",
        [(0.0, 1.0, 0.1), (245.0, 0.0, 0.1), (245.0, 1.0, math.pi / 2), (245.0, 1.0, -math.pi / 2)],
    )
    def test_invalid(self, vth, zth, alpha):
        with pytest.raises(ConfigurationError):
            TheveninParams(vth, zth, alpha)

    def test_degrees(self):
        assert P1.alpha == pytest.approx(0.616101, abs=1e-6)
        assert P1.impedance.magnitude == 1.42


class TestNodeVoltage:
    def test_zero_injection(self):
        v = node_voltage(P1, Phasor(0.0, 1.234))
        assert v.magnitude == 245.0
        assert v.angle == 0.0

    def test_extremum_injection(self):
        v = node_voltage(P1, Phasor.from_degrees(10.0, -35.3))
        assert v.magnitude == pytest.approx(259.2, rel=1e-14)
        assert v.angle == pytest.approx(0.0, abs=1e-14)

    def test_interval_two_injection_matches_oracles(self):
        v = node_voltage(P2, Phasor(5.0, 0.0))
        by_rect = rect_oracle(245.0, 2.8, math.radians(54.7), 5.0, 0.0)
        by_cosine_law = math.sqrt(voltage_magnitude_squared(P2, 5.0, 0.0, "eq2"))
        assert by_rect == pytest.approx(253.347791, abs=1e-6)
        assert v.magnitude == pytest.approx(by_rect, rel=1e-14)
        assert v.magnitude == pytest.approx(by_cosine_law, rel=1e-14)
        assert round(v.magnitude, 2) == 253.35


class TestMagnitudeForms:
    @pytest.mark.parametrize("form", FORMS)
    def test_zero_injection(self, form):
        assert voltage_magnitude_squared(P2, 0.0, 0.7, form) == 245.0**2

    @pytest.mark.parametrize("form", FORMS)
    def test_extremum(self, form):
        assert voltage_magnitude_squared(P1, 10.0, -P1.alpha, form) == pytest.approx(
            67184.64, rel=1e-14
        )

    @pytest.mark.parametrize("form", FORMS)
    def test_agrees_with_node_voltage(self, form):
        expected = node_voltage(P2, Phasor(5.0, 0.0)).magnitude ** 2
        assert voltage_magnitude_squared(P2, 5.0, 0.0, form) == pytest.approx(expected, rel=1e-12)

    def test_unknown_form(self):
        with pytest.raises(ValueError):
            voltage_magnitude_squared(P1, 1.0, 0.0, "eq5")

    def test_negative_current(self):
        with pytest.raises(ValueError):
            voltage_magnitude_squared(P1, -1.0, 0.0)

    @settings(max_examples=300)
    @given(
        vth=st.floats(100, 400),
        zth=st.floats(0.1, 5),
        alpha_deg=st.floats(-79.9, 79.9),
        drop_ratio=st.floats(0, 0.5),
        theta=st.floats(-math.pi, math.pi),
    )
    def test_forms_identity_property(self, vth, zth, alpha_deg, drop_ratio, theta):
        params = TheveninParams.from_degrees(vth, zth, alpha_deg)
        ij = drop_ratio * vth / zth
        values = [voltage_magnitude_squared(params, ij, theta, f) for f in FORMS]
        exact = abs(complex(vth) + ij * zth * cmath.exp(1j * (theta + params.alpha))) ** 2
        for v in values:
            assert v == pytest.approx(exact, rel=1e-10)
            assert v == pytest.approx(values[0], rel=1e-12)

    @settings(max_examples=300)
    @given(
        vth=st.floats(1, 1000),
        zth=st.floats(1e-3, 10),
        alpha_deg=st.floats(-89.9, 89.9),
        ij=st.floats(0, 100),
        theta=st.floats(-math.pi, math.pi),
    )
    def test_forms_agree_at_peak_scale(self, vth, zth, alpha_deg, ij, theta):
        # Near Ij*Zth = Vth in antiphase |Vj|^2 cancels to ~0, so compare
        # against the peak value rather than relative to the result.
        params = TheveninParams.from_degrees(vth, zth, alpha_deg)
        scale = (vth + ij * zth) ** 2
        values = [voltage_magnitude_squared(params, ij, theta, f) for f in FORMS]
        for v in values:
            assert abs(v - values[0]) <= 1e-12 * scale


class TestNoise:
    def test_noiseless_channel_is_exact(self):
        assert measure(259.2, NoiseChannel(0.0, 7)) == 259.2

    def test_sample_mean(self):
        ch = NoiseChannel(0.5, 12345)
        draws = np.array([measure(0.0, ch) for _ in range(100_000)])
        assert abs(draws.mean()) < 3 * 0.5 / math.sqrt(1e5)
        assert draws.std() == pytest.approx(0.5, rel=0.01)

    def test_same_seed_same_sequence(self):
        a, b = NoiseChannel(0.5, 42), NoiseChannel(0.5, 42)
        assert [a.draw() for _ in range(50)] == [b.draw() for _ in range(50)]

    def test_different_seed_differs(self):
        a, b = NoiseChannel(0.5, 1), NoiseChannel(0.5, 2)
        assert [a.draw() for _ in range(5)] != [b.draw() for _ in range(5)]

    def test_negative_sigma(self):
        with pytest.raises(ConfigurationError):
            NoiseChannel(-0.1, 0)

    def test_seed_range(self):
        NoiseChannel(0.1, 2**64 - 1)
        with pytest.raises(ConfigurationError):
            NoiseChannel(0.1, 2**64)
