"""Phasor arithmetic and the Thevenin node-voltage model.

A grid-following inverter at a node is a current source ``Ij∠θ`` feeding a
Thevenin equivalent ``Vth∠0`` behind ``Zth∠α``. The node voltage is

    Vj∠γ = Vth∠0 + (Ij∠θ)(Zth∠α)

and its squared magnitude peaks when the injected angle is ``θ = -α``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_interval, check_positive
from .exceptions import ConfigurationError

TWO_PI = 2.0 * math.pi


def wrap_angle(angle):
    """Wrap an angle in radians onto (-pi, pi]."""
    wrapped = math.remainder(float(angle), TWO_PI)
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


@dataclass(frozen=True)
class Phasor:
    """Sinusoidal steady-state quantity as magnitude and angle (radians)."""

    magnitude: float
    angle: float = 0.0

    def __post_init__(self):
        mag = float(self.magnitude)
        if not (mag >= 0.0 and math.isfinite(mag)):
            raise ValueError(f"phasor magnitude must be finite and >= 0, got {self.magnitude!r}")
        if not math.isfinite(self.angle):
            raise ValueError(f"phasor angle must be finite, got {self.angle!r}")
        object.__setattr__(self, "magnitude", mag)
        object.__setattr__(self, "angle", wrap_angle(self.angle))

    @classmethod
    def from_complex(cls, value):
        return cls(abs(value), cmath.phase(value))

    @classmethod
    def from_degrees(cls, magnitude, angle_deg):
        return cls(magnitude, math.radians(angle_deg))

    def to_complex(self):
        return cmath.rect(self.magnitude, self.angle)

    @property
    def angle_deg(self):
        return math.degrees(self.angle)

    def __add__(self, other):
        if not isinstance(other, Phasor):
            return NotImplemented
        return Phasor.from_complex(self.to_complex() + other.to_complex())

    def __sub__(self, other):
        if not isinstance(other, Phasor):
            return NotImplemented
        return Phasor.from_complex(self.to_complex() - other.to_complex())

    def __mul__(self, other):
        if isinstance(other, Phasor):
            return Phasor.from_complex(self.to_complex() * other.to_complex())
        if isinstance(other, (int, float)):
            return Phasor.from_complex(self.to_complex() * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Phasor):
            return NotImplemented
        return Phasor.from_complex(self.to_complex() / other.to_complex())


@dataclass(frozen=True)
class TheveninParams:
    """Thevenin equivalent seen from the inverter node.

    Attributes:
        vth: Source voltage magnitude in volts, reference angle 0.
        zth: Impedance magnitude in ohms.
        alpha: Impedance angle in radians, strictly inside (-pi/2, pi/2).
    """

    vth: float
    zth: float
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "vth", check_positive(self.vth, "vth"))
        object.__setattr__(self, "zth", check_positive(self.zth, "zth"))
        object.__setattr__(
            self, "alpha", check_interval(self.alpha, "alpha", -math.pi / 2, math.pi / 2)
        )

    @classmethod
    def from_degrees(cls, vth, zth, alpha_deg):
        return cls(vth, zth, math.radians(alpha_deg))

    @property
    def impedance(self):
        return Phasor(self.zth, self.alpha)

    @property
    def source(self):
        return Phasor(self.vth, 0.0)


def node_voltage(params, injection):
    """Node voltage phasor for a current injection into the Thevenin circuit."""
    v = complex(params.vth, 0.0) + injection.to_complex() * cmath.rect(params.zth, params.alpha)
    return Phasor.from_complex(v)


def voltage_magnitude_squared(params, ij, theta, form="eq4"):
    """Squared node-voltage magnitude from one of three equivalent closed forms.

    Args:
        params: Thevenin equivalent.
        ij: Injected current magnitude in amperes.
        theta: Injected current angle in radians.
        form: ``"eq2"`` (cosine law), ``"eq3"`` (offset from the peak via
            ``cos - 1``) or ``"eq4"`` (offset via ``sin^2`` of the half angle).

    Returns:
        ``|Vj|^2`` in volts squared.
    """
    if ij < 0:
        raise ValueError(f"current magnitude must be >= 0, got {ij!r}")
    v0 = params.vth
    drop = ij * params.zth
    phi = theta + params.alpha
    if form == "eq2":
        return v0 * v0 + drop * drop + 2.0 * v0 * drop * math.cos(phi)
    if form == "eq3":
        return (v0 + drop) ** 2 + 2.0 * v0 * drop * (math.cos(phi) - 1.0)
    if form == "eq4":
        return (v0 + drop) ** 2 - 4.0 * v0 * drop * math.sin(0.5 * phi) ** 2
    raise ValueError(f"unknown form {form!r}; expected 'eq2', 'eq3' or 'eq4'")


class NoiseChannel:
    """Additive Gaussian noise on voltage magnitude measurements.

    Draws come from numpy's PCG64 bit generator seeded with ``seed`` and
    transformed by ``Generator.standard_normal`` (ziggurat), so a given seed
    and call sequence reproduce the same samples. One draw is consumed per
    measurement even when ``sigma`` is zero, keeping streams aligned.
    """

    def __init__(self, sigma=0.0, seed=0):
        self.sigma = check_positive(sigma, "noise.sigma", allow_zero=True)
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ConfigurationError(f"must be an unsigned 64-bit integer, got {seed}", "noise.seed")
        self.seed = seed
        self._rng = np.random.Generator(np.random.PCG64(seed))

    def draw(self):
        return self.sigma * float(self._rng.standard_normal())

    def __repr__(self):
        return f"NoiseChannel(sigma={self.sigma!r}, seed={self.seed!r})"


def measure(true_v, channel):
    """Return ``true_v`` corrupted by one draw from ``channel``."""
    if true_v < 0:
        raise ValueError(f"voltage magnitude must be >= 0, got {true_v!r}")
    return true_v + channel.draw()
