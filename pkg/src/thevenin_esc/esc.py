"""Single-input extremum seeking on the injected-current angle.

The loop superimposes a sinusoidal dither on the angle estimate, high-passes
the measured cost, demodulates it with the same sinusoid and integrates the
result, which drives the estimate up the local gradient towards the maximizer
``θ* = -α`` of the node-voltage map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from sklearn.base import BaseEstimator

from ._validation import check_positive
from .exceptions import ConfigurationError
from .phasor import TWO_PI

DEFAULT_DITHER_AMPLITUDE = 0.15
DEFAULT_DITHER_FREQ = TWO_PI * 5.0
DEFAULT_HPF_CUTOFF = TWO_PI * 1.0
DEFAULT_GAIN = 8e-5
DEFAULT_SAMPLE_DT = 0.01


@dataclass(frozen=True)
class EscConfig:
    """Tunables of the extremum seeking loop.

    Attributes:
        dither_amplitude: Dither amplitude ``a`` in radians.
        dither_freq: Dither frequency in rad/s.
        hpf_cutoff: High-pass cutoff in rad/s, below ``dither_freq``.
        gain: Integrator gain, positive for maximization (1/(V^2 s)).
        sample_dt: Step size in seconds.
        theta0: Initial angle estimate in radians.
    """

    dither_amplitude: float = DEFAULT_DITHER_AMPLITUDE
    dither_freq: float = DEFAULT_DITHER_FREQ
    hpf_cutoff: float = DEFAULT_HPF_CUTOFF
    gain: float = DEFAULT_GAIN
    sample_dt: float = DEFAULT_SAMPLE_DT
    theta0: float = 0.0

    def __post_init__(self):
        check_positive(self.dither_amplitude, "esc.dither_amplitude")
        check_positive(self.dither_freq, "esc.dither_freq")
        check_positive(self.hpf_cutoff, "esc.hpf_cutoff")
        check_positive(self.gain, "esc.gain", allow_zero=True)
        check_positive(self.sample_dt, "esc.sample_dt")
        if not math.isfinite(self.theta0):
            raise ConfigurationError("must be finite", "esc.theta0")
        if self.hpf_cutoff >= self.dither_freq:
            raise ConfigurationError(
                f"high-pass cutoff {self.hpf_cutoff} must be below the dither frequency "
                f"{self.dither_freq}",
                "esc.hpf_cutoff",
            )
        if self.dither_freq * self.sample_dt >= math.pi:
            raise ConfigurationError(
                "dither frequency is not resolvable at this sample rate "
                f"(dither_freq * sample_dt = {self.dither_freq * self.sample_dt:.4g} >= pi)",
                "esc.dither_freq",
            )

    @property
    def hpf_coefficients(self):
        """``(pole, zero_gain)`` of the bilinear-transformed ``s / (s + wh)``."""
        c = 2.0 / self.sample_dt
        wh = self.hpf_cutoff
        return (c - wh) / (c + wh), c / (c + wh)


@dataclass(frozen=True)
class EscState:
    """Loop state between steps.

    ``hpf_x`` is the previous filter input; ``None`` means the next cost is
    the first one and seeds the filter without a start-up transient.
    """

    theta_hat: float = 0.0
    hpf_y: float = 0.0
    hpf_x: float | None = None
    dither_phase: float = 0.0
    xi: float = 0.0


def esc_init(cfg):
    return EscState(theta_hat=float(cfg.theta0))


def esc_command(state, cfg):
    """Dithered angle command for the current step."""
    return state.theta_hat + cfg.dither_amplitude * math.sin(state.dither_phase)


def esc_step(state, cfg, cost):
    """Advance the loop by one sample given the cost measured for the last command."""
    pole, zero_gain = cfg.hpf_coefficients
    prev = cost if state.hpf_x is None else state.hpf_x
    hpf_y = pole * state.hpf_y + zero_gain * (cost - prev)
    xi = hpf_y * math.sin(state.dither_phase)
    theta_hat = state.theta_hat + cfg.gain * xi * cfg.sample_dt
    phase = math.fmod(state.dither_phase + cfg.dither_freq * cfg.sample_dt, TWO_PI)
    return replace(
        state, theta_hat=theta_hat, hpf_y=hpf_y, hpf_x=float(cost), dither_phase=phase, xi=xi
    )


def alpha_estimate(state):
    """Impedance angle implied by the current maximizer estimate."""
    return -state.theta_hat


class ExtremumSeekingController(BaseEstimator):
    """Stateful wrapper around :func:`esc_step` with sklearn-style parameters.

    Call :meth:`command` to get the angle to apply, measure the plant, then
    feed the squared voltage back through :meth:`partial_fit`.

    Example:
        >>> esc = ExtremumSeekingController(gain=0.0)
        >>> esc.partial_fit(esc.command() ** 2).theta_hat_
        0.0
    """

    def __init__(
        self,
        dither_amplitude=DEFAULT_DITHER_AMPLITUDE,
        dither_freq=DEFAULT_DITHER_FREQ,
        hpf_cutoff=DEFAULT_HPF_CUTOFF,
        gain=DEFAULT_GAIN,
        sample_dt=DEFAULT_SAMPLE_DT,
        theta0=0.0,
    ):
        self.dither_amplitude = dither_amplitude
        self.dither_freq = dither_freq
        self.hpf_cutoff = hpf_cutoff
        self.gain = gain
        self.sample_dt = sample_dt
        self.theta0 = theta0

    @property
    def config(self):
        return EscConfig(**self.get_params())

    def _ensure_state(self):
        if not hasattr(self, "state_"):
            self.config_ = self.config
            self.state_ = esc_init(self.config_)

    def reset(self):
        for attr in ("state_", "config_"):
            if hasattr(self, attr):
                delattr(self, attr)
        return self

    def command(self):
        self._ensure_state()
        return esc_command(self.state_, self.config_)

    def partial_fit(self, cost):
        self._ensure_state()
        self.state_ = esc_step(self.state_, self.config_, float(cost))
        return self

    def seek(self, objective, n_steps):
        """Run the closed loop against a static map ``objective(theta)``.

        Returns the list of ``theta_hat`` values after each step.
        """
        trajectory = []
        for _ in range(int(n_steps)):
            self.partial_fit(objective(self.command()))
            trajectory.append(self.state_.theta_hat)
        return trajectory

    @property
    def theta_hat_(self):
        self._ensure_state()
        return self.state_.theta_hat

    @property
    def alpha_(self):
        self._ensure_state()
        return alpha_estimate(self.state_)
