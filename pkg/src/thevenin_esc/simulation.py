"""Fixed-step scenario runner and convergence metrics.

Each step runs, in this order: pick the active Thevenin segment, form the
dithered current magnitude, take the angle command from the ESC loop,
evaluate the circuit, add measurement noise, then feed the ESC loop with
the squared measurement and both least-squares estimators with
``([1, Ij], v_meas)``. The circuit is memoryless; every dynamic lives in the
controllers and estimators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import check_positive
from .esc import EscConfig, alpha_estimate, esc_command, esc_init, esc_step
from .exceptions import ConfigurationError
from .kalman import KalmanConfig, kf_estimate, kf_init, kf_predict, kf_update
from .phasor import TWO_PI, NoiseChannel, Phasor, TheveninParams, measure, node_voltage
from .rwls import Regressor, RwlsConfig, rwls_init, rwls_update

ESTIMATORS = ("esc", "rwls", "kalman")

DEFAULT_BASE_CURRENT = 30.0
DEFAULT_MAG_DITHER_AMPLITUDE = 3.0
DEFAULT_MAG_DITHER_FREQ = TWO_PI * 0.3
DEFAULT_HOLD_TIME = 5.0


@dataclass(frozen=True)
class Segment:
    """Time interval ``[t_start, t_end)`` with fixed Thevenin parameters."""

    t_start: float
    t_end: float
    params: TheveninParams


@dataclass(frozen=True)
class Scenario:
    """Everything needed to reproduce one simulation run."""

    segments: tuple
    base_current: float = DEFAULT_BASE_CURRENT
    mag_dither_amplitude: float = DEFAULT_MAG_DITHER_AMPLITUDE
    mag_dither_freq: float = DEFAULT_MAG_DITHER_FREQ
    sample_dt: float = 0.01
    duration: float | None = None
    noise_sigma: float = 0.5
    noise_seed: int = 0
    esc: EscConfig = field(default_factory=EscConfig)
    rwls: RwlsConfig = field(default_factory=RwlsConfig)
    kalman: KalmanConfig = field(default_factory=KalmanConfig)
    estimators: frozenset = frozenset(ESTIMATORS)

    def __post_init__(self):
        segments = tuple(self.segments)
        object.__setattr__(self, "segments", segments)
        if not segments:
            raise ConfigurationError("at least one segment is required", "scenario.segments")
        dt = check_positive(self.sample_dt, "scenario.sample_dt")
        duration = segments[-1].t_end if self.duration is None else self.duration
        object.__setattr__(self, "duration", check_positive(duration, "scenario.duration"))
        if self.esc.sample_dt != dt:
            object.__setattr__(self, "esc", replace(self.esc, sample_dt=dt))
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown:
            raise ConfigurationError(
                f"unknown estimators {sorted(unknown)}; choose from {list(ESTIMATORS)}",
                "scenario.estimators",
            )
        object.__setattr__(self, "estimators", frozenset(self.estimators))
        check_positive(self.noise_sigma, "noise.sigma", allow_zero=True)
        self._check_segments()
        self._check_excitation()

    def _check_segments(self):
        path = "scenario.segments"
        if self.segments[0].t_start != 0.0:
            raise ConfigurationError("first segment must start at t=0", path)
        for i, seg in enumerate(self.segments):
            if not seg.t_end > seg.t_start:
                raise ConfigurationError(f"segment {i} has t_end <= t_start", f"{path}[{i}]")
            if i and seg.t_start != self.segments[i - 1].t_end:
                raise ConfigurationError(
                    f"segment {i} starts at {seg.t_start} but segment {i - 1} ends at "
                    f"{self.segments[i - 1].t_end}; segments must be contiguous",
                    f"{path}[{i}]",
                )
        if not math.isclose(self.segments[-1].t_end, self.duration, rel_tol=1e-12, abs_tol=1e-12):
            raise ConfigurationError(
                f"segments end at {self.segments[-1].t_end} but duration is {self.duration}",
                path,
            )

    def _check_excitation(self):
        i0 = check_positive(self.base_current, "scenario.base_current")
        a_i = check_positive(
            self.mag_dither_amplitude, "scenario.mag_dither_amplitude", allow_zero=True
        )
        if a_i >= i0:
            raise ConfigurationError(
                "magnitude dither must stay below the base current", "scenario.mag_dither_amplitude"
            )
        w2 = check_positive(self.mag_dither_freq, "scenario.mag_dither_freq")
        w1 = self.esc.dither_freq
        for ratio in (w2 / w1, w1 / w2):
            if abs(ratio - round(ratio)) < 1e-9:
                raise ConfigurationError(
                    f"magnitude dither frequency {w2} is harmonically related to the angle "
                    f"dither frequency {w1}",
                    "scenario.mag_dither_freq",
                )

    @property
    def n_steps(self):
        return int(round(self.duration / self.sample_dt))

    def params_at(self, t):
        for seg in self.segments:
            if t < seg.t_end:
                return seg.params
        return self.segments[-1].params

    def current_at(self, t):
        return self.base_current + self.mag_dither_amplitude * math.sin(self.mag_dither_freq * t)


@dataclass(frozen=True)
class SampleRecord:
    """One simulation step. Disabled estimators leave their fields as ``None``."""

    t: float
    ij: float
    theta_cmd: float
    v_true: float
    v_meas: float
    alpha_hat: float | None
    vth_hat_rwls: float | None
    zth_hat_rwls: float | None
    vth_hat_kf: float | None
    zth_hat_kf: float | None
    alpha_true: float
    zth_true: float
    vth_true: float


def run_scenario(scenario):
    """Yield one :class:`SampleRecord` per step, in time order."""
    dt = scenario.sample_dt
    enabled = scenario.estimators
    channel = NoiseChannel(scenario.noise_sigma, scenario.noise_seed)
    esc_cfg, rwls_cfg, kf_cfg = scenario.esc, scenario.rwls, scenario.kalman
    esc_state = esc_init(esc_cfg)
    lsq_state = rwls_init(rwls_cfg)
    kf_state = kf_init(kf_cfg)

    for k in range(scenario.n_steps):
        t = k * dt
        params = scenario.params_at(t)
        ij = scenario.current_at(t)
        if "esc" in enabled:
            theta_cmd = esc_command(esc_state, esc_cfg)
        else:
            theta_cmd = esc_cfg.theta0
        v_true = node_voltage(params, Phasor(ij, theta_cmd)).magnitude
        v_meas = measure(v_true, channel)

        alpha_hat = vth_rwls = zth_rwls = vth_kf = zth_kf = None
        if "esc" in enabled:
            esc_state = esc_step(esc_state, esc_cfg, v_meas * v_meas)
            alpha_hat = alpha_estimate(esc_state)
        h = np.array([1.0, ij])
        if "rwls" in enabled:
            lsq_state = rwls_update(lsq_state, Regressor(h, v_meas), rwls_cfg)
            vth_rwls, zth_rwls = float(lsq_state.theta[0]), float(lsq_state.theta[1])
        if "kalman" in enabled:
            kf_state = kf_update(kf_predict(kf_state, kf_cfg), kf_cfg, h, v_meas)
            vth_kf, zth_kf = kf_estimate(kf_state)

        yield SampleRecord(
            t=t,
            ij=ij,
            theta_cmd=theta_cmd,
            v_true=v_true,
            v_meas=v_meas,
            alpha_hat=alpha_hat,
            vth_hat_rwls=vth_rwls,
            zth_hat_rwls=zth_rwls,
            vth_hat_kf=vth_kf,
            zth_hat_kf=zth_kf,
            alpha_true=params.alpha,
            zth_true=params.zth,
            vth_true=params.vth,
        )


# estimate name -> (record field, truth field, band key, display scale)
ESTIMATES = {
    "alpha": ("alpha_hat", "alpha_true", "alpha", math.degrees(1.0)),
    "vth_rwls": ("vth_hat_rwls", "vth_true", "v", 1.0),
    "zth_rwls": ("zth_hat_rwls", "zth_true", "z", 1.0),
    "vth_kf": ("vth_hat_kf", "vth_true", "v", 1.0),
    "zth_kf": ("zth_hat_kf", "zth_true", "z", 1.0),
}

DEFAULT_BANDS = {"alpha": 1.0, "z": 0.1, "v": 1.0}


@dataclass
class EstimateSummary:
    """Convergence metrics of one estimate over one segment.

    Angles are reported in degrees. ``settling_time`` is ``None`` when the
    estimate never holds inside its band for the required time.
    """

    truth: float
    band: float
    mean_error: float
    std: float
    settling_time: float | None
    trajectory_mean: float


@dataclass
class SegmentSummary:
    index: int
    t_start: float
    t_end: float
    estimates: dict


@dataclass
class SummaryMetrics:
    settle_window: float
    hold_time: float
    segments: list

    def to_dict(self):
        return {
            "settle_window": self.settle_window,
            "hold_time": self.hold_time,
            "segments": [
                {
                    "index": seg.index,
                    "t_start": seg.t_start,
                    "t_end": seg.t_end,
                    "estimates": {
                        name: {
                            **vars(est),
                            "settling_time": (
                                "never" if est.settling_time is None else est.settling_time
                            ),
                        }
                        for name, est in seg.estimates.items()
                    },
                }
                for seg in self.segments
            ],
        }


def _segment_bounds(truth):
    """Index ranges where the ``(alpha, zth, vth)`` truth stays constant."""
    change = np.any(np.diff(truth, axis=0) != 0, axis=1)
    starts = np.concatenate([[0], np.flatnonzero(change) + 1])
    ends = np.concatenate([starts[1:], [truth.shape[0]]])
    return list(zip(starts, ends))


def settling_time(t, estimate, truth, band, hold_time):
    """First time after which ``|estimate - truth| <= band`` holds for ``hold_time``.

    ``t`` must be uniformly sampled. Returns ``None`` if no such time exists
    inside the given samples.
    """
    t = np.asarray(t, dtype=float)
    inside = np.abs(np.asarray(estimate, dtype=float) - truth) <= band
    if t.size < 2:
        return float(t[0]) if t.size and inside[0] and hold_time <= 0 else None
    dt = (t[-1] - t[0]) / (t.size - 1)
    need = int(round(hold_time / dt)) + 1
    # run[i]: consecutive in-band samples starting at i
    run = np.zeros(t.size + 1, dtype=int)
    for i in range(t.size - 1, -1, -1):
        run[i] = run[i + 1] + 1 if inside[i] else 0
    hits = np.flatnonzero(run[:-1] >= need)
    return float(t[hits[0]]) if hits.size else None


def summarize(records, settle_window, bands=None, hold_time=DEFAULT_HOLD_TIME):
    """Per-segment steady-state error, spread, settling time and trajectory mean.

    Args:
        records: Sequence of :class:`SampleRecord`.
        settle_window: Trailing window (seconds) for the steady-state statistics.
        bands: Tolerance per quantity, keys ``alpha`` (degrees), ``z`` (ohms)
            and ``v`` (volts). Missing keys take :data:`DEFAULT_BANDS`.
        hold_time: How long an estimate must stay in band to count as settled.

    Raises:
        ValueError: ``records`` is empty or ``settle_window`` exceeds a segment.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to summarize")
    bands = {**DEFAULT_BANDS, **(bands or {})}
    t = np.array([r.t for r in records])
    truth = np.array([[r.alpha_true, r.zth_true, r.vth_true] for r in records])
    segments = []
    for index, (lo, hi) in enumerate(_segment_bounds(truth)):
        t_seg = t[lo:hi]
        length = t_seg[-1] - t_seg[0]
        if settle_window > length:
            raise ValueError(
                f"settle window {settle_window} s exceeds segment {index} "
                f"({t_seg[0]}-{t_seg[-1]} s)"
            )
        window = t_seg >= t_seg[-1] - settle_window
        estimates = {}
        for name, (attr, truth_attr, band_key, scale) in ESTIMATES.items():
            values = [getattr(r, attr) for r in records[lo:hi]]
            if any(v is None for v in values):
                continue
            est = np.asarray(values, dtype=float) * scale
            true_value = getattr(records[lo], truth_attr) * scale
            err = est - true_value
            estimates[name] = EstimateSummary(
                truth=true_value,
                band=bands[band_key],
                mean_error=float(err[window].mean()),
                std=float(est[window].std()),
                settling_time=settling_time(t_seg, est, true_value, bands[band_key], hold_time),
                trajectory_mean=float(est.mean()),
            )
        segments.append(SegmentSummary(index, float(t_seg[0]), float(t_seg[-1]), estimates))
    return SummaryMetrics(settle_window=settle_window, hold_time=hold_time, segments=segments)
