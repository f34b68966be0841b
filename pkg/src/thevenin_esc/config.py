"""JSON scenario documents.

A document has the top-level sections ``scenario``, ``esc``, ``rwls``,
``kalman``, ``noise`` and ``output``. Only ``scenario.segments`` is required;
everything else falls back to the library defaults. Unknown keys are
rejected with their dotted path so typos in tunables do not go unnoticed.

Units: times in seconds, frequencies in rad/s, segment angles in degrees,
ESC angles in radians.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from importlib import resources

from .esc import EscConfig
from .exceptions import ConfigurationError
from .kalman import KalmanConfig
from .phasor import TheveninParams
from .rwls import RwlsConfig
from .simulation import DEFAULT_BANDS, DEFAULT_HOLD_TIME, ESTIMATORS, Scenario, Segment

SECTIONS = ("scenario", "esc", "rwls", "kalman", "noise", "output")
SCENARIO_KEYS = (
    "segments",
    "base_current",
    "mag_dither_amplitude",
    "mag_dither_freq",
    "sample_dt",
    "duration",
    "estimators",
)
SEGMENT_KEYS = ("t_start", "t_end", "vth", "zth", "alpha_deg")
ESC_KEYS = ("dither_amplitude", "dither_freq", "hpf_cutoff", "gain", "theta0")
RWLS_KEYS = ("theta0", "p0", "forgetting", "weight")
KALMAN_KEYS = ("F", "Q", "R", "x0", "P0")
NOISE_KEYS = ("sigma", "seed")
OUTPUT_KEYS = ("settle_window", "hold_time", "band_alpha_deg", "band_z", "band_v")


@dataclass(frozen=True)
class OutputOptions:
    settle_window: float = 20.0
    hold_time: float = DEFAULT_HOLD_TIME
    band_alpha_deg: float = DEFAULT_BANDS["alpha"]
    band_z: float = DEFAULT_BANDS["z"]
    band_v: float = DEFAULT_BANDS["v"]

    @property
    def bands(self):
        return {"alpha": self.band_alpha_deg, "z": self.band_z, "v": self.band_v}


def _section(doc, name, allowed, path):
    value = doc.get(name, {})
    where = f"{path}.{name}" if path else name
    if not isinstance(value, dict):
        raise ConfigurationError("expected an object", where)
    for key in value:
        if key not in allowed:
            raise ConfigurationError(f"unknown key (allowed: {', '.join(allowed)})", f"{where}.{key}")
    return value


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"expected a number, got {value!r}", path)
    if not math.isfinite(value):
        raise ConfigurationError("must be finite", path)
    return float(value)


def _numbers(value, path, shape):
    """Nested list of numbers with the given ``(rows,)`` or ``(rows, cols)`` shape."""
    if len(shape) == 1:
        if not isinstance(value, list) or len(value) != shape[0]:
            raise ConfigurationError(f"expected a list of {shape[0]} numbers", path)
        return [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]
    if not isinstance(value, list) or len(value) != shape[0]:
        raise ConfigurationError(f"expected a {shape[0]}x{shape[1]} nested list", path)
    return [_numbers(row, f"{path}[{i}]", shape[1:]) for i, row in enumerate(value)]


def _with_path(factory, section, **kwargs):
    """Build a config object, re-labelling errors with the document section."""
    try:
        return factory(**kwargs)
    except ConfigurationError as exc:
        key = exc.key_path or section
        if "." in key:
            key = f"{section}.{key.split('.', 1)[1]}"
        raise ConfigurationError(str(exc).split(": ", 1)[-1], key) from None


def parse_config(doc):
    """Turn a decoded JSON document into ``(Scenario, OutputOptions)``."""
    if not isinstance(doc, dict):
        raise ConfigurationError("top level must be an object", "<root>")
    for key in doc:
        if key not in SECTIONS:
            raise ConfigurationError(f"unknown section (allowed: {', '.join(SECTIONS)})", key)

    sc = _section(doc, "scenario", SCENARIO_KEYS, "")
    if "segments" not in sc:
        raise ConfigurationError("required", "scenario.segments")
    raw_segments = sc["segments"]
    if not isinstance(raw_segments, list) or not raw_segments:
        raise ConfigurationError("expected a non-empty list", "scenario.segments")
    segments = []
    for i, seg in enumerate(raw_segments):
        path = f"scenario.segments[{i}]"
        if not isinstance(seg, dict):
            raise ConfigurationError("expected an object", path)
        for key in seg:
            if key not in SEGMENT_KEYS:
                raise ConfigurationError(f"unknown key (allowed: {', '.join(SEGMENT_KEYS)})", f"{path}.{key}")
        missing = [k for k in SEGMENT_KEYS if k not in seg]
        if missing:
            raise ConfigurationError("required", f"{path}.{missing[0]}")
        vals = {k: _number(seg[k], f"{path}.{k}") for k in SEGMENT_KEYS}
        try:
            params = TheveninParams.from_degrees(vals["vth"], vals["zth"], vals["alpha_deg"])
        except ConfigurationError as exc:
            field_name = {"alpha": "alpha_deg"}.get(exc.key_path, exc.key_path)
            raise ConfigurationError(str(exc).split(": ", 1)[-1], f"{path}.{field_name}") from None
        segments.append(Segment(vals["t_start"], vals["t_end"], params))

    scenario_kwargs = {}
    for key in ("base_current", "mag_dither_amplitude", "mag_dither_freq", "sample_dt", "duration"):
        if key in sc:
            scenario_kwargs[key] = _number(sc[key], f"scenario.{key}")
    if "estimators" in sc:
        est = sc["estimators"]
        if not isinstance(est, list) or any(e not in ESTIMATORS for e in est):
            raise ConfigurationError(
                f"expected a list drawn from {list(ESTIMATORS)}, got {est!r}", "scenario.estimators"
            )
        scenario_kwargs["estimators"] = frozenset(est)

    esc_doc = _section(doc, "esc", ESC_KEYS, "")
    esc_kwargs = {k: _number(v, f"esc.{k}") for k, v in esc_doc.items()}
    esc_kwargs["sample_dt"] = scenario_kwargs.get("sample_dt", 0.01)
    esc = _with_path(EscConfig, "esc", **esc_kwargs)

    rwls_doc = _section(doc, "rwls", RWLS_KEYS, "")
    rwls_kwargs = {}
    for key, value in rwls_doc.items():
        path = f"rwls.{key}"
        rwls_kwargs[key] = _numbers(value, path, (2,)) if key == "theta0" else _number(value, path)
    rwls = _with_path(RwlsConfig, "rwls", **rwls_kwargs)

    kf_doc = _section(doc, "kalman", KALMAN_KEYS, "")
    kf_kwargs = {}
    for key, value in kf_doc.items():
        path = f"kalman.{key}"
        if key == "R":
            kf_kwargs[key] = _number(value, path)
        elif key == "x0":
            kf_kwargs[key] = _numbers(value, path, (2,))
        else:
            kf_kwargs[key] = _numbers(value, path, (2, 2))
    kalman = _with_path(KalmanConfig, "kalman", **kf_kwargs)

    noise = _section(doc, "noise", NOISE_KEYS, "")
    if "sigma" in noise:
        scenario_kwargs["noise_sigma"] = _number(noise["sigma"], "noise.sigma")
    if "seed" in noise:
        seed = noise["seed"]
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
            raise ConfigurationError(f"expected an unsigned 64-bit integer, got {seed!r}", "noise.seed")
        scenario_kwargs["noise_seed"] = seed

    out_doc = _section(doc, "output", OUTPUT_KEYS, "")
    output = OutputOptions(**{k: _number(v, f"output.{k}") for k, v in out_doc.items()})
    for f in fields(output):
        if getattr(output, f.name) < 0:
            raise ConfigurationError("must be >= 0", f"output.{f.name}")

    scenario = Scenario(
        segments=tuple(segments), esc=esc, rwls=rwls, kalman=kalman, **scenario_kwargs
    )
    return scenario, output


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"invalid JSON: {exc}", "<root>") from None
    return parse_config(doc)


def reference_scenario_path():
    """Location of the bundled two-interval reference scenario."""
    return resources.files("thevenin_esc") / "data" / "paper_scenario.json"
