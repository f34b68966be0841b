import copy
import json
import math

import pytest

from thevenin_esc.config import OutputOptions, load_config, reference_scenario_path, parse_config
from thevenin_esc.esc import EscConfig
from thevenin_esc.exceptions import ConfigurationError
from thevenin_esc.kalman import KalmanConfig
from thevenin_esc.rwls import RwlsConfig
from thevenin_esc.simulation import ESTIMATORS

MINIMAL = {
    "scenario": {
        "segments": [{"t_start": 0, "t_end": 10, "vth": 245, "zth": 1.42, "alpha_deg": 35.3}]
    }
}


def with_(path, value, doc=MINIMAL):
    doc = copy.deepcopy(doc)
    node = doc
    *parents, leaf = path
    for key in parents:
        node = node.setdefault(key, {}) if isinstance(key, str) else node[key]
    node[leaf] = value
    return doc


def key_path_of(doc):
    with pytest.raises(ConfigurationError) as err:
        parse_config(doc)
    return err.value.key_path


class TestDefaults:
    def test_segments_only(self):
        scenario, output = parse_config(MINIMAL)
        assert scenario.duration == 10.0
        assert scenario.noise_sigma == 0.5
        assert scenario.estimators == frozenset(ESTIMATORS)
        assert scenario.esc == EscConfig()
        assert scenario.rwls.forgetting == RwlsConfig().forgetting
        assert scenario.kalman.R == KalmanConfig().R
        assert output == OutputOptions()

    def test_segment_angle_in_degrees(self):
        scenario, _ = parse_config(MINIMAL)
        assert scenario.segments[0].params.alpha == pytest.approx(math.radians(35.3))

    def test_bundled_scenario(self):
        scenario, _ = load_config(reference_scenario_path())
        assert [s.t_start for s in scenario.segments] == [0.0, 105.0]
        assert scenario.duration == 195.0
        assert scenario.n_steps == 19500
        assert scenario.noise_sigma == 0.5
        second = scenario.segments[1].params
        assert (second.vth, second.zth) == (245.0, 2.8)
        assert math.degrees(second.alpha) == pytest.approx(54.7)


class TestRejection:
    @pytest.mark.parametrize(
        "path, value, expected",
        [
            (("scenario", "sample_rate"), 100, "scenario.sample_rate"),
            (("esc", "gian"), 1.0, "esc.gian"),
            (("rwls", "lambda"), 0.99, "rwls.lambda"),
            (("kalman", "q"), 1.0, "kalman.q"),
            (("noise", "std"), 1.0, "noise.std"),
            (("output", "bands"), 1.0, "output.bands"),
            (("plots",), {}, "plots"),
            (("scenario", "segments", 0, "Zth"), 1.0, "scenario.segments[0].Zth"),
        ],
    )
    def test_unknown_keys(self, path, value, expected):
        assert key_path_of(with_(path, value)) == expected

    @pytest.mark.parametrize(
        "path, value, expected",
        [
            (("rwls", "forgetting"), 1.5, "rwls.forgetting"),
            (("rwls", "p0"), -1.0, "rwls.p0"),
            (("rwls", "theta0"), [1.0], "rwls.theta0"),
            (("esc", "dither_amplitude"), 0.0, "esc.dither_amplitude"),
            (("esc", "hpf_cutoff"), 100.0, "esc.hpf_cutoff"),
            (("kalman", "R"), 0.0, "kalman.R"),
            (("kalman", "Q"), [[1.0, 0.0]], "kalman.Q"),
            (("noise", "sigma"), -0.5, "noise.sigma"),
            (("noise", "seed"), 2**64, "noise.seed"),
            (("noise", "seed"), 1.5, "noise.seed"),
            (("scenario", "sample_dt"), "0.01", "scenario.sample_dt"),
            (("scenario", "estimators"), ["esc", "ekf"], "scenario.estimators"),
            (("scenario", "segments", 0, "alpha_deg"), 90.0, "scenario.segments[0].alpha_deg"),
            (("scenario", "segments", 0, "zth"), 0.0, "scenario.segments[0].zth"),
            (("output", "settle_window"), -1.0, "output.settle_window"),
        ],
    )
    def test_invalid_values(self, path, value, expected):
        assert key_path_of(with_(path, value)) == expected

    def test_missing_segments(self):
        assert key_path_of({"scenario": {}}) == "scenario.segments"

    def test_missing_segment_field(self):
        doc = copy.deepcopy(MINIMAL)
        del doc["scenario"]["segments"][0]["vth"]
        assert key_path_of(doc) == "scenario.segments[0].vth"

    def test_harmonic_magnitude_dither(self):
        w1 = EscConfig().dither_freq
        assert key_path_of(with_(("scenario", "mag_dither_freq"), w1 / 2)) == (
            "scenario.mag_dither_freq"
        )

    def test_message_names_key(self):
        with pytest.raises(ConfigurationError, match=r"^rwls\.forgetting: "):
            parse_config(with_(("rwls", "forgetting"), 1.5))

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigurationError):
            load_config(path)


class TestOverrides:
    def test_all_sections(self):
        doc = copy.deepcopy(MINIMAL)
        doc.update(
            esc={"dither_amplitude": 0.1, "gain": 1e-4, "theta0": -0.5},
            rwls={"forgetting": 1.0, "theta0": [240.0, 1.0]},
            kalman={"R": 0.5, "P0": [[10.0, 0.0], [0.0, 10.0]]},
            noise={"sigma": 0.0, "seed": 99},
            output={"settle_window": 5, "band_z": 0.2},
        )
        doc["scenario"].update(sample_dt=0.02, estimators=["rwls"], base_current=20)
        scenario, output = parse_config(json.loads(json.dumps(doc)))
        assert scenario.esc.dither_amplitude == 0.1 and scenario.esc.theta0 == -0.5
        assert scenario.esc.sample_dt == 0.02
        assert list(scenario.rwls.theta0) == [240.0, 1.0]
        assert scenario.kalman.P0[0, 0] == 10.0
        assert (scenario.noise_sigma, scenario.noise_seed) == (0.0, 99)
        assert scenario.estimators == {"rwls"}
        assert scenario.base_current == 20.0
        assert output.bands["z"] == 0.2 and output.settle_window == 5.0
