import math

import pytest

from thevenin_esc.config import load_config, reference_scenario_path
from thevenin_esc.phasor import TheveninParams
from thevenin_esc.simulation import run_scenario

INTERVAL_1 = TheveninParams.from_degrees(245.0, 1.42, 35.3)
INTERVAL_2 = TheveninParams.from_degrees(245.0, 2.8, 54.7)


@pytest.fixture(scope="session")
def reference_scenario():
    scenario, _ = load_config(reference_scenario_path())
    return scenario


@pytest.fixture(scope="session")
def reference_records(reference_scenario):
    return list(run_scenario(reference_scenario))


def deg(x):
    return math.degrees(x)
