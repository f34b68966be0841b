"""Online Thevenin equivalent identification at a grid node.

An inverter modelled as a current source dithers both the angle and the
magnitude of its injection. Extremum seeking on the angle finds the voltage
maximum at ``θ = -α``; recursive least squares or a Kalman filter on the
magnitude dither recovers ``Vth`` and ``|Zth|``.
"""

from .esc import (
    EscConfig,
    EscState,
    ExtremumSeekingController,
    alpha_estimate,
    esc_command,
    esc_init,
    esc_step,
)
from .exceptions import ConfigurationError, NumericalBreakdownError
from .kalman import (
    KalmanConfig,
    KalmanRegressor,
    KalmanState,
    kf_estimate,
    kf_init,
    kf_predict,
    kf_update,
)
from .phasor import (
    NoiseChannel,
    Phasor,
    TheveninParams,
    measure,
    node_voltage,
    voltage_magnitude_squared,
)
from .rwls import (
    LsqState,
    RecursiveLeastSquares,
    Regressor,
    RwlsConfig,
    rwls_init,
    rwls_predict,
    rwls_update,
)
from .simulation import SampleRecord, Scenario, Segment, run_scenario, summarize

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "EscConfig",
    "EscState",
    "ExtremumSeekingController",
    "KalmanConfig",
    "KalmanRegressor",
    "KalmanState",
    "LsqState",
    "NoiseChannel",
    "NumericalBreakdownError",
    "Phasor",
    "RecursiveLeastSquares",
    "Regressor",
    "RwlsConfig",
    "SampleRecord",
    "Scenario",
    "Segment",
    "TheveninParams",
    "alpha_estimate",
    "esc_command",
    "esc_init",
    "esc_step",
    "kf_estimate",
    "kf_init",
    "kf_predict",
    "kf_update",
    "measure",
    "node_voltage",
    "run_scenario",
    "rwls_init",
    "rwls_predict",
    "rwls_update",
    "summarize",
    "voltage_magnitude_squared",
]
