"""Linear Kalman filter treating ``[Vth, Zth]`` as a slowly drifting state.

Uses the same measurement row ``h = [1, Ij]`` as the RWLS estimator. With
``F = I``, ``Q = 0`` and ``R = 1/w`` the recursion coincides with RWLS at
``λ = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from ._validation import (
    as_current_column,
    check_matrix,
    check_positive,
    check_vector,
    design_matrix,
)
from .exceptions import NumericalBreakdownError
from .rwls import joseph_update

# Q_V / Q_Z near I0**2 lets the weakly observed V-vs-Z direction recover
# within seconds without letting Z absorb the magnitude dither.
DEFAULT_Q = ((1e-3, 0.0), (0.0, 1e-6))


@dataclass(frozen=True)
class KalmanConfig:
    """Filter model.

    Attributes:
        F: State transition matrix.
        Q: Process noise covariance per step (symmetric PSD).
        R: Measurement noise variance in volts squared.
        x0: Initial state ``[Vth, Zth]``.
        P0: Initial covariance (symmetric PD).
    """

    F: np.ndarray = field(default_factory=lambda: np.eye(2))
    Q: np.ndarray = field(default_factory=lambda: np.array(DEFAULT_Q))
    R: float = 0.25
    x0: np.ndarray = field(default_factory=lambda: np.zeros(2))
    P0: np.ndarray = field(default_factory=lambda: 1e6 * np.eye(2))

    def __post_init__(self):
        object.__setattr__(self, "F", check_matrix(self.F, "kalman.F"))
        object.__setattr__(self, "Q", check_matrix(self.Q, "kalman.Q", psd=True))
        object.__setattr__(self, "R", check_positive(self.R, "kalman.R"))
        object.__setattr__(self, "x0", check_vector(self.x0, "kalman.x0"))
        object.__setattr__(
            self, "P0", check_matrix(self.P0, "kalman.P0", positive_definite=True)
        )


@dataclass(frozen=True)
class KalmanState:
    x: np.ndarray
    P: np.ndarray
    k: int = 0


def kf_init(cfg):
    return KalmanState(x=cfg.x0.copy(), P=cfg.P0.copy(), k=0)


def kf_predict(state, cfg, u=None, B=None):
    """Time update ``x ← F x + B u``, ``P ← F P Fᵀ + Q``.

    The control term defaults to zero; this application never drives it.
    """
    F = cfg.F
    x = F @ state.x
    if u is not None and B is not None:
        x = x + np.asarray(B, dtype=float) @ np.asarray(u, dtype=float)
    # Congruence F P Fᵀ; a bare F P + Fᵀ Q does not propagate a covariance.
    P = F @ state.P @ F.T + cfg.Q
    P = 0.5 * (P + P.T)
    return KalmanState(x=x, P=P, k=state.k)


def kf_update(state, cfg, h, z):
    """Measurement update for a scalar observation ``z`` with row ``h``."""
    h = np.asarray(h, dtype=float)
    P = state.P
    Ph = P @ h
    # Innovation is measurement minus predicted measurement H x, not Z + F x.
    innovation = z - float(h @ state.x)
    S = float(h @ Ph) + cfg.R
    if not S > 0.0:
        raise NumericalBreakdownError(f"innovation variance is {S!r} at step {state.k}")
    gain = Ph / S
    x = state.x + gain * innovation
    # (I - K hᵀ) P in Joseph form; same arithmetic as the RWLS step.
    P = joseph_update(P, gain, h, cfg.R)
    return KalmanState(x=x, P=P, k=state.k + 1)


def kf_estimate(state):
    """Current ``(Vth, Zth)`` estimate."""
    return float(state.x[0]), float(state.x[1])


def kf_innovation(state, h, z):
    return z - float(np.dot(h, state.x))


class KalmanRegressor(RegressorMixin, BaseEstimator):
    """Kalman filter over ``[Vth, Zth]`` with the sklearn regressor API.

    Each sample runs a predict followed by an update. ``X`` holds injected
    current magnitudes, ``y`` the measured voltages.
    """

    def __init__(self, Q=DEFAULT_Q, R=0.25, F=((1.0, 0.0), (0.0, 1.0)), x0=(0.0, 0.0), P0=1e6):
        self.Q = Q
        self.R = R
        self.F = F
        self.x0 = x0
        self.P0 = P0

    def _config(self):
        P0 = self.P0
        if np.ndim(P0) == 0:
            P0 = float(P0) * np.eye(2)
        return KalmanConfig(F=self.F, Q=self.Q, R=self.R, x0=self.x0, P0=P0)

    def _ensure_state(self):
        if not hasattr(self, "state_"):
            self.config_ = self._config()
            self.state_ = kf_init(self.config_)

    def fit(self, X, y):
        for attr in ("state_", "config_"):
            if hasattr(self, attr):
                delattr(self, attr)
        return self.partial_fit(X, y)

    def partial_fit(self, X, y):
        self._ensure_state()
        currents = as_current_column(X)
        z = np.asarray(y, dtype=float).ravel()
        if z.shape != currents.shape:
            raise ValueError(f"X and y lengths differ: {currents.shape[0]} vs {z.shape[0]}")
        state = self.state_
        for row, zk in zip(design_matrix(currents), z):
            state = kf_update(kf_predict(state, self.config_), self.config_, row, float(zk))
        self.state_ = state
        return self

    def update(self, ij, z):
        self._ensure_state()
        h = np.array([1.0, float(ij)])
        self.state_ = kf_update(kf_predict(self.state_, self.config_), self.config_, h, float(z))
        return self

    def predict(self, X):
        if not hasattr(self, "state_"):
            raise NotFittedError(f"{type(self).__name__} has not seen any samples yet")
        return design_matrix(as_current_column(X)) @ self.state_.x

    @property
    def coef_(self):
        if not hasattr(self, "state_"):
            raise NotFittedError(f"{type(self).__name__} has not seen any samples yet")
        return self.state_.x.copy()

    @property
    def covariance_(self):
        if not hasattr(self, "state_"):
            raise NotFittedError(f"{type(self).__name__} has not seen any samples yet")
        return self.state_.P.copy()
