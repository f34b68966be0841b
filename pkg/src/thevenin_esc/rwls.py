"""Recursive weighted least squares, covariance form, with exponential forgetting.

Estimates ``[Vth, Zth]`` from the affine model ``z = Vth + Zth * Ij + v`` that
holds when the injected angle sits at the voltage maximum. The regressor row
is ``h = [1, Ij]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from ._validation import (
    as_current_column,
    check_interval,
    check_positive,
    check_vector,
    design_matrix,
)
from .exceptions import NumericalBreakdownError


@dataclass(frozen=True)
class RwlsConfig:
    """Estimator settings.

    Attributes:
        theta0: Initial ``[Vth, Zth]`` estimate.
        p0: Initial covariance scale, ``P(0) = p0 * I``.
        forgetting: Forgetting factor in (0, 1]; 1 gives ordinary weighted RLS.
        weight: Per-sample measurement weight ``w``.
    """

    theta0: np.ndarray = field(default_factory=lambda: np.zeros(2))
    p0: float = 1e6
    forgetting: float = 0.995
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "theta0", check_vector(self.theta0, "rwls.theta0"))
        check_positive(self.p0, "rwls.p0")
        check_interval(self.forgetting, "rwls.forgetting", 0.0, 1.0, closed_high=True)
        check_positive(self.weight, "rwls.weight")


@dataclass(frozen=True)
class Regressor:
    """One measurement: regressor row ``h = [1, Ij]`` and observed voltage ``z``."""

    h: np.ndarray
    z: float

    @classmethod
    def from_current(cls, ij, z):
        return cls(np.array([1.0, float(ij)]), float(z))


@dataclass(frozen=True)
class LsqState:
    """Parameter estimate ``theta``, covariance ``cov`` and step counter ``k``."""

    theta: np.ndarray
    cov: np.ndarray
    k: int = 0


def rwls_init(cfg):
    return LsqState(theta=cfg.theta0.copy(), cov=cfg.p0 * np.eye(2), k=0)


def rwls_predict(state, h):
    return float(np.dot(h, state.theta))


def rwls_update(state, r, cfg):
    """One covariance-form RWLS step.

    ``K = P h / (λ/w + hᵀ P h)``, ``θ ← θ + K (z − hᵀθ)``,
    ``P ← (P − K hᵀ P) / λ``, the last evaluated in Joseph form.
    """
    h = r.h
    P = state.cov
    Ph = P @ h
    denom = cfg.forgetting / cfg.weight + float(h @ Ph)
    if not denom > 0.0:
        raise NumericalBreakdownError(f"RWLS gain denominator is {denom!r} at step {state.k}")
    gain = Ph / denom
    innovation = r.z - float(h @ state.theta)
    theta = state.theta + gain * innovation
    P = joseph_update(P, gain, h, cfg.forgetting / cfg.weight) / cfg.forgetting
    return LsqState(theta=theta, cov=P, k=state.k + 1)


def joseph_update(P, gain, h, r):
    """``(I - K hᵀ) P (I - K hᵀ)ᵀ + r K Kᵀ``, symmetrized.

    Equal to ``P - K hᵀ P`` for the optimal gain but keeps the small
    eigenvalue accurate when ``P`` starts many orders of magnitude above it.
    """
    A = np.eye(P.shape[0]) - np.outer(gain, h)
    P = A @ P @ A.T + r * np.outer(gain, gain)
    return 0.5 * (P + P.T)


class RecursiveLeastSquares(RegressorMixin, BaseEstimator):
    """Streaming ``[Vth, Zth]`` estimator with the sklearn regressor API.

    ``X`` holds injected current magnitudes (``(n,)`` or ``(n, 1)``) and ``y``
    the measured node-voltage magnitudes. :meth:`fit` restarts from the
    prior; :meth:`partial_fit` continues the recursion.

    Attributes:
        coef_: ``[Vth, Zth]`` estimate after the last sample.
        covariance_: 2x2 covariance ``P``.
        n_updates_: Samples absorbed so far.
    """

    def __init__(self, forgetting=0.995, p0=1e6, weight=1.0, theta0=(0.0, 0.0)):
        self.forgetting = forgetting
        self.p0 = p0
        self.weight = weight
        self.theta0 = theta0

    def _config(self):
        return RwlsConfig(
            theta0=self.theta0, p0=self.p0, forgetting=self.forgetting, weight=self.weight
        )

    def fit(self, X, y):
        self.config_ = self._config()
        self.state_ = rwls_init(self.config_)
        return self.partial_fit(X, y)

    def partial_fit(self, X, y):
        if not hasattr(self, "state_"):
            self.config_ = self._config()
            self.state_ = rwls_init(self.config_)
        currents = as_current_column(X)
        z = np.asarray(y, dtype=float).ravel()
        if z.shape != currents.shape:
            raise ValueError(f"X and y lengths differ: {currents.shape[0]} vs {z.shape[0]}")
        state = self.state_
        for row, zk in zip(design_matrix(currents), z):
            state = rwls_update(state, Regressor(row, float(zk)), self.config_)
        self.state_ = state
        return self

    def update(self, ij, z):
        """Absorb a single ``(Ij, z)`` sample; returns ``self``."""
        if not hasattr(self, "state_"):
            self.config_ = self._config()
            self.state_ = rwls_init(self.config_)
        self.state_ = rwls_update(self.state_, Regressor.from_current(ij, z), self.config_)
        return self

    def predict(self, X):
        self._check_fitted()
        return design_matrix(as_current_column(X)) @ self.state_.theta

    def _check_fitted(self):
        if not hasattr(self, "state_"):
            raise NotFittedError(f"{type(self).__name__} has not seen any samples yet")

    @property
    def coef_(self):
        self._check_fitted()
        return self.state_.theta.copy()

    @property
    def covariance_(self):
        self._check_fitted()
        return self.state_.cov.copy()

    @property
    def n_updates_(self):
        self._check_fitted()
        return self.state_.k
