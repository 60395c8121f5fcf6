"""Quadratic-Gaussian compress-and-estimate distortion.

Observation model: ``Y_l = sqrt(gamma_l) * X + Z_l`` with ``X`` and ``Z_l``
i.i.d. standard normal. Each encoder compresses its observation for squared
error, and the decoder forms the MMSE estimate of ``X`` from the
reproductions. All rates are in bits per source symbol.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, InfeasibleError
from .rdmath import log2_plus

LN2 = math.log(2.0)


@dataclass(frozen=True)
class GaussianObservationModel:
    """Per-channel SNRs of the AWGN observations."""

    gammas: tuple[float, ...]

    def __post_init__(self):
        g = tuple(float(v) for v in self.gammas)
        if len(g) < 1:
            raise DomainError("need at least one observation channel")
        for v in g:
            if not (v > 0.0 and math.isfinite(v)):
                raise DomainError(f"every SNR must be positive and finite, got {v!r}")
        object.__setattr__(self, "gammas", g)

    @property
    def L(self) -> int:
        return len(self.gammas)

    @property
    def gamma_sum(self) -> float:
        return math.fsum(self.gammas)

    @property
    def coefficients(self) -> np.ndarray:
        """Observation gains ``sqrt(gamma_l)``."""
        return np.sqrt(np.asarray(self.gammas))


@dataclass(frozen=True)
class RateAllocation:
    rates: tuple[float, ...]

    def __post_init__(self):
        r = tuple(float(v) for v in self.rates)
        for v in r:
            if not (v >= 0.0) or math.isnan(v):
                raise DomainError(f"rates must be nonnegative, got {v!r}")
        object.__setattr__(self, "rates", r)

    def __len__(self):
        return len(self.rates)


@dataclass(frozen=True)
class WaterfillingSolution:
    theta_unnormalized: float
    component_rates: tuple[float, ...]
    eigenvalues: tuple[float, ...]

    @property
    def theta_centralized(self) -> float:
        return self.theta_unnormalized / self.eigenvalues[0]

    @property
    def component_distortions(self) -> tuple[float, ...]:
        return tuple(min(self.theta_unnormalized, lam) for lam in self.eigenvalues)


@dataclass(frozen=True)
class RegionContour:
    target_distortion: float
    points: np.ndarray  # shape (n, 2): columns R1, R2, sorted by R1


def as_model(model) -> GaussianObservationModel:
    if isinstance(model, GaussianObservationModel):
        return model
    return GaussianObservationModel(tuple(model))


def _rate_vector(model: GaussianObservationModel, rates) -> np.ndarray:
    if not isinstance(rates, RateAllocation):
        rates = RateAllocation(tuple(np.atleast_1d(rates)))
    if len(rates) != model.L:
        raise DomainError(f"expected {model.L} rates, got {len(rates)}")
    return np.asarray(rates.rates, dtype=float)


def _check_rate(rate):
    rate = float(rate)
    if not rate >= 0.0:
        raise DomainError(f"rate must be nonnegative, got {rate!r}")
    return rate


def mmse_full(model) -> float:
    """MMSE of X given all unquantized observations: 1/(1+gamma_sum)."""
    model = as_model(model)
    return 1.0 / (1.0 + model.gamma_sum)


def idrf(model, rate) -> float:
    """Indirect distortion-rate function of X given the observation vector."""
    model = as_model(model)
    rate = _check_rate(rate)
    g = model.gamma_sum
    return 1.0 / (1.0 + g) + g / (1.0 + g) * 2.0 ** (-2.0 * rate)


def theta_centralized(model, rate) -> float:
    """Normalized water level for joint encoding of all observations."""
    model = as_model(model)
    rate = _check_rate(rate)
    L = model.L
    log_lam = math.log2(1.0 + model.gamma_sum)
    if rate <= 0.5 * log_lam:
        return 2.0 ** (-2.0 * rate)
    return 2.0 ** (-2.0 * rate / L - (L - 1) / L * log_lam)


def cedrf_centralized(model, rate) -> float:
    """CE distortion when one encoder sees all L observations."""
    model = as_model(model)
    g = model.gamma_sum
    return 1.0 / (g + 1.0) + g / (g + 1.0) * theta_centralized(model, rate)


def _summands(gammas: np.ndarray, rates: np.ndarray) -> np.ndarray:
    # gamma*(1-x)/(1+gamma*x) with x = 2^(-2R); expm1 keeps tiny rates accurate
    one_minus_x = -np.expm1(-2.0 * LN2 * rates)
    x = 1.0 - one_minus_x
    return gammas * one_minus_x / (1.0 + gammas * x)


def cedrf_distributed(model, rates) -> float:
    """CE distortion with one encoder per observation."""
    model = as_model(model)
    r = _rate_vector(model, rates)
    t = _summands(np.asarray(model.gammas), r)
    return 1.0 / (1.0 + math.fsum(t))


def invert_rate_term(gamma, t) -> float:
    """Rate at which one encoder's contribution to the precision sum equals ``t``."""
    gamma = float(gamma)
    t = float(t)
    if not gamma > 0.0:
        raise DomainError(f"gamma must be positive, got {gamma!r}")
    if t < 0.0:
        raise DomainError(f"summand must be nonnegative, got {t!r}")
    if t >= gamma:
        raise InfeasibleError(
            f"summand {t!r} needs infinite rate (it saturates at gamma={gamma!r})")
    if t == 0.0:
        return 0.0
    return -0.5 * math.log2((gamma - t) / (gamma * (1.0 + t)))


def region_contour(model, target_d, n_points=101) -> RegionContour:
    """Boundary of the two-encoder rate region {(R1, R2): D_CE <= target_d}.

    Parameterized by the first encoder's summand, so every point hits the
    target exactly up to rounding. Endpoints that would need infinite rate
    are dropped.
    """
    model = as_model(model)
    if model.L != 2:
        raise DomainError(f"rate-region contours need L=2, got L={model.L}")
    n_points = int(n_points)
    if n_points < 2:
        raise DomainError(f"need at least 2 contour points, got {n_points}")
    target_d = float(target_d)
    if target_d > 1.0:
        raise InfeasibleError(f"target distortion {target_d!r} exceeds the source variance 1")
    if target_d <= mmse_full(model):
        raise InfeasibleError(
            f"target distortion {target_d!r} is at or below mmse={mmse_full(model)!r}; "
            "needs infinite rate")
    g1, g2 = model.gammas
    total = 1.0 / target_d - 1.0
    lo, hi = max(0.0, total - g2), min(g1, total)
    pts = []
    for t1 in np.linspace(lo, hi, n_points):
        t2 = max(0.0, total - t1)
        if t1 >= g1 or t2 >= g2:
            continue
        pts.append((invert_rate_term(g1, t1), invert_rate_term(g2, t2)))
    pts.sort()
    return RegionContour(target_d, np.array(pts, dtype=float).reshape(-1, 2))


def contour_nonconvexity(model, contour: RegionContour):
    """Largest excess distortion at the midpoint of two contour points.

    Returns ``(margin, i, j)``. A positive margin means the midpoint of points
    ``i`` and ``j`` lies outside the region, so the region is not convex.
    """
    model = as_model(model)
    pts = contour.points
    best = (-math.inf, -1, -1)
    for i in range(len(pts)):
        mids = 0.5 * (pts[i] + pts[i + 1:])
        if len(mids) == 0:
            continue
        d = np.array([cedrf_distributed(model, m) for m in mids])
        k = int(np.argmax(d))
        margin = float(d[k] - contour.target_distortion)
        if margin > best[0]:
            best = (margin, i, i + 1 + k)
    return best


def cedrf_symmetric_sumrate(gamma, sum_rate, L) -> float:
    """Equal-SNR, equal-rate CE distortion with ``L`` encoders."""
    gamma = float(gamma)
    L = int(L)
    if not gamma > 0.0:
        raise DomainError(f"gamma must be positive, got {gamma!r}")
    if L < 1:
        raise DomainError(f"L must be at least 1, got {L}")
    sum_rate = _check_rate(sum_rate)
    t = _summands(np.array([gamma]), np.array([sum_rate / L]))[0]
    return 1.0 / (1.0 + L * t)


def cedrf_asymptotic_limit(gamma, sum_rate) -> float:
    """Limit of the symmetric CE distortion as L grows at fixed sum-rate."""
    gamma = float(gamma)
    if not gamma > 0.0:
        raise DomainError(f"gamma must be positive, got {gamma!r}")
    sum_rate = _check_rate(sum_rate)
    return 1.0 / (1.0 + 2.0 * gamma * LN2 * sum_rate / (1.0 + gamma))


def decay_constants(gamma) -> tuple[float, float]:
    """Coefficients of 1/R_sum in the large-sum-rate decay: (CE, CEO)."""
    gamma = float(gamma)
    if not gamma > 0.0:
        raise DomainError(f"gamma must be positive, got {gamma!r}")
    return (1.0 + gamma) / (2.0 * gamma * LN2), 1.0 / (2.0 * gamma)


def waterfilling(model, rate) -> WaterfillingSolution:
    """Reverse waterfilling over the eigenvalues (1+gamma_sum, 1, ..., 1)."""
    model = as_model(model)
    rate = _check_rate(rate)
    L = model.L
    lam1 = 1.0 + model.gamma_sum
    eig = (lam1,) + (1.0,) * (L - 1)
    log_lam = math.log2(lam1)
    if rate > 0.5 * log_lam:
        theta = 2.0 ** ((log_lam - 2.0 * rate) / L)
    else:
        theta = 2.0 ** (log_lam - 2.0 * rate)
    comp = tuple(0.5 * log2_plus(lam / theta) for lam in eig)
    return WaterfillingSolution(theta, comp, eig)


def householder_basis(a: Sequence[float]) -> np.ndarray:
    """Orthonormal matrix whose first column is a/|a|.

    Uses the reflection that maps e1 to u1, so the completion is deterministic.
    """
    a = np.asarray(a, dtype=float)
    u = a / np.linalg.norm(a)
    v = u.copy()
    v[0] -= 1.0
    nv = float(v @ v)
    if nv < 1e-30:
        return np.eye(len(a))
    return np.eye(len(a)) - 2.0 * np.outer(v, v) / nv
