"""Physical models (LWR traffic, shallow water, 1D Euler) and numerical fluxes.

States are numpy arrays whose last axis holds the conserved components:
``(rho,)`` for traffic, ``(h, q)`` for shallow water and ``(rho, m, E)``
for Euler. The ``flux``/``max_speed`` methods are the unchecked vectorized
kernels used by the scheme; the module-level functions validate their input.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np

__all__ = [
    "InvalidStateError",
    "TrafficModel",
    "ShallowWaterModel",
    "EulerModel",
    "traffic_flux",
    "traffic_demand",
    "traffic_supply",
    "sw_flux",
    "sw_max_speed",
    "euler_pressure",
    "euler_flux",
    "euler_max_speed",
    "llf_flux",
    "godunov_traffic_flux",
    "default_numerical_flux",
]


class InvalidStateError(ValueError):
    """A state outside the admissible set of its model."""


@dataclass(frozen=True)
class TrafficModel:
    """LWR model with the triangular flux ``min(rho v, (rho_max - rho) v)``."""

    v: float = 1.0
    rho_max: float = 1.0

    components = ("rho",)

    def __post_init__(self):
        if self.v <= 0 or self.rho_max <= 0:
            raise ValueError("v and rho_max must be positive")

    @property
    def f_max(self):
        return 0.5 * self.v * self.rho_max

    def flux(self, u):
        rho = u[..., 0]
        return np.minimum(rho, self.rho_max - rho)[..., None] * self.v

    def demand(self, rho):
        return np.minimum(rho * self.v, self.f_max)

    def supply(self, rho):
        return np.minimum((self.rho_max - rho) * self.v, self.f_max)

    def max_speed(self, u):
        return np.full(u.shape[:-1], self.v)

    def check(self, u):
        rho = u[..., 0]
        tol = 1e-12 * self.rho_max
        if not np.all(np.isfinite(rho)):
            raise InvalidStateError("traffic density is not finite")
        if np.any(rho < -tol) or np.any(rho > self.rho_max + tol):
            raise InvalidStateError(
                f"traffic density outside [0, {self.rho_max}]: "
                f"min {rho.min():.6g}, max {rho.max():.6g}")


@dataclass(frozen=True)
class ShallowWaterModel:
    g: float = 1.0

    components = ("h", "q")

    def __post_init__(self):
        if self.g <= 0:
            raise ValueError("g must be positive")

    def flux(self, u):
        h, q = u[..., 0], u[..., 1]
        return np.stack([q, q * q / h + 0.5 * self.g * h * h], axis=-1)

    def max_speed(self, u):
        h, q = u[..., 0], u[..., 1]
        return np.abs(q / h) + np.sqrt(self.g * h)

    def check(self, u):
        h = u[..., 0]
        if not np.all(np.isfinite(u)):
            raise InvalidStateError("shallow water state is not finite")
        if np.any(h <= 0):
            raise InvalidStateError(f"dry state: min water height {h.min():.6g}")


@dataclass(frozen=True)
class EulerModel:
    gamma: float = 1.4

    components = ("rho", "m", "E")

    def __post_init__(self):
        if self.gamma <= 1:
            raise ValueError("gamma must exceed 1")

    def pressure(self, u):
        rho, m, E = u[..., 0], u[..., 1], u[..., 2]
        return (self.gamma - 1.0) * (E - 0.5 * m * m / rho)

    def flux(self, u):
        rho, m, E = u[..., 0], u[..., 1], u[..., 2]
        v = m / rho
        p = (self.gamma - 1.0) * (E - 0.5 * m * v)
        return np.stack([m, m * v + p, v * (E + p)], axis=-1)

    def max_speed(self, u):
        rho, m = u[..., 0], u[..., 1]
        p = self.pressure(u)
        return np.abs(m / rho) + np.sqrt(self.gamma * p / rho)

    def conserved(self, rho, v, p):
        """Conserved variables from ``(rho, v, p)``."""
        rho, v, p = np.broadcast_arrays(*map(np.asarray, (rho, v, p)))
        return np.stack([rho, rho * v, p / (self.gamma - 1.0) + 0.5 * rho * v * v],
                        axis=-1).astype(float)

    def primitive(self, u):
        rho = u[..., 0]
        return rho, u[..., 1] / rho, self.pressure(u)

    def check(self, u):
        if not np.all(np.isfinite(u)):
            raise InvalidStateError("Euler state is not finite")
        rho = u[..., 0]
        if np.any(rho <= 0):
            raise InvalidStateError(f"nonpositive density: min rho {rho.min():.6g}")
        p = self.pressure(u)
        if np.any(p <= 0):
            raise InvalidStateError(f"nonpositive pressure: min p {p.min():.6g}")


def _check_rho(m: TrafficModel, rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0) or np.any(rho > m.rho_max) or not np.all(np.isfinite(rho)):
        raise InvalidStateError(f"density outside [0, {m.rho_max}]: {rho}")
    return rho


def traffic_flux(m: TrafficModel, rho):
    rho = _check_rho(m, rho)
    return np.minimum(rho, m.rho_max - rho) * m.v


def traffic_demand(m: TrafficModel, rho):
    return m.demand(_check_rho(m, rho))


def traffic_supply(m: TrafficModel, rho):
    return m.supply(_check_rho(m, rho))


def godunov_traffic_flux(m: TrafficModel, rho_minus, rho_plus):
    """Exact Riemann flux ``min(D(rho-), S(rho+))`` of the triangular flux."""
    return np.minimum(m.demand(_check_rho(m, rho_minus)),
                      m.supply(_check_rho(m, rho_plus)))


def _sw_state(h, q):
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise InvalidStateError(f"dry state: h = {h}")
    return np.stack(np.broadcast_arrays(h, np.asarray(q, dtype=float)), axis=-1)


def sw_flux(m: ShallowWaterModel, h, q):
    f = m.flux(_sw_state(h, q))
    return f[..., 0], f[..., 1]


def sw_max_speed(m: ShallowWaterModel, h, q):
    return m.max_speed(_sw_state(h, q))


def _euler_state(m: EulerModel, u):
    u = np.asarray(u, dtype=float)
    m.check(u)
    return u


def euler_pressure(m: EulerModel, rho, mom, E):
    u = np.stack(np.broadcast_arrays(*(np.asarray(a, dtype=float)
                                       for a in (rho, mom, E))), axis=-1)
    if np.any(u[..., 0] <= 0):
        raise InvalidStateError("nonpositive density (component rho)")
    p = m.pressure(u)
    if np.any(p <= 0):
        raise InvalidStateError("nonpositive pressure (component E)")
    return p


def euler_flux(m: EulerModel, u):
    return m.flux(_euler_state(m, u))


def euler_max_speed(m: EulerModel, u):
    return m.max_speed(_euler_state(m, u))


def llf_flux(model, u_minus, u_plus):
    """Local Lax-Friedrichs flux with the two-state maximal wave speed."""
    lam = np.maximum(model.max_speed(u_minus), model.max_speed(u_plus))[..., None]
    return 0.5 * (model.flux(u_minus) + model.flux(u_plus)) - 0.5 * lam * (u_plus - u_minus)


def _godunov_state_flux(model, u_minus, u_plus):
    return np.minimum(model.demand(u_minus[..., 0]), model.supply(u_plus[..., 0]))[..., None]


def default_numerical_flux(model):
    """``H(u_minus, u_plus)``: exact Riemann flux for traffic, LLF otherwise."""
    if isinstance(model, TrafficModel):
        return partial(_godunov_state_flux, model)
    return partial(llf_flux, model)
