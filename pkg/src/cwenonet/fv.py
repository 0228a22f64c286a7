"""Finite volume semi-discretization on one edge, boundary closures and TVD RK3.

The grid on an edge has ``N`` cells of width ``h = L / N``; interfaces are
numbered ``0..N`` from the left. Reconstructed traces are stored as two
``(N + 1, m)`` arrays: ``um[k]`` comes from the cell left of interface ``k``
and ``up[k]`` from the cell to its right. ``um[0]`` and ``up[N]`` do not
exist and are NaN.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cweno import BoundaryStencil, ParamSet, reconstruct_boundary, reconstruct_interior
from .models import default_numerical_flux

__all__ = [
    "EdgeGrid",
    "BoundaryClosure",
    "EdgeState",
    "TimeStepper",
    "StageAssemblyError",
    "StageError",
    "reconstruct_edge",
    "reconstruct_edges",
    "closure_flux",
    "interface_fluxes",
    "semidiscrete_rhs",
    "rk3_step",
    "compute_timestep",
]


class StageAssemblyError(RuntimeError):
    """A boundary needs an externally supplied flux that is missing."""


class StageError(RuntimeError):
    """The right-hand side failed inside a Runge-Kutta stage."""

    def __init__(self, stage, cause):
        super().__init__(f"RK3 stage {stage} failed: {cause}")
        self.stage = stage


@dataclass(frozen=True)
class EdgeGrid:
    x_left: float
    length: float
    N: int

    def __post_init__(self):
        if self.N < 3:
            raise ValueError(f"an edge needs at least 3 cells, got N = {self.N}")
        if not self.length > 0:
            raise ValueError("edge length must be positive")

    @property
    def h(self) -> float:
        return self.length / self.N

    @property
    def x_right(self) -> float:
        return self.x_left + self.length

    @property
    def interfaces(self) -> np.ndarray:
        return self.x_left + self.h * np.arange(self.N + 1)

    @property
    def centers(self) -> np.ndarray:
        return self.x_left + self.h * (np.arange(self.N) + 0.5)


_KINDS = ("wall", "dirichlet", "outflow", "junction", "interface")


@dataclass(frozen=True)
class BoundaryClosure:
    """How the outermost interface of an edge gets its flux.

    ``dirichlet`` carries ``data``: a function of time returning the exterior
    state. ``junction`` and ``interface`` carry the node name in ``node``;
    their flux comes from the network for every stage.
    """

    kind: str
    side: str = "left"
    data: Callable | None = None
    node: str | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown closure kind {self.kind!r}")
        if self.side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {self.side!r}")
        if self.kind == "dirichlet" and self.data is None:
            raise ValueError("dirichlet closure needs boundary data")

    @property
    def external(self) -> bool:
        return self.kind in ("junction", "interface")


@dataclass
class EdgeState:
    grid: EdgeGrid
    ubar: np.ndarray
    model: object
    params: ParamSet
    left_bc: BoundaryClosure | None = None
    right_bc: BoundaryClosure | None = None
    numerical_flux: Callable | None = None
    name: str = "edge"

    def __post_init__(self):
        self.ubar = np.asarray(self.ubar, dtype=float)
        if self.ubar.ndim == 1:
            self.ubar = self.ubar[:, None]
        if self.ubar.shape != (self.grid.N, len(self.model.components)):
            raise ValueError(f"cell averages have shape {self.ubar.shape}, expected "
                             f"({self.grid.N}, {len(self.model.components)})")
        if self.numerical_flux is None:
            self.numerical_flux = default_numerical_flux(self.model)
        self.model.check(self.ubar)

    @property
    def h(self) -> float:
        return self.grid.h


def reconstruct_edge(es: EdgeState, ubar=None):
    """Interface traces ``(um, up)`` of the CWENO reconstruction on one edge."""
    return reconstruct_edges([es], [es.ubar if ubar is None else ubar])[0]


def reconstruct_edges(edges, states):
    """Batched :func:`reconstruct_edge` over many edges.

    Edges sharing cell width and parameters are concatenated and handled by
    one vectorized pass; stencils straddling two edges are computed and
    discarded.
    """
    groups = {}
    for i, es in enumerate(edges):
        groups.setdefault((es.grid.h, es.params), []).append(i)
    out = [None] * len(edges)
    for (h, p), idx in groups.items():
        us = [states[i] for i in idx]
        U = np.concatenate(us) if len(us) > 1 else us[0]
        Ns = [u.shape[0] for u in us]
        offs = np.concatenate(([0], np.cumsum(Ns)[:-1]))
        poly = reconstruct_interior(U[:-2], U[1:-1], U[2:], h, p)
        at_left, at_right = poly(-0.5 * h), poly(0.5 * h)
        first, last = offs, offs + np.array(Ns) - 1
        # boundary interfaces at 0 in the local frame of each stencil
        left = reconstruct_boundary(
            BoundaryStencil(U[first], U[first + 1], U[first + 2], h, "left"), p)
        right = reconstruct_boundary(
            BoundaryStencil(U[last], U[last - 1], U[last - 2], h, "right"), p)
        lb0, lb1 = left(0.0), left(h)
        rb0, rb1 = right(-h), right(0.0)
        for k, (i, o, N) in enumerate(zip(idx, offs, Ns)):
            um = np.full((N + 1, U.shape[1]), np.nan)
            up = np.full((N + 1, U.shape[1]), np.nan)
            up[1:N - 1] = at_left[o:o + N - 2]
            um[2:N] = at_right[o:o + N - 2]
            up[0], um[1] = lb0[k], lb1[k]
            up[N - 1], um[N] = rb0[k], rb1[k]
            out[i] = (um, up)
    return out


def _reflect(trace):
    ext = trace.copy()
    ext[..., 1] = -ext[..., 1]
    return ext


def closure_flux(bc: BoundaryClosure, trace, t, model, numerical_flux=None,
                 external=None):
    """Flux at the outermost interface on side ``bc.side``.

    ``trace`` is the one-sided boundary reconstruction. For junction and
    interface closures the flux is ``external``, which must be supplied.
    """
    nf = numerical_flux or default_numerical_flux(model)
    trace = np.asarray(trace, dtype=float)
    left = bc.side == "left"
    if bc.external:
        if external is None:
            raise StageAssemblyError(
                f"no flux supplied for {bc.kind} closure at node {bc.node!r}")
        return np.asarray(external, dtype=float)
    if bc.kind == "wall":
        if trace.shape[-1] < 2:
            raise ValueError("wall closure needs a momentum component")
        ext = _reflect(trace)
    elif bc.kind == "dirichlet":
        ext = np.broadcast_to(np.asarray(bc.data(t), dtype=float), trace.shape)
    else:  # outflow: ghost state equal to the trace
        ext = trace
    return nf(ext, trace) if left else nf(trace, ext)


def interface_fluxes(es: EdgeState, um, up, t, left_flux=None, right_flux=None):
    """Numerical fluxes at all ``N + 1`` interfaces of an edge."""
    N = es.grid.N
    H = np.empty_like(um)
    H[1:N] = es.numerical_flux(um[1:N], up[1:N])
    H[0] = closure_flux(es.left_bc, up[0], t, es.model, es.numerical_flux, left_flux)
    H[N] = closure_flux(es.right_bc, um[N], t, es.model, es.numerical_flux, right_flux)
    return H


def semidiscrete_rhs(es: EdgeState, fluxes):
    """``d ubar_j / dt = -(H_{j+1/2} - H_{j-1/2}) / h``."""
    fluxes = np.asarray(fluxes, dtype=float)
    if fluxes.shape[0] != es.grid.N + 1:
        raise ValueError(f"expected {es.grid.N + 1} interface fluxes, got {fluxes.shape[0]}")
    return -(fluxes[1:] - fluxes[:-1]) / es.grid.h


def rk3_step(u, rhs, t, tau):
    """One step of the three stage TVD Runge-Kutta scheme.

    ``u`` is an array or a list of arrays (one per edge); ``rhs(u, t)``
    returns the same structure. Stage times are ``t``, ``t + tau`` and
    ``t + tau / 2``.
    """
    if not tau > 0:
        raise ValueError(f"time step must be positive, got {tau}")
    single = isinstance(u, np.ndarray)
    un = [u] if single else list(u)

    def L(v, s, stage):
        try:
            out = rhs(v[0] if single else v, s)
        except Exception as exc:
            raise StageError(stage, exc) from exc
        return [out] if single else list(out)

    k = L(un, t, 1)
    u1 = [a + tau * b for a, b in zip(un, k)]
    k = L(u1, t + tau, 2)
    u2 = [0.75 * a + 0.25 * (b + tau * c) for a, b, c in zip(un, u1, k)]
    k = L(u2, t + 0.5 * tau, 3)
    out = [a / 3.0 + 2.0 / 3.0 * (b + tau * c) for a, b, c in zip(un, u2, k)]
    return out[0] if single else out


@dataclass(frozen=True)
class TimeStepper:
    """``fixed``: ``tau = value * h``; ``cfl``: ``tau = value * h / lambda_max``."""

    mode: str = "fixed"
    value: float = 0.5

    def __post_init__(self):
        if self.mode not in ("fixed", "cfl"):
            raise ValueError(f"unknown time stepper mode {self.mode!r}")
        if not self.value > 0:
            raise ValueError("time step factor must be positive")


def compute_timestep(ts: TimeStepper, h: float, states=(), models=(), remaining=math.inf):
    """Step size for the next step, truncated to land on the final time."""
    if ts.mode == "fixed":
        tau = ts.value * h
    else:
        lam = max(float(np.max(m.max_speed(u))) for u, m in zip(states, models))
        if not lam > 0:
            raise ValueError("degenerate wave speed: lambda_max = 0 in CFL mode")
        tau = ts.value * h / lam
    if remaining <= tau * (1.0 + 1e-10):
        tau = remaining
    return tau
