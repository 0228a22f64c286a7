"""Scenario registry, exact/reference solutions and convergence tables."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cweno import (BoundaryStencil, ParamSet, get_param_set, reconstruct_boundary)
from .fv import BoundaryClosure, EdgeGrid, EdgeState, TimeStepper
from .models import EulerModel, ShallowWaterModel, TrafficModel
from .network import Network, NodeSpec, simulate

__all__ = [
    "ConvergenceTable",
    "ScenarioSpec",
    "ScenarioResult",
    "SCENARIOS",
    "exact_cell_averages",
    "eoc_column",
    "linf_error",
    "restrict_reference",
    "reconstruction_stencil",
    "reconstruction_study",
    "run_scenario",
    "convergence_study",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(5)


def _gauss(f, a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    x = mid[..., None] + half[..., None] * _GL_X
    vals = np.asarray(f(x), dtype=float)
    if vals.ndim == x.ndim:
        return 0.5 * (vals * _GL_W).sum(axis=-1)
    return 0.5 * np.einsum("...km,k->...m", vals, _GL_W)


def exact_cell_averages(f, grid: EdgeGrid, breaks=()):
    """Cell averages of ``f`` by 5-point Gauss-Legendre quadrature per cell.

    ``f`` maps an array of points to values of the same shape, or to
    ``shape + (m,)`` for systems. Cells containing a point of ``breaks`` are
    split there so piecewise smooth data are integrated exactly per piece.
    """
    xi = grid.interfaces
    avg = _gauss(f, xi[:-1], xi[1:])
    for xb in breaks:
        hit = np.nonzero((xi[:-1] < xb) & (xb < xi[1:]))[0]
        for j in hit:
            a, b = xi[j], xi[j + 1]
            pts = [a] + sorted(p for p in breaks if a < p < b) + [b]
            avg[j] = sum(_gauss(f, np.array(lo), np.array(hi)) * (hi - lo)
                         for lo, hi in zip(pts[:-1], pts[1:])) / (b - a)
    return avg


def eoc_column(errors):
    """``log2(e[n-1] / e[n])``; ``None`` where undefined."""
    out = [None]
    for prev, cur in zip(errors[:-1], errors[1:]):
        if prev > 0 and cur > 0:
            out.append(math.log2(prev / cur))
        else:
            out.append(None)
    return out


@dataclass
class ConvergenceTable:
    n: list
    h: list
    errors: list
    scenario: str = ""
    params: str = ""

    def __post_init__(self):
        if not len(self.n) == len(self.h) == len(self.errors):
            raise ValueError("n, h and errors must have equal length")

    @property
    def eoc(self):
        return eoc_column(self.errors)

    @property
    def rows(self):
        return list(zip(self.n, self.h, self.errors, self.eoc))

    def __str__(self):
        head = f"{self.scenario} [{self.params}]\n{'n':>3} {'h':>11} {'error':>11}  eoc"
        lines = [head]
        for n, h, e, r in self.rows:
            lines.append(f"{n:>3} {h:11.4e} {e:11.3e}  {'-' if r is None else f'{r:.2f}'}")
        return "\n".join(lines)


def linf_error(states, reference):
    """Max over edges, cells and components of ``|u - u_ref|``."""
    if isinstance(states, dict):
        if set(states) != set(reference):
            raise ValueError("edge sets differ")
        pairs = [(states[k], reference[k]) for k in states]
    else:
        pairs = list(zip(states, reference))
    err = 0.0
    for u, r in pairs:
        u, r = np.asarray(u), np.asarray(r)
        if u.shape != r.shape:
            raise ValueError(f"grid mismatch: {u.shape} vs {r.shape}")
        err = max(err, float(np.max(np.abs(u - r))))
    return err


def restrict_reference(fine, factor: int):
    """Average groups of ``factor`` fine cells into one coarse cell."""
    fine = np.asarray(fine, dtype=float)
    if factor < 1 or factor & (factor - 1):
        raise ValueError(f"factor must be a power of two, got {factor}")
    N = fine.shape[0]
    if N % factor:
        raise ValueError(f"{N} fine cells not divisible by {factor}")
    return fine.reshape(N // factor, factor, *fine.shape[1:]).mean(axis=1)


# reconstruction studies at a single boundary ------------------------------

_X_STAR = 0.1
_JUMP = 0.5


def _u_smooth(x):
    return np.sin(2.0 * np.pi * x)


def _u_disc(x):
    return np.sin(2.0 * np.pi * x) + np.where(x > _X_STAR, _JUMP, 0.0)


def reconstruction_stencil(case: str, h: float):
    """Boundary stencil, evaluation point and target value for a study case.

    ``smooth``: ``sin(2 pi x)`` with the boundary at 0, evaluated at 0.
    ``disc_I25`` / ``disc_I15``: ``sin(2 pi x) + H(x)`` with a jump of 0.5 at
    ``x* = 0.1`` placed in the third / second cell, evaluated at ``x*``
    against ``u(x*) = sin(2 pi x*)`` (the jump is active only for x > x*).
    """
    if case == "smooth":
        x0, f, breaks, xe = 0.0, _u_smooth, (), 0.0
    elif case in ("disc_I25", "disc_I15"):
        shift = 2.5 if case == "disc_I25" else 1.5
        x0, f, breaks, xe = _X_STAR - shift * h, _u_disc, (_X_STAR,), _X_STAR
    else:
        raise ValueError(f"unknown reconstruction case {case!r}")
    ubar = exact_cell_averages(f, EdgeGrid(x0, 3 * h, 3), breaks)
    st = BoundaryStencil(ubar[0], ubar[1], ubar[2], h, "left", x0)
    return st, xe, float(f(np.array(xe)))


def reconstruction_study(case: str, params: ParamSet, n_range=range(1, 15)):
    n_values = list(n_range)
    hs, errs = [], []
    for n in n_values:
        h = 0.25 * 2.0 ** -n
        st, xe, target = reconstruction_stencil(case, h)
        errs.append(abs(float(reconstruct_boundary(st, params)(xe)) - target))
        hs.append(h)
    return ConvergenceTable(n_values, hs, errs, f"recon-{case}", params.name)


# full-scheme scenarios ----------------------------------------------------

@dataclass
class ScenarioSpec:
    name: str
    build: Callable  # (params, n) -> Network
    t_final: float
    stepper: TimeStepper
    h_of_n: Callable
    exact: Callable | None = None  # (network at t=0) -> {edge: averages at t_final}
    reference_n: int | None = None
    snapshot_times: tuple = ()
    default_n: int = 3
    description: str = ""


@dataclass
class ScenarioResult:
    spec: ScenarioSpec
    n: int
    network: Network
    states: dict
    snapshots: dict = field(default_factory=dict)
    error: float | None = None


def _edge(name, model, params, x_left, length, N, f, breaks=(), left_bc=None,
          right_bc=None):
    grid = EdgeGrid(x_left, length, N)
    return EdgeState(grid, exact_cell_averages(f, grid, breaks), model, params,
                     left_bc, right_bc, name=name)


def _cells(length, h):
    N = round(length / h)
    if abs(N * h - length) > 1e-9 * length:
        raise ValueError(f"edge length {length} is not a multiple of h = {h}")
    return N


# traffic

_ROAD = 0.2


def _wave(base, amp, shift=0.0, L=_ROAD, k=1.0):
    def f(x):
        xi = k * np.pi * (x + shift) / L
        return base + amp * np.sin(xi - np.sin(xi) / np.pi)
    return f


def _traffic_loop(params, n, P, main, upper, lower, breaks=()):
    h = 0.02 * 2.0 ** -n
    N = _cells(_ROAD, h)
    m = TrafficModel()
    edges = [
        _edge("main", m, params, 0.0, _ROAD, N, main, breaks),
        _edge("upper", m, params, 0.0, _ROAD, N, upper, breaks),
        _edge("lower", m, params, 0.0, _ROAD, N, lower, breaks),
    ]
    nodes = [
        NodeSpec("D", "disperse", incoming=["main"], outgoing=["upper", "lower"], alpha=0.7),
        NodeSpec("M", "merge", incoming=["upper", "lower"], outgoing=["main"], P=P),
    ]
    return Network(edges, nodes)


def _traffic_smooth(params, n):
    return _traffic_loop(params, n, 0.5, _wave(0.20, 0.150), _wave(0.14, 0.105, _ROAD),
                         _wave(0.06, 0.045, _ROAD))


def _step(left, right, at=0.05):
    return lambda x: np.where(x <= at, left, right)


def _traffic_jam(params, n):
    return _traffic_loop(params, n, 0.2, lambda x: np.full_like(x, 0.5),
                         _step(0.35, 0.90), _step(0.15, 0.85), breaks=(0.05,))


_TDBC_LENGTH = 0.4


def _tdbc_inflow(t):
    xi = -2.0 * np.pi * t / _TDBC_LENGTH
    return np.array([0.20 + 0.150 * np.sin(xi - np.sin(xi) / np.pi)])


def _traffic_tdbc(params, n):
    h = 0.02 * 2.0 ** -n
    m = TrafficModel()
    road = _edge("road", m, params, 0.0, _TDBC_LENGTH, _cells(_TDBC_LENGTH, h),
                 _wave(0.20, 0.150, L=_TDBC_LENGTH, k=2.0),
                 left_bc=BoundaryClosure("dirichlet", "left", data=_tdbc_inflow),
                 right_bc=BoundaryClosure("outflow", "right"))
    return Network([road])


def _initial_is_exact(net):
    return {k: es.ubar.copy() for k, es in net.edges.items()}


# shallow water

CHANNELS = (  # (name, from, to, length)
    ("AB", "A", "B", 0.10),
    ("BC", "B", "C", 0.05),
    ("BD", "B", "D", 0.05),
    ("BE", "B", "E", 0.15),
    ("CD", "C", "D", 0.05),
    ("DE", "D", "E", 0.05),
    ("EA", "E", "A", 0.05),
)


def _sw_state(hfun):
    return lambda x: np.stack([hfun(x), np.zeros_like(x)], axis=-1)


def _channel_network(params, n):
    h = 0.01 * 2.0 ** -n
    m = ShallowWaterModel(g=1.0)
    bump = _sw_state(lambda x: 0.3 + 0.03 * np.sin(np.pi * x / 0.1) ** 4)
    flat = _sw_state(lambda x: np.full_like(x, 0.3))
    edges = [_edge(name, m, params, 0.0, L, _cells(L, h), bump if name == "AB" else flat)
             for name, _, _, L in CHANNELS]
    nodes = []
    for node in "ABCDE":
        nodes.append(NodeSpec(node, "channel",
                              incoming=[c[0] for c in CHANNELS if c[2] == node],
                              outgoing=[c[0] for c in CHANNELS if c[1] == node], g=1.0))
    return Network(edges, nodes)


def _dam_break(low):
    def build(params, n):
        h = 0.01 * 2.0 ** -n
        f = _sw_state(lambda x: np.where((x >= 0.4) & (x <= 0.6), 1.0, low))
        e = _edge("channel", ShallowWaterModel(g=1.0), params, 0.0, 1.0, _cells(1.0, h), f,
                  breaks=(0.4, 0.6), left_bc=BoundaryClosure("wall", "left"),
                  right_bc=BoundaryClosure("wall", "right"))
        return Network([e])
    return build


# Euler

_EULER = EulerModel(1.4)
_DELTA = 0.2


def _shock_acoustic_data(x):
    left = x < -4.0
    rho = np.where(left, 3.857143, 1.0 + _DELTA * np.sin(5.0 * x))
    v = np.where(left, 2.629369, 0.0)
    p = np.where(left, 10.33333, 1.0)
    return _EULER.conserved(rho, v, p)


def _shock_acoustic(split):
    def build(params, n):
        h = 0.1 * 2.0 ** -n
        out = lambda side: BoundaryClosure("outflow", side)
        if not split:
            e = _edge("domain", _EULER, params, -5.0, 10.0, _cells(10.0, h),
                      _shock_acoustic_data, (-4.0,), out("left"), out("right"))
            return Network([e])
        a = _edge("left", _EULER, params, -5.0, 5.0, _cells(5.0, h), _shock_acoustic_data,
                  (-4.0,), left_bc=out("left"))
        b = _edge("right", _EULER, params, 0.0, 5.0, _cells(5.0, h), _shock_acoustic_data,
                  right_bc=out("right"))
        return Network([a, b], [NodeSpec("x0", "interface", incoming=["left"],
                                         outgoing=["right"])])
    return build


SCENARIOS = {
    s.name: s for s in [
        ScenarioSpec("traffic_smooth", _traffic_smooth, 0.4, TimeStepper("fixed", 0.5),
                     lambda n: 0.02 * 2.0 ** -n, exact=_initial_is_exact, default_n=3,
                     description="traffic loop with merge/disperse, smooth periodic data"),
        ScenarioSpec("traffic_jam", _traffic_jam, 0.15, TimeStepper("fixed", 0.5),
                     lambda n: 0.02 * 2.0 ** -n, snapshot_times=(0.05, 0.15), default_n=3,
                     description="jam on the upper road propagating back through D"),
        ScenarioSpec("traffic_tdbc", _traffic_tdbc, 0.4, TimeStepper("fixed", 0.5),
                     lambda n: 0.02 * 2.0 ** -n, exact=_initial_is_exact, default_n=3,
                     description="single road with time-dependent inflow"),
        ScenarioSpec("channel_network", _channel_network, 0.2, TimeStepper("fixed", 0.5),
                     lambda n: 0.01 * 2.0 ** -n, reference_n=9, default_n=3,
                     description="network of open channels, shallow water"),
        ScenarioSpec("dam_break_a", _dam_break(0.5), 0.6, TimeStepper("cfl", 0.45),
                     lambda n: 0.01 * 2.0 ** -n, snapshot_times=(0.35, 0.6), default_n=2,
                     description="dam break against walls, subcritical"),
        ScenarioSpec("dam_break_b", _dam_break(0.05), 0.6, TimeStepper("cfl", 0.45),
                     lambda n: 0.01 * 2.0 ** -n, snapshot_times=(0.35, 0.6), default_n=2,
                     description="dam break against walls, transcritical"),
        ScenarioSpec("shock_acoustic", _shock_acoustic(False), 1.8,
                     TimeStepper("fixed", 0.225), lambda n: 0.1 * 2.0 ** -n, default_n=3,
                     description="Euler shock/acoustic interaction on one domain"),
        ScenarioSpec("shock_acoustic_split", _shock_acoustic(True), 1.8,
                     TimeStepper("fixed", 0.225), lambda n: 0.1 * 2.0 ** -n, default_n=3,
                     description="same, split at x = 0 into two coupled domains"),
    ]
}


def _spec(spec):
    if isinstance(spec, ScenarioSpec):
        return spec
    key = spec.replace("-", "_")
    try:
        return SCENARIOS[key]
    except KeyError:
        raise KeyError(f"unknown scenario {spec!r}; known: {', '.join(SCENARIOS)}") from None


def _params(params):
    return get_param_set(params) if isinstance(params, str) else params


def run_scenario(spec, params, n=None, t_final=None, snapshot_times=None):
    """Run one scenario at refinement level ``n``.

    The error is filled in when the scenario has an exact solution and the
    run reaches the scenario's own final time.
    """
    spec, params = _spec(spec), _params(params)
    n = spec.default_n if n is None else n
    net = spec.build(params, n)
    exact = spec.exact(net) if spec.exact is not None else None
    t_end = spec.t_final if t_final is None else t_final
    times = spec.snapshot_times if snapshot_times is None else snapshot_times
    states, snaps = simulate(net, t_end, spec.stepper, snapshot_times=times)
    names = net.names
    result = ScenarioResult(spec, n, net, dict(zip(names, states)),
                            {t: dict(zip(names, s)) for t, s in snaps.items()})
    if exact is not None and t_end == spec.t_final:
        result.error = linf_error(result.states, exact)
    return result


def convergence_study(spec, params, n_values, reference_n=None):
    """L-infinity error table against the exact solution or a fine reference.

    Scenarios without an exact solution are compared with the run at
    ``reference_n`` (default: the scenario's own), restricted to each grid.
    """
    spec, params = _spec(spec), _params(params)
    n_values = list(n_values)
    ref = None
    if spec.exact is None:
        reference_n = spec.reference_n if reference_n is None else reference_n
        if reference_n is None:
            raise ValueError(f"scenario {spec.name} has neither exact nor reference solution")
        if reference_n <= max(n_values):
            raise ValueError("reference level must be finer than every study level")
        ref = run_scenario(spec, params, reference_n).states
    errors = []
    for n in n_values:
        res = run_scenario(spec, params, n)
        if ref is None:
            errors.append(res.error)
        else:
            f = 2 ** (reference_n - n)
            errors.append(linf_error(res.states,
                                     {k: restrict_reference(v, f) for k, v in ref.items()}))
    return ConvergenceTable(n_values, [spec.h_of_n(n) for n in n_values], errors,
                            spec.name, params.name)
