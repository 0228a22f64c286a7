"""Networks of edges coupled at nodes.

Every edge is oriented: its left end sits at ``from`` node, its right end
at ``to`` node. An edge end not attached to a node carries its own
:class:`~cwenonet.fv.BoundaryClosure`. Node kinds:

``disperse``   traffic, one incoming and two outgoing roads, split ``alpha``
``merge``      traffic, two incoming and one outgoing road, priority ``P``
``channel``    shallow water junction of any degree >= 2
``interface``  artificial split of one domain, LLF of the two traces
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fv import (BoundaryClosure, TimeStepper, compute_timestep, interface_fluxes,
                 reconstruct_edges, rk3_step, semidiscrete_rhs)
from .models import llf_flux

__all__ = [
    "NodeSpec",
    "Network",
    "NodeSolveError",
    "disperse_flux",
    "merge_flux",
    "channel_node_solve",
    "assemble_stage_fluxes",
    "simulate",
]


class NodeSolveError(RuntimeError):
    pass


def disperse_flux(D_in, S_out, alpha):
    """Flux through a 1-to-2 junction with fixed distribution ``alpha``.

    Maximizes the throughput ``G`` subject to ``G <= D_in``,
    ``alpha G <= S_out[0]`` and ``(1 - alpha) G <= S_out[1]``.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    s1, s2 = S_out
    g = min(D_in, s1 / alpha, s2 / (1.0 - alpha))
    return g, alpha * g, g - alpha * g


def merge_flux(D, S_out, P):
    """Flux through a 2-to-1 junction; road 1 has priority ``P``.

    Without congestion both demands pass. Otherwise the supply is shared and
    the median rule hands capacity a demand-limited road cannot use to the
    other road.
    """
    if not 0 < P < 1:
        raise ValueError(f"priority must lie in (0, 1), got {P}")
    d1, d2 = D
    if d1 + d2 <= S_out:
        return d1, d2, d1 + d2
    g1 = sorted((P * S_out, S_out - d2, d1))[1]
    g2 = S_out - g1
    return g1, g2, g1 + g2


def channel_node_solve(traces, signs, g=1.0):
    """Common junction state for the shallow water equations.

    Parameters
    ----------
    traces : array (m, 2)
        One-sided ``(h, q)`` boundary reconstructions at the node.
    signs : array (m,)
        +1 where the edge ends at the node, -1 where it starts there.

    Returns
    -------
    h_star : float
    q_star : array (m,)

    The ``m + 1`` unknowns satisfy mass conservation ``sum(sign q*) = 0``
    and, per port, conservation of the Riemann invariant
    ``w = v + sign 2 sqrt(g h)`` carried to the node from the edge interior.
    Substituting ``q*_e = h* (w_e - sign_e 2 sqrt(g h*))`` into the mass
    balance leaves ``sqrt(g h*) = sum(sign w) / (2 m)``, solved exactly.
    """
    traces = np.asarray(traces, dtype=float)
    s = np.asarray(signs, dtype=float)
    m = len(s)
    if m < 2:
        raise ValueError("a channel node needs at least two ports")
    if not np.all(np.abs(s) == 1.0):
        raise ValueError(f"port signs must be +1 or -1, got {s}")
    h, q = traces[:, 0], traces[:, 1]
    if np.any(h <= 0):
        raise NodeSolveError(f"dry trace at channel node: {h}")
    c = np.sqrt(g * h)
    v = q / h
    if np.any(np.abs(v) >= c):
        raise NodeSolveError("supercritical trace at channel node "
                             f"(Froude {np.max(np.abs(v) / c):.3g})")
    w = v + 2.0 * s * c
    c_star = float(s @ w) / (2.0 * m)
    # each term s v + 2 c exceeds c > 0 for subcritical traces
    h_star = c_star * c_star / g
    return h_star, h_star * (w - 2.0 * s * c_star)


@dataclass
class NodeSpec:
    name: str
    kind: str
    incoming: list = field(default_factory=list)
    outgoing: list = field(default_factory=list)
    alpha: float | None = None
    P: float | None = None
    g: float = 1.0

    def __post_init__(self):
        nin, nout = len(self.incoming), len(self.outgoing)
        if self.kind == "disperse":
            if (nin, nout) != (1, 2):
                raise ValueError(f"disperse node {self.name} needs 1 in / 2 out")
            if self.alpha is None or not 0 < self.alpha < 1:
                raise ValueError(f"disperse node {self.name} needs 0 < alpha < 1")
        elif self.kind == "merge":
            if (nin, nout) != (2, 1):
                raise ValueError(f"merge node {self.name} needs 2 in / 1 out")
            if self.P is None or not 0 < self.P < 1:
                raise ValueError(f"merge node {self.name} needs 0 < P < 1")
        elif self.kind == "channel":
            if nin + nout < 2:
                raise ValueError(f"channel node {self.name} needs degree >= 2")
        elif self.kind == "interface":
            if (nin, nout) != (1, 1):
                raise ValueError(f"interface node {self.name} needs 1 in / 1 out")
        else:
            raise ValueError(f"unknown node kind {self.kind!r}")


class Network:
    """Edges plus nodes; attaches junction closures to node-bound edge ends."""

    def __init__(self, edges, nodes=()):
        self.edges = {e.name: e for e in edges}
        if len(self.edges) != len(edges):
            raise ValueError("edge names must be unique")
        self.nodes = {n.name: n for n in nodes}
        bound = {}
        for node in self.nodes.values():
            kind = "interface" if node.kind == "interface" else "junction"
            for name, side in ([(e, "right") for e in node.incoming]
                               + [(e, "left") for e in node.outgoing]):
                if name not in self.edges:
                    raise ValueError(f"node {node.name} references unknown edge {name!r}")
                if (name, side) in bound:
                    raise ValueError(f"{side} end of edge {name} bound twice")
                bound[(name, side)] = node.name
                es = self.edges[name]
                bc = BoundaryClosure(kind, side, node=node.name)
                if side == "left":
                    es.left_bc = bc
                else:
                    es.right_bc = bc
        for es in self.edges.values():
            for side in ("left", "right"):
                bc = es.left_bc if side == "left" else es.right_bc
                if bc is None:
                    raise ValueError(f"{side} end of edge {es.name} is unbound")
                if bc.external and (es.name, side) not in bound:
                    raise ValueError(f"{side} end of edge {es.name} names node "
                                     f"{bc.node!r} which does not list it")
                if bc.side != side:
                    raise ValueError(f"closure on {side} end of {es.name} says {bc.side}")

    @property
    def names(self):
        return list(self.edges)

    def states(self):
        return [es.ubar for es in self.edges.values()]

    def set_states(self, states):
        for es, u in zip(self.edges.values(), states):
            es.ubar = u

    def h(self):
        return min(es.grid.h for es in self.edges.values())

    def rhs(self, states, t):
        """Time derivatives of all edges' cell averages at stage time ``t``."""
        edges = list(self.edges.values())
        for es, u in zip(edges, states):
            es.model.check(u)
        traces = dict(zip(self.edges, reconstruct_edges(edges, states)))
        table = assemble_stage_fluxes(self, traces, t)
        out = []
        for es in self.edges.values():
            um, up = traces[es.name]
            H = interface_fluxes(es, um, up, t, table.get((es.name, "left")),
                                 table.get((es.name, "right")))
            out.append(semidiscrete_rhs(es, H))
        return out


def assemble_stage_fluxes(net: Network, traces, t):
    """Boundary fluxes ``{(edge, side): flux}`` for all node-bound edge ends.

    ``traces`` maps edge names to ``(um, up)`` from :func:`reconstruct_edge`.
    The incoming trace of a node is ``um[N]`` of an edge ending there, the
    outgoing one ``up[0]`` of an edge starting there.
    """
    table = {}
    for node in net.nodes.values():
        tin = [traces[e][0][-1] for e in node.incoming]
        tout = [traces[e][1][0] for e in node.outgoing]
        if node.kind == "interface":
            ein = net.edges[node.incoming[0]]
            f = llf_flux(ein.model, tin[0], tout[0])
            table[(node.incoming[0], "right")] = f
            table[(node.outgoing[0], "left")] = f
        elif node.kind in ("disperse", "merge"):
            models = [net.edges[e].model for e in node.incoming + node.outgoing]
            D = [m.demand(u[0]) for m, u in zip(models, tin)]
            S = [m.supply(u[0]) for m, u in zip(models[len(tin):], tout)]
            if node.kind == "disperse":
                g_in, g1, g2 = disperse_flux(D[0], S, node.alpha)
                table[(node.incoming[0], "right")] = np.array([g_in])
                table[(node.outgoing[0], "left")] = np.array([g1])
                table[(node.outgoing[1], "left")] = np.array([g2])
            else:
                g1, g2, g_out = merge_flux(D, S[0], node.P)
                table[(node.incoming[0], "right")] = np.array([g1])
                table[(node.incoming[1], "right")] = np.array([g2])
                table[(node.outgoing[0], "left")] = np.array([g_out])
        else:
            ports = ([(e, "right", 1.0) for e in node.incoming]
                     + [(e, "left", -1.0) for e in node.outgoing])
            hs, qs = channel_node_solve(np.array(tin + tout), [p[2] for p in ports],
                                        node.g)
            for (e, side, _), qe in zip(ports, qs):
                table[(e, side)] = np.array([qe, qe * qe / hs + 0.5 * node.g * hs * hs])
    return table


def simulate(net: Network, t_final, stepper: TimeStepper, t0=0.0, snapshot_times=(),
             callback=None):
    """Advance the network to ``t_final``; returns ``(states, snapshots)``.

    ``snapshots`` maps each requested time to a copy of the states there;
    steps are truncated so each snapshot time is hit exactly.
    """
    stops = sorted({float(s) for s in snapshot_times if t0 < s < t_final} | {t_final})
    models = [es.model for es in net.edges.values()]
    h = net.h()
    u = [x.copy() for x in net.states()]
    t = t0
    snaps = {}
    for stop in stops:
        while stop - t > 1e-12 * max(1.0, abs(stop)):
            tau = compute_timestep(stepper, h, u, models, stop - t)
            u = rk3_step(u, net.rhs, t, tau)
            t = stop if tau == stop - t else t + tau
            if callback is not None:
                callback(t, u)
        t = stop
        snaps[stop] = [x.copy() for x in u]
    for es, m, x in zip(net.edges.values(), models, u):
        m.check(x)
    net.set_states(u)
    return u, snaps
