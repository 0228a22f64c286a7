import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cwenonet.cweno import PARAM_SETS
from cwenonet.fv import BoundaryClosure, EdgeGrid, EdgeState, TimeStepper, reconstruct_edges
from cwenonet.models import ShallowWaterModel, TrafficModel, llf_flux
from cwenonet.network import (Network, NodeSolveError, NodeSpec, assemble_stage_fluxes,
                              channel_node_solve, disperse_flux, merge_flux, simulate)

S1 = PARAM_SETS["sigma1"]
SW = ShallowWaterModel(1.0)
flux = st.floats(0.0, 0.5)


def test_disperse_values():
    assert disperse_flux(0.4, (0.5, 0.5), 0.7) == pytest.approx((0.4, 0.28, 0.12))
    # first outgoing road limits: 0.7 G <= 0.14
    assert disperse_flux(0.4, (0.14, 0.5), 0.7) == pytest.approx((0.2, 0.14, 0.06))
    with pytest.raises(ValueError):
        disperse_flux(0.4, (0.5, 0.5), 1.0)


@given(flux, flux, flux, st.floats(0.01, 0.99))
def test_disperse_feasible_and_maximal(D, s1, s2, a):
    g, g1, g2 = disperse_flux(D, (s1, s2), a)
    assert g1 + g2 == pytest.approx(g, abs=1e-15)
    assert g <= D and g1 <= s1 + 1e-15 and g2 <= s2 + 1e-15
    # maximal: one of the three constraints is active
    assert min(D - g, s1 - g1, s2 - g2) <= 1e-15


def test_merge_values():
    assert merge_flux((0.1, 0.2), 0.5, 0.5) == pytest.approx((0.1, 0.2, 0.3))
    assert merge_flux((0.5, 0.5), 0.5, 0.2) == pytest.approx((0.1, 0.4, 0.5))
    # road 2 demand-limited: road 1 gets the unused capacity
    assert merge_flux((0.5, 0.1), 0.5, 0.2) == pytest.approx((0.4, 0.1, 0.5))
    with pytest.raises(ValueError):
        merge_flux((0.1, 0.1), 0.5, 0.0)


@given(flux, flux, flux, st.floats(0.01, 0.99))
def test_merge_feasible_and_maximal(d1, d2, S, P):
    g1, g2, g = merge_flux((d1, d2), S, P)
    assert g1 <= d1 + 1e-15 and g2 <= d2 + 1e-15
    assert g == pytest.approx(g1 + g2, abs=1e-15)
    assert g <= S + 1e-15
    assert g == pytest.approx(min(S, d1 + d2), abs=1e-15)
    assert g1 >= -1e-15 and g2 >= -1e-15


def node_oracle(traces, signs, g=1.0):
    """h* by bisection on the mass residual after eliminating the discharges."""
    h, q = traces[:, 0], traces[:, 1]
    w = q / h + 2 * signs * np.sqrt(g * h)

    def mass(hs):
        qs = hs * (w - 2 * signs * np.sqrt(g * hs))
        return signs @ qs

    grid = np.linspace(1e-6, 4 * h.max(), 4001)
    vals = np.array([mass(x) for x in grid])
    k = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0][-1]
    a, b = grid[k], grid[k + 1]
    for _ in range(200):
        m = 0.5 * (a + b)
        if np.sign(mass(m)) == np.sign(mass(a)):
            a = m
        else:
            b = m
    hs = 0.5 * (a + b)
    return hs, hs * (w - 2 * signs * np.sqrt(g * hs))


subcritical = st.tuples(st.floats(0.2, 2.0), st.floats(-0.9, 0.9)).map(
    lambda t: (t[0], t[1] * t[0] * np.sqrt(t[0])))


@given(st.lists(subcritical, min_size=2, max_size=5), st.data())
def test_channel_node_matches_oracle(ports, data):
    signs = np.array(data.draw(st.lists(st.sampled_from([1.0, -1.0]),
                                        min_size=len(ports), max_size=len(ports))))
    traces = np.array(ports)
    hs, qs = channel_node_solve(traces, signs)
    ho, qo = node_oracle(traces, signs)
    assert hs == pytest.approx(ho, rel=1e-10)
    assert qs == pytest.approx(qo, rel=1e-8, abs=1e-10)
    # mass balance and invariants
    assert abs(signs @ qs) <= 1e-14 * max(1.0, np.abs(qs).max())
    w = traces[:, 1] / traces[:, 0] + 2 * signs * np.sqrt(traces[:, 0])
    assert np.allclose(qs / hs + 2 * signs * np.sqrt(hs), w, rtol=1e-13, atol=1e-14)


def test_channel_node_rest_state():
    hs, qs = channel_node_solve(np.array([[0.3, 0.0]] * 3), [1, -1, -1])
    assert hs == pytest.approx(0.3, rel=1e-15)
    assert np.allclose(qs, 0.0, atol=1e-16)


def test_channel_node_errors():
    with pytest.raises(NodeSolveError):
        channel_node_solve(np.array([[1.0, 2.0], [1.0, 0.0]]), [1, -1])
    with pytest.raises(NodeSolveError):
        channel_node_solve(np.array([[0.0, 0.0], [1.0, 0.0]]), [1, -1])
    with pytest.raises(ValueError):
        channel_node_solve(np.array([[1.0, 0.0]]), [1])
    with pytest.raises(ValueError):
        channel_node_solve(np.array([[1.0, 0.0], [1.0, 0.0]]), [1, 0])


@pytest.mark.parametrize("kw", [
    dict(kind="disperse", incoming=["a"], outgoing=["b"], alpha=0.5),
    dict(kind="disperse", incoming=["a"], outgoing=["b", "c"]),
    dict(kind="merge", incoming=["a", "b"], outgoing=["c"], P=1.5),
    dict(kind="channel", incoming=["a"]),
    dict(kind="interface", incoming=["a", "b"], outgoing=["c"]),
    dict(kind="roundabout"),
])
def test_node_spec_validation(kw):
    with pytest.raises(ValueError):
        NodeSpec("X", **kw)


def channel(name, L, N, h0=0.3, left=None, right=None, q0=0.0):
    g = EdgeGrid(0.0, L, N)
    u = np.column_stack([np.full(N, h0), np.full(N, q0)])
    return EdgeState(g, u, SW, S1, left, right, name=name)


def test_network_binding_errors():
    with pytest.raises(ValueError, match="unknown edge"):
        Network([channel("a", 1, 5)], [NodeSpec("A", "channel", ["a", "zz"])])
    with pytest.raises(ValueError, match="unbound"):
        Network([channel("a", 1, 5)], [])
    with pytest.raises(ValueError, match="bound twice"):
        Network([channel("a", 1, 5, left=BoundaryClosure("wall", "left")),
                 channel("b", 1, 5, right=BoundaryClosure("wall", "right"))],
                [NodeSpec("A", "channel", ["a"], ["b"]), NodeSpec("B", "channel", ["a"], ["b"])])
    with pytest.raises(ValueError, match="unique"):
        Network([channel("a", 1, 5), channel("a", 1, 5)])


def y_network(N=20, bump=0.05):
    a = channel("in", 1.0, N, left=BoundaryClosure("wall", "left"))
    a.ubar[:, 0] += bump * np.exp(-100 * (a.grid.centers - 0.5) ** 2)
    b = channel("out1", 0.5, N // 2, right=BoundaryClosure("wall", "right"))
    c = channel("out2", 0.5, N // 2, right=BoundaryClosure("wall", "right"))
    return Network([a, b, c], [NodeSpec("J", "channel", ["in"], ["out1", "out2"])])


def test_stage_fluxes_conserve_mass_at_node():
    net = y_network()
    edges = list(net.edges.values())
    traces = dict(zip(net.names, reconstruct_edges(edges, net.states())))
    table = assemble_stage_fluxes(net, traces, 0.0)
    assert set(table) == {("in", "right"), ("out1", "left"), ("out2", "left")}
    net_in = table[("in", "right")][0] - table[("out1", "left")][0] - table[("out2", "left")][0]
    assert abs(net_in) <= 1e-14


def test_simulate_conserves_volume_on_closed_network():
    net = y_network()
    vol = lambda us: sum(np.sum(u[:, 0]) * es.h for u, es in zip(us, net.edges.values()))
    v0 = vol(net.states())
    states, snaps = simulate(net, 0.3, TimeStepper("fixed", 0.3), snapshot_times=(0.1,))
    assert set(snaps) == {0.1, 0.3}
    assert abs(vol(states) - v0) <= 1e-13 * v0
    assert not np.allclose(states[1][:, 0], 0.3)  # the wave went through the node


def test_interface_node_is_llf_of_traces():
    a = channel("l", 0.5, 10, h0=1.0, left=BoundaryClosure("wall", "left"), q0=0.1)
    b = channel("r", 0.5, 10, h0=0.8, right=BoundaryClosure("wall", "right"))
    net = Network([a, b], [NodeSpec("I", "interface", ["l"], ["r"])])
    tr = dict(zip(net.names, reconstruct_edges(list(net.edges.values()), net.states())))
    table = assemble_stage_fluxes(net, tr, 0.0)
    F = llf_flux(SW, tr["l"][0][-1], tr["r"][1][0])
    assert np.array_equal(table[("l", "right")], F)
    assert np.array_equal(table[("r", "left")], F)


def test_traffic_nodes_assemble():
    tm = TrafficModel()

    def road(name, rho, **kw):
        return EdgeState(EdgeGrid(0.0, 0.2, 8), np.full(8, rho), tm, S1, name=name, **kw)

    main = road("main", 0.4, left_bc=BoundaryClosure("outflow", "left"))
    up = road("up", 0.2)
    lo = road("lo", 0.9)
    out = road("out", 0.3, right_bc=BoundaryClosure("outflow", "right"))
    net = Network([main, up, lo, out],
                  [NodeSpec("D", "disperse", ["main"], ["up", "lo"], alpha=0.7),
                   NodeSpec("M", "merge", ["up", "lo"], ["out"], P=0.5)])
    tr = dict(zip(net.names, reconstruct_edges(list(net.edges.values()), net.states())))
    T = assemble_stage_fluxes(net, tr, 0.0)
    # supply of lo (rho 0.9) is 0.1 -> 0.3 G <= 0.1
    assert T[("main", "right")][0] == pytest.approx(1 / 3)
    assert T[("up", "left")][0] + T[("lo", "left")][0] == pytest.approx(T[("main", "right")][0])
    assert T[("out", "left")][0] == pytest.approx(T[("up", "right")][0] + T[("lo", "right")][0])
