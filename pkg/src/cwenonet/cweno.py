"""Third order CWENO reconstruction for boundary and interior cells.

Boundary cells use three candidates built from the outermost cell averages
``(u0, u1, u2)`` (outermost first): a constant ``P0``, the linear ``P1``
through the first two averages and a parabola ``P2`` chosen so that the
linear combination with the optimal weights reproduces the third order
parabola ``P_opt``. Interior cells use the usual CWENO3 triple
``P_l, P_c, P_r`` with fixed optimal weights ``(0.25, 0.5, 0.25)``.

Optimal weights and the WENO epsilon may scale with the mesh size::

    eps(h) = K h**q
    c      = [K0 h**gamma0, K1 h**gamma1, 1 - c0 - c1]

All functions accept scalars or numpy arrays for the cell averages, so a
whole edge (or every component of a system) is reconstructed in one call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "ParamSet",
    "PARAM_SETS",
    "get_param_set",
    "WeightVector",
    "IndicatorTriple",
    "QuadPoly",
    "BoundaryStencil",
    "ConditionReport",
    "epsilon",
    "optimal_weights",
    "validate_conditions",
    "optimal_parabola",
    "boundary_polynomials",
    "boundary_indicators",
    "nonlinear_weights",
    "reconstruct_boundary",
    "reconstruct_interior",
    "interior_indicators",
    "INTERIOR_WEIGHTS",
]

# c_l, c_c, c_r for interior cells
INTERIOR_WEIGHTS = (0.25, 0.5, 0.25)


@dataclass(frozen=True)
class ParamSet:
    """Scheme parameters ``(K, q, p, K0, gamma0, K1, gamma1)``.

    ``q = 0`` selects constant-epsilon mode, in which case ``eps_const``
    must be given.
    """

    K: float = 1.0
    q: float = 1.0
    p: int = 2
    K0: float = 1.0
    gamma0: float = 1.0
    K1: float = 0.25
    gamma1: float = 0.0
    eps_const: float | None = None
    clamp_cap: float = 0.25
    name: str = "custom"

    def __post_init__(self):
        if not (self.K > 0 and self.K0 > 0 and self.K1 > 0):
            raise ValueError("K, K0 and K1 must be positive")
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"p must be a positive integer, got {self.p}")
        if self.gamma0 < 0 or self.gamma1 < 0:
            raise ValueError("gamma0 and gamma1 must be nonnegative")
        if not (0 < self.clamp_cap <= 1.0 / 3.0):
            raise ValueError("clamp_cap must lie in (0, 1/3]")
        if not (0 <= self.q <= 2):
            raise ValueError(f"q must lie in (0, 2] (or 0 for constant eps), got {self.q}")
        if self.q > 0 and self.eps_const is not None:
            raise ValueError("give either q > 0 or eps_const, not both")
        if self.q == 0 and (self.eps_const is None or self.eps_const <= 0):
            raise ValueError("constant-epsilon mode (q = 0) needs eps_const > 0")

    @property
    def constant_eps(self) -> bool:
        return self.q == 0


def _ps(name, *, K=1.0, q=0.0, eps=None, K0=1.0, g0, K1, g1):
    return ParamSet(K=K, q=q, p=2, K0=K0, gamma0=g0, K1=K1, gamma1=g1,
                    eps_const=eps, name=name)


PARAM_SETS = {
    "sigma1": _ps("sigma1", q=1.0, g0=1.0, K1=0.25, g1=0.0),
    "sigma2": _ps("sigma2", q=2.0, g0=2.0, K1=0.25, g1=0.0),
    "sigma3": _ps("sigma3", eps=1e-3, g0=2.0, K1=1.0, g1=1.0),
    "sigma4": _ps("sigma4", eps=1e-6, g0=2.0, K1=1.0, g1=1.0),
    "sigma5.1": _ps("sigma5.1", q=2.0, g0=1.0, K1=0.25, g1=0.0),
    "sigma5.2": _ps("sigma5.2", q=2.0, g0=1.0, K1=1.0, g1=1.0),
    "sigma5.3": _ps("sigma5.3", q=1.0, g0=1.5, K1=1.0, g1=0.5),
    "sigma6.2": _ps("sigma6.2", q=1.0, g0=2.0, K1=1.0, g1=1.0),
}


def get_param_set(name: str) -> ParamSet:
    key = name.lower().replace("σ", "sigma").replace("_", ".")
    if not key.startswith("sigma"):
        key = "sigma" + key
    try:
        return PARAM_SETS[key]
    except KeyError:
        raise KeyError(f"unknown parameter set {name!r}; "
                       f"known: {', '.join(PARAM_SETS)}") from None


class WeightVector(NamedTuple):
    w0: float
    w1: float
    w2: float


class IndicatorTriple(NamedTuple):
    is0: float
    is1: float
    is2: float


def _check_h(h):
    if not (h > 0) or not math.isfinite(h):
        raise ValueError(f"cell width must be positive and finite, got {h}")


def _pow(h, gamma):
    # h**gamma for possibly non-integer gamma
    return math.exp(gamma * math.log(h))


def epsilon(params: ParamSet, h: float) -> float:
    """WENO epsilon ``K h**q``, or the constant value in constant mode."""
    _check_h(h)
    if params.constant_eps:
        return float(params.eps_const)
    return params.K * _pow(h, params.q)


def optimal_weights(params: ParamSet, h: float) -> WeightVector:
    """Mesh dependent optimal weights with ``c0, c1`` clamped at ``clamp_cap``."""
    _check_h(h)
    c0 = min(params.K0 * _pow(h, params.gamma0), params.clamp_cap)
    c1 = min(params.K1 * _pow(h, params.gamma1), params.clamp_cap)
    return WeightVector(c0, c1, 1.0 - c0 - c1)


@dataclass(frozen=True)
class ConditionReport:
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failures(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]

    def __str__(self):
        lines = [f"  {'pass' if v else 'FAIL'}  {k}" for k, v in self.checks.items()]
        return "\n".join(lines)


def validate_conditions(params: ParamSet) -> ConditionReport:
    """Check the sufficient parameter conditions for full accuracy.

    The three primary inequalities are ``q <= 2``,
    ``gamma0 >= max(q, 1 + gamma1)`` and ``p q >= 1 + gamma0``; the last two
    entries spell out the derived ``p q >= 2 + gamma1`` separately so that a
    failure can be attributed. Constant epsilon counts as ``q = 0``.
    """
    q, p, g0, g1 = params.q, params.p, params.gamma0, params.gamma1
    pq = p * q
    checks = {
        "q <= 2": q <= 2,
        "gamma0 >= q": g0 >= q,
        "gamma0 >= 1 + gamma1": g0 >= 1 + g1,
        "p*q >= 1 + gamma0": pq >= 1 + g0,
        "p*q >= 2 + gamma1": pq >= 2 + g1,
    }
    return ConditionReport(checks)


@dataclass(frozen=True)
class QuadPoly:
    """``a0 + a1 (x - center) + a2 (x - center)**2``.

    Coefficients may be numpy arrays; evaluation then broadcasts.
    """

    center: object
    a0: object
    a1: object
    a2: object

    def __call__(self, x):
        s = x - self.center
        return self.a0 + s * (self.a1 + s * self.a2)

    def derivative(self, x, order=1):
        s = x - self.center
        if order == 1:
            return self.a1 + 2.0 * self.a2 * s
        if order == 2:
            return 2.0 * self.a2 + 0.0 * s
        return 0.0 * s

    def cell_average(self, a, b):
        """Exact mean of the polynomial over ``[a, b]``."""
        sa, sb = a - self.center, b - self.center
        return (self.a0 + self.a1 * (sa + sb) / 2.0
                + self.a2 * (sa * sa + sa * sb + sb * sb) / 3.0)

    def mirror(self, about):
        """Reflection ``x -> 2 about - x``."""
        return QuadPoly(2.0 * about - self.center, self.a0, -self.a1, self.a2)

    def coefficients(self):
        return np.array([self.a0, self.a1, self.a2])


@dataclass(frozen=True)
class BoundaryStencil:
    """The three outermost cell averages of an edge, outermost first.

    ``x_boundary`` is the position of the boundary interface. For a right
    boundary the averages are stored outward to inward, i.e. already in
    mirrored order.
    """

    u0: object
    u1: object
    u2: object
    h: float
    side: str = "left"
    x_boundary: float = 0.0

    def __post_init__(self):
        _check_h(self.h)
        if self.side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {self.side!r}")
        for u in (self.u0, self.u1, self.u2):
            if not np.all(np.isfinite(u)):
                raise ValueError("non-finite cell average in boundary stencil")

    @property
    def sigma_l(self):
        return self.u1 - self.u0

    @property
    def sigma_r(self):
        return self.u2 - self.u1

    @property
    def center(self):
        """Center of the middle cell in the (unmirrored) left frame."""
        return self.x_boundary + 1.5 * self.h


def optimal_parabola(st: BoundaryStencil) -> QuadPoly:
    u0, u1, u2, h = st.u0, st.u1, st.u2, st.h
    d2 = u2 - 2.0 * u1 + u0
    return QuadPoly(st.center, u1 - d2 / 24.0, (u2 - u0) / (2.0 * h),
                    d2 / (2.0 * h * h))


def _check_c2(c):
    if not np.all(np.asarray(c[2]) > 0):
        raise ValueError(f"invalid weights: c2 must be positive, got {c[2]}")


def boundary_polynomials(st: BoundaryStencil, c) -> tuple[QuadPoly, QuadPoly, QuadPoly]:
    c0, c1, c2 = c
    _check_c2(c)
    h, xc = st.h, st.center
    sl, sr = st.sigma_l, st.sigma_r
    zero = 0.0 * sl
    p0 = QuadPoly(xc, st.u0 + zero, zero, zero)
    p1 = QuadPoly(xc, st.u1 + zero, sl / h, zero)
    p2 = QuadPoly(
        xc,
        (-c0 * st.u0 + (1.0 - c1) * st.u1 - (sr - sl) / 24.0) / c2,
        (sr + sl - 2.0 * c1 * sl) / (2.0 * h * c2),
        (sr - sl) / (2.0 * h * h * c2),
    )
    return p0, p1, p2


def boundary_indicators(st: BoundaryStencil, c) -> IndicatorTriple:
    _, c1, c2 = c
    _check_c2(c)
    sl, sr = st.sigma_l, st.sigma_r
    is2 = (4.0 / 3.0 * sr * sr + (c1 - 11.0 / 3.0) * sr * sl
           + (10.0 / 3.0 - 3.0 * c1 + c1 * c1) * sl * sl) / (c2 * c2)
    return IndicatorTriple(0.0 * sl, sl * sl, is2)


def nonlinear_weights(indicators, c, eps: float, p: int) -> WeightVector:
    """WENO weights ``alpha_i = c_i / (eps + IS_i)**p`` normalized to sum one."""
    a0 = c[0] / (eps + indicators[0]) ** p
    a1 = c[1] / (eps + indicators[1]) ** p
    a2 = c[2] / (eps + indicators[2]) ** p
    s = a0 + a1 + a2
    return WeightVector(a0 / s, a1 / s, a2 / s)


def _combine(polys, w):
    return QuadPoly(
        polys[0].center,
        w[0] * polys[0].a0 + w[1] * polys[1].a0 + w[2] * polys[2].a0,
        w[0] * polys[0].a1 + w[1] * polys[1].a1 + w[2] * polys[2].a1,
        w[0] * polys[0].a2 + w[1] * polys[1].a2 + w[2] * polys[2].a2,
    )


def reconstruct_boundary(st: BoundaryStencil, params: ParamSet,
                         return_weights: bool = False):
    """CWENO reconstruction in the outermost cell of an edge.

    A right stencil is treated in the mirrored frame, and the resulting
    polynomial is reflected back about ``st.x_boundary``.
    """
    c = optimal_weights(params, st.h)
    polys = boundary_polynomials(st, c)
    w = nonlinear_weights(boundary_indicators(st, c), c,
                          epsilon(params, st.h), params.p)
    poly = _combine(polys, w)
    if st.side == "right":
        # left-frame center is x_b + 1.5h; reflect so it lands at x_b - 1.5h
        poly = poly.mirror(st.x_boundary)
    return (poly, w) if return_weights else poly


def interior_indicators(ul, uc, ur) -> IndicatorTriple:
    """Jiang-Shu type indicators of ``P_l, P_c, P_r`` over the central cell."""
    d1 = ur - ul
    d2 = ur - 2.0 * uc + ul
    return IndicatorTriple((uc - ul) ** 2, 13.0 / 3.0 * d2 * d2 + 0.25 * d1 * d1,
                           (ur - uc) ** 2)


def interior_polynomials(ul, uc, ur, h, center=0.0):
    """``(P_l, P_c, P_r)`` for the cell with average ``uc``."""
    cl, cc, cr = INTERIOR_WEIGHTS
    sl, sr = uc - ul, ur - uc
    d2 = sr - sl
    zero = 0.0 * d2
    pl = QuadPoly(center, uc + zero, sl / h, zero)
    pr = QuadPoly(center, uc + zero, sr / h, zero)
    # P_opt = uc - d2/24 + (sl+sr)/(2h) s + d2/(2h^2) s^2
    pc = QuadPoly(
        center,
        (uc - d2 / 24.0 - (cl + cr) * uc) / cc,
        ((sl + sr) / (2.0 * h) - (cl * sl + cr * sr) / h) / cc,
        d2 / (2.0 * h * h) / cc,
    )
    return pl, pc, pr


def reconstruct_interior(ul, uc, ur, h: float, params: ParamSet,
                         center=0.0, linear: bool = False) -> QuadPoly:
    """CWENO3 reconstruction in an interior cell.

    ``linear=True`` replaces the nonlinear weights by the optimal ones,
    which gives back the third order parabola through the three averages.
    """
    _check_h(h)
    polys = interior_polynomials(ul, uc, ur, h, center)
    c = INTERIOR_WEIGHTS
    if linear:
        w = c
    else:
        w = nonlinear_weights(interior_indicators(ul, uc, ur), c,
                              epsilon(params, h), params.p)
    return _combine(polys, w)
