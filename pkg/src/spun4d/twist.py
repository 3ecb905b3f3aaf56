"""k-twist spin construction: rotate the knotted part of the arc about the
chord PQ while spinning about the xy-plane.

The rotation about PQ is Rodrigues' rotation about the horizontal axis
direction, conjugated by the translation taking an axis point to the origin.
A smooth bump in t confines the rotation to the knotted part so the arc ends
stay put on the boundary plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .approx import chebyshev_fit
from .catalog import KnotArc
from .errors import NonUnitAxis, NoRoom, PlaneCrossing
from .poly import Interval, Poly1
from .surface import (
    TWO_PI, Const, CosK, Node, PolyT, PolyTheta, Product, SinK, Sum, Surface4,
    blend, register_node, scaled,
)

__all__ = [
    "Bump", "TwistAxis", "rodrigues", "axis_rotation", "make_axis",
    "choose_bump", "twisted_arc", "twist_spin", "polynomialize_twist",
]


# -- bump -------------------------------------------------------------------

def _soft_step(x):
    """exp(-1/x) for x > 0, identically 0 otherwise (C-infinity glue)."""
    x = np.asarray(x, float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def _soft_step_deriv(x):
    x = np.asarray(x, float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos]) / x[pos] ** 2
    return out


@dataclass(frozen=True)
class Bump:
    """Even C-infinity bump: 1 on |t| <= sqrt(d1), 0 on |t| >= sqrt(d2)."""

    d1: float
    d2: float

    def __post_init__(self):
        if not 0.0 < self.d1 < self.d2:
            raise ValueError(f"need 0 < d1 < d2, got d1={self.d1}, d2={self.d2}")

    def __call__(self, t):
        t2 = np.asarray(t, float) ** 2
        u = _soft_step(self.d2 - t2)
        v = _soft_step(t2 - self.d1)
        # closed-form branches keep the division away from 0/0 at the plateaus
        return np.where(t2 >= self.d2, 0.0, np.where(t2 <= self.d1, 1.0, u / (u + v)))

    def derivative(self, t):
        t = np.asarray(t, float)
        t2 = t ** 2
        u = _soft_step(self.d2 - t2)
        v = _soft_step(t2 - self.d1)
        du = -2.0 * t * _soft_step_deriv(self.d2 - t2)
        dv = 2.0 * t * _soft_step_deriv(t2 - self.d1)
        mid = (self.d1 < t2) & (t2 < self.d2)
        out = np.zeros_like(t)
        w = u + v
        out[mid] = (du[mid] * v[mid] - u[mid] * dv[mid]) / w[mid] ** 2
        return out


@dataclass(frozen=True)
class BumpT(Node):
    """Bump factor in t as a surface-tree node."""

    bump: Bump
    tag = "bump"

    def ev(self, t, th):
        return np.broadcast_to(self.bump(t), np.broadcast(t, th).shape).copy()

    def dt(self, t, th):
        return np.broadcast_to(self.bump.derivative(t), np.broadcast(t, th).shape).copy()

    def dth(self, t, th):
        return np.zeros(np.broadcast(t, th).shape)

    def to_json(self):
        return {"tag": self.tag, "d1": self.bump.d1, "d2": self.bump.d2}


register_node("bump", lambda d: BumpT(Bump(float(d["d1"]), float(d["d2"]))))


# -- rotation algebra -------------------------------------------------------

def rodrigues(k, phi: float) -> np.ndarray:
    """Rotation matrix R = I + sin(phi) K + (1 - cos(phi)) K^2 about unit axis k."""
    k = np.asarray(k, float)
    if abs(np.linalg.norm(k) - 1.0) > 1e-9:
        raise NonUnitAxis(f"axis norm {np.linalg.norm(k):.12g} != 1")
    K = np.array([
        [0.0, -k[2], k[1]],
        [k[2], 0.0, -k[0]],
        [-k[1], k[0], 0.0],
    ])
    return np.eye(3) + math.sin(phi) * K + (1.0 - math.cos(phi)) * (K @ K)


@dataclass(frozen=True)
class TwistAxis:
    """Chord PQ between two equal-height arc points, the axis of the twist."""

    t1: float
    t2: float
    c: float
    f21: float
    g21: float
    p1: tuple[float, float]  # (f(t1), g(t1))

    @property
    def n_len(self) -> float:
        return math.hypot(self.f21, self.g21)

    @property
    def n2(self) -> float:
        return self.f21 ** 2 + self.g21 ** 2

    @property
    def direction(self) -> np.ndarray:
        return np.array([self.f21 / self.n_len, self.g21 / self.n_len, 0.0])

    @property
    def P(self) -> np.ndarray:
        return np.array([self.p1[0], self.p1[1], self.c])

    @property
    def Q(self) -> np.ndarray:
        return np.array([self.p1[0] + self.f21, self.p1[1] + self.g21, self.c])


HEIGHT_MATCH_TOL = 1e-6


def make_axis(arc: KnotArc, t1: float, t2: float) -> TwistAxis:
    """Axis through (f, g, h)(t1) and (f, g, h)(t2); heights must agree and the
    crossing interval must sit strictly between t1 and t2."""
    h1, h2 = float(arc.h(t1)), float(arc.h(t2))
    scale = max(abs(h1), abs(h2), 1.0)
    if abs(h1 - h2) > HEIGHT_MATCH_TOL * scale:
        raise ValueError(f"axis heights differ: h({t1})={h1:.9g}, h({t2})={h2:.9g}")
    if arc.crossing_iv is not None and not (t1 < arc.crossing_iv.lo and arc.crossing_iv.hi < t2):
        raise ValueError("crossing interval must lie strictly inside (t1, t2)")
    f21 = float(arc.f(t2)) - float(arc.f(t1))
    g21 = float(arc.g(t2)) - float(arc.g(t1))
    if math.hypot(f21, g21) == 0.0:
        raise ValueError("axis endpoints project to the same plane point")
    return TwistAxis(t1, t2, 0.5 * (h1 + h2), f21, g21,
                     (float(arc.f(t1)), float(arc.g(t1))))


@dataclass(frozen=True)
class AffineMap:
    """x -> A x + b on R^3."""

    A: np.ndarray
    b: np.ndarray

    def __call__(self, x):
        return np.asarray(x, float) @ self.A.T + self.b


def axis_rotation(axis: TwistAxis, phi: float) -> AffineMap:
    """Rotation by phi about the line PQ: Rodrigues about the horizontal axis
    direction conjugated by translation onto the line (which lifts the axis to
    height c); fixes both P and Q."""
    R = rodrigues(axis.direction, phi)
    p0 = axis.P
    return AffineMap(R, p0 - R @ p0)


# -- twisted arc ------------------------------------------------------------

def _rotated_coord_nodes(arc: KnotArc, axis: TwistAxis, cos_n: Node, sin_n: Node):
    """Coordinate trees of the axis rotation applied to (f, g, h)(t), with the
    rotation angle supplied through the cosine/sine nodes.

    Written from the conjugated rotation matrix entries; for the catalog's
    odd-symmetric arcs the chord projection P'Q' passes through the origin and
    the expressions reduce to the matrix form T_c * R * T_{-c}.
    """
    f, g, h = PolyT(arc.f), PolyT(arc.g), PolyT(arc.h)
    f21, g21, c, n2 = axis.f21, axis.g21, axis.c, axis.n2
    n = math.sqrt(n2)
    one_m_cos = Sum((Const(1.0), scaled(cos_n, -1.0)))
    h_m_c = Sum((h, Const(-c)))
    # in-plane coordinates of the conjugation point P (zero for the
    # odd-symmetric fixtures, where P'Q' passes through the origin)
    ax_x, ax_y = axis.p1

    # rotation applied to (v - P) + P, expanded in tree form
    vx = Sum((f, Const(-ax_x)))
    vy = Sum((g, Const(-ax_y)))
    vz = h_m_c
    kx, ky = f21 / n, g21 / n

    def rot_row(cxx, cxy, cxz):
        # cij are (constant, cos-coefficient, sin-coefficient) triples
        terms = []
        for (c0, cc, cs), v in zip((cxx, cxy, cxz), (vx, vy, vz)):
            if c0:
                terms.append(scaled(v, c0))
            if cc:
                terms.append(Product((Const(cc), cos_n, v)))
            if cs:
                terms.append(Product((Const(cs), sin_n, v)))
        return Sum(tuple(terms))

    # R = I + sin K + (1-cos) K^2 with k = (kx, ky, 0):
    #   R = [[kx^2 + ky^2 cos, kx ky (1-cos),      ky sin],
    #        [kx ky (1-cos),   ky^2 + kx^2 cos,   -kx sin],
    #        [-ky sin,         kx sin,              cos  ]]
    rx = rot_row((kx * kx, ky * ky, 0.0), (kx * ky, -kx * ky, 0.0), (0.0, 0.0, ky))
    ry = rot_row((kx * ky, -kx * ky, 0.0), (ky * ky, kx * kx, 0.0), (0.0, 0.0, -kx))
    rz = rot_row((0.0, 0.0, -ky), (0.0, 0.0, kx), (0.0, 1.0, 0.0))

    fx = Sum((rx, Const(ax_x)))
    fy = Sum((ry, Const(ax_y)))
    fz = Sum((rz, Const(c)))
    return fx, fy, fz


def _blended_coord_nodes(arc: KnotArc, axis: TwistAxis, bump: Bump, cos_n: Node, sin_n: Node):
    fx, fy, fz = _rotated_coord_nodes(arc, axis, cos_n, sin_n)
    b = BumpT(bump)
    return (
        blend(b, fx, PolyT(arc.f)),
        blend(b, fy, PolyT(arc.g)),
        blend(b, fz, PolyT(arc.h)),
    )


class TwistedArc:
    """The blended rotated arc at a fixed rotation angle phi."""

    def __init__(self, arc: KnotArc, axis: TwistAxis, bump: Bump, phi: float):
        cos_n, sin_n = Const(math.cos(phi)), Const(math.sin(phi))
        self._nodes = _blended_coord_nodes(arc, axis, bump, cos_n, sin_n)
        self.phi = phi

    def __call__(self, t):
        """(f~, g~, h~)(t); result shape t.shape + (3,)."""
        t = np.asarray(t, float)
        th = np.zeros_like(t)
        return np.stack([n.ev(t, th) for n in self._nodes], axis=-1)


def twisted_arc(arc: KnotArc, axis: TwistAxis, bump: Bump, phi: float) -> TwistedArc:
    return TwistedArc(arc, axis, bump, phi)


BUMP_MARGIN_FRAC = 0.05


def choose_bump(arc: KnotArc, axis: TwistAxis) -> Bump:
    """Bump parameters that are 1 over the crossing interval and 0 beyond the
    axis endpoints, with a 5% margin of the available squared-parameter gap."""
    if arc.crossing_iv is None:
        inner = 0.0
    else:
        inner = max(arc.crossing_iv.lo ** 2, arc.crossing_iv.hi ** 2)
    outer = min(axis.t1 ** 2, axis.t2 ** 2)
    gap = outer - inner
    if gap <= 0:
        raise NoRoom("crossing interval touches the twist axis endpoints")
    margin = BUMP_MARGIN_FRAC * gap
    return Bump(inner + margin, outer - margin)


# -- twist spin -------------------------------------------------------------

PRECHECK_NT = 2000
PRECHECK_NPHI = 360


def _check_height_positive(h_node: Node, t_dom: Interval):
    ts = t_dom.sample(PRECHECK_NT + 2)[1:-1]  # open interior
    phis = np.linspace(0.0, TWO_PI, PRECHECK_NPHI, endpoint=False)
    T, PH = np.meshgrid(ts, phis, indexing="ij")
    vals = h_node.ev(T, PH)
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    if vals[i, j] <= 0.0:
        raise PlaneCrossing(float(T[i, j]), float(PH[i, j]), float(vals[i, j]))


def twist_spin(arc: KnotArc, axis: TwistAxis, bump: Bump, k: int) -> Surface4:
    """k-twist spun surface (f~(t,k th), g~(t,k th), h~(t,k th) cos th, h~(t,k th) sin th).

    Rejects the construction with PlaneCrossing if the rotating knotted part
    would dip below the xy-plane (dense 2000x360 sampling of h~).
    """
    if k < 0:
        raise ValueError("twist count k must be >= 0")
    cos_n, sin_n = CosK(k), SinK(k)
    ft, gt, ht = _blended_coord_nodes(arc, axis, bump, cos_n, sin_n)
    _check_height_positive(ht, arc.ab)
    return Surface4(
        coords=(ft, gt, Product((ht, CosK(1))), Product((ht, SinK(1)))),
        t_dom=arc.ab,
        s_dom=Interval(0.0, TWO_PI),
        periodic_s=True,
        pole_low=True,
        pole_high=True,
    )


def polynomialize_twist(s: Surface4, cheb_degree: int, bump_degree: int | None = None):
    """Replace every cos(k th) / sin(k th) factor by its Chebyshev interpolant
    on [0, 2*pi], and (optionally) the bump by a Chebyshev fit on the t-domain.

    Returns the new surface and its max deviation from ``s`` on a 200x200 grid.
    """
    if cheb_degree < 1:
        raise ValueError("cheb_degree must be >= 1")
    dom = s.s_dom
    fits: dict[tuple[str, int], Poly1] = {}

    def trig_fit(kind: str, k: int) -> Poly1:
        key = (kind, k)
        if key not in fits:
            base = np.cos if kind == "cos" else np.sin
            fits[key] = chebyshev_fit(lambda x: base(k * x), dom, cheb_degree).poly
        return fits[key]

    def swap(node: Node) -> Node:
        if isinstance(node, CosK):
            return PolyTheta(trig_fit("cos", node.k))
        if isinstance(node, SinK):
            return PolyTheta(trig_fit("sin", node.k))
        if bump_degree is not None and isinstance(node, BumpT):
            return PolyT(chebyshev_fit(node.bump, s.t_dom, bump_degree).poly)
        return node

    out = s.map_coords(swap)
    from .surface import max_grid_deviation
    return out, max_grid_deviation(s, out)
