"""Evaluable factor trees for surfaces mapping a parameter rectangle
(t, theta) into R^4.

Coordinate functions are trees of tagged nodes: polynomials in t or theta,
reference cosine/sine of integer multiples of theta, bump factors in t, and
sums/products of those.  Every node evaluates vectorized and supplies exact
first partial derivatives, so Jacobians never rely on finite differences.
Trees serialize to/from JSON for pipeline files.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .poly import Interval, Poly1, Poly2

__all__ = [
    "Node", "Const", "PolyT", "PolyTheta", "CosK", "SinK", "Sum", "Product",
    "Surface4", "PolyMap4", "node_from_json", "register_node",
]

TWO_PI = 2.0 * np.pi


class Node:
    """Base class: a scalar function of (t, theta) with exact partials."""

    tag = "node"

    def ev(self, t, th):
        raise NotImplementedError

    def dt(self, t, th):
        raise NotImplementedError

    def dth(self, t, th):
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def replace(self, fn) -> "Node":
        """Return a copy with ``fn`` applied bottom-up to every node."""
        return fn(self)


@dataclass(frozen=True)
class Const(Node):
    value: float
    tag = "const"

    def ev(self, t, th):
        return np.full(np.broadcast(t, th).shape, self.value)

    def dt(self, t, th):
        return np.zeros(np.broadcast(t, th).shape)

    dth = dt

    def to_json(self):
        return {"tag": self.tag, "value": self.value}


@dataclass(frozen=True)
class PolyT(Node):
    """Polynomial in the t parameter."""

    p: Poly1
    tag = "poly_t"

    def ev(self, t, th):
        return np.broadcast_to(self.p(t), np.broadcast(t, th).shape).copy()

    def dt(self, t, th):
        return np.broadcast_to(self.p.derivative()(t), np.broadcast(t, th).shape).copy()

    def dth(self, t, th):
        return np.zeros(np.broadcast(t, th).shape)

    def to_json(self):
        return {"tag": self.tag, "coeffs": list(self.p.coeffs)}


@dataclass(frozen=True)
class PolyTheta(Node):
    """Polynomial in the theta parameter."""

    p: Poly1
    tag = "poly_theta"

    def ev(self, t, th):
        return np.broadcast_to(self.p(th), np.broadcast(t, th).shape).copy()

    def dt(self, t, th):
        return np.zeros(np.broadcast(t, th).shape)

    def dth(self, t, th):
        return np.broadcast_to(self.p.derivative()(th), np.broadcast(t, th).shape).copy()

    def to_json(self):
        return {"tag": self.tag, "coeffs": list(self.p.coeffs)}


@dataclass(frozen=True)
class CosK(Node):
    """cos(k * theta) for integer k >= 0."""

    k: int
    tag = "cos_k"

    def ev(self, t, th):
        return np.broadcast_to(np.cos(self.k * np.asarray(th, float)), np.broadcast(t, th).shape).copy()

    def dt(self, t, th):
        return np.zeros(np.broadcast(t, th).shape)

    def dth(self, t, th):
        return np.broadcast_to(-self.k * np.sin(self.k * np.asarray(th, float)), np.broadcast(t, th).shape).copy()

    def to_json(self):
        return {"tag": self.tag, "k": self.k}


@dataclass(frozen=True)
class SinK(Node):
    """sin(k * theta) for integer k >= 0."""

    k: int
    tag = "sin_k"

    def ev(self, t, th):
        return np.broadcast_to(np.sin(self.k * np.asarray(th, float)), np.broadcast(t, th).shape).copy()

    def dt(self, t, th):
        return np.zeros(np.broadcast(t, th).shape)

    def dth(self, t, th):
        return np.broadcast_to(self.k * np.cos(self.k * np.asarray(th, float)), np.broadcast(t, th).shape).copy()

    def to_json(self):
        return {"tag": self.tag, "k": self.k}


@dataclass(frozen=True)
class Sum(Node):
    terms: tuple[Node, ...]
    tag = "sum"

    def ev(self, t, th):
        out = self.terms[0].ev(t, th)
        for n in self.terms[1:]:
            out = out + n.ev(t, th)
        return out

    def dt(self, t, th):
        out = self.terms[0].dt(t, th)
        for n in self.terms[1:]:
            out = out + n.dt(t, th)
        return out

    def dth(self, t, th):
        out = self.terms[0].dth(t, th)
        for n in self.terms[1:]:
            out = out + n.dth(t, th)
        return out

    def to_json(self):
        return {"tag": self.tag, "terms": [n.to_json() for n in self.terms]}

    def replace(self, fn):
        return fn(Sum(tuple(n.replace(fn) for n in self.terms)))


@dataclass(frozen=True)
class Product(Node):
    factors: tuple[Node, ...]
    tag = "product"

    def ev(self, t, th):
        out = self.factors[0].ev(t, th)
        for n in self.factors[1:]:
            out = out * n.ev(t, th)
        return out

    def _dprod(self, t, th, which):
        vals = [n.ev(t, th) for n in self.factors]
        ders = [getattr(n, which)(t, th) for n in self.factors]
        out = np.zeros(np.broadcast(t, th).shape)
        for i in range(len(self.factors)):
            term = ders[i]
            for j, v in enumerate(vals):
                if j != i:
                    term = term * v
            out = out + term
        return out

    def dt(self, t, th):
        return self._dprod(t, th, "dt")

    def dth(self, t, th):
        return self._dprod(t, th, "dth")

    def to_json(self):
        return {"tag": self.tag, "factors": [n.to_json() for n in self.factors]}

    def replace(self, fn):
        return fn(Product(tuple(n.replace(fn) for n in self.factors)))


_NODE_REGISTRY: dict[str, callable] = {}


def register_node(tag, loader):
    _NODE_REGISTRY[tag] = loader


register_node("const", lambda d: Const(float(d["value"])))
register_node("poly_t", lambda d: PolyT(Poly1(tuple(d["coeffs"]))))
register_node("poly_theta", lambda d: PolyTheta(Poly1(tuple(d["coeffs"]))))
register_node("cos_k", lambda d: CosK(int(d["k"])))
register_node("sin_k", lambda d: SinK(int(d["k"])))
register_node("sum", lambda d: Sum(tuple(node_from_json(x) for x in d["terms"])))
register_node("product", lambda d: Product(tuple(node_from_json(x) for x in d["factors"])))


def node_from_json(doc: dict) -> Node:
    try:
        loader = _NODE_REGISTRY[doc["tag"]]
    except KeyError:
        raise ValueError(f"unknown node tag {doc.get('tag')!r}")
    return loader(doc)


def scaled(node: Node, c: float) -> Node:
    return Product((Const(float(c)), node))


def blend(bump: Node, rotated: Node, original: Node) -> Node:
    """B * rotated + (1 - B) * original, written as original + B*(rotated - original)."""
    diff = Sum((rotated, scaled(original, -1.0)))
    return Sum((original, Product((bump, diff))))


@dataclass(frozen=True)
class Surface4:
    """Map from a rectangle in (t, theta) space to R^4 built from factor trees.

    ``pole_low`` / ``pole_high`` flag t-endpoints whose whole theta-row maps to
    a single point (sphere poles); ``periodic_s`` flags theta = 0 == 2*pi.
    """

    coords: tuple[Node, Node, Node, Node]
    t_dom: Interval
    s_dom: Interval = field(default_factory=lambda: Interval(0.0, TWO_PI))
    periodic_s: bool = True
    pole_low: bool = True
    pole_high: bool = True

    def evaluate(self, t, th) -> np.ndarray:
        """Evaluate all four coordinates; result shape broadcast(t, th) + (4,)."""
        t = np.asarray(t, float)
        th = np.asarray(th, float)
        return np.stack([c.ev(t, th) for c in self.coords], axis=-1)

    def eval_grid(self, tvals, svals) -> np.ndarray:
        T, S = np.meshgrid(np.asarray(tvals, float), np.asarray(svals, float), indexing="ij")
        return self.evaluate(T, S)

    def partials_grid(self, tvals, svals):
        """(d/dt, d/dtheta) of all coordinates over the tensor grid."""
        T, S = np.meshgrid(np.asarray(tvals, float), np.asarray(svals, float), indexing="ij")
        dt = np.stack([c.dt(T, S) for c in self.coords], axis=-1)
        ds = np.stack([c.dth(T, S) for c in self.coords], axis=-1)
        return dt, ds

    def jacobian(self, t, th) -> np.ndarray:
        """4x2 Jacobian at a single parameter point."""
        t = np.asarray(t, float)
        th = np.asarray(th, float)
        col_t = [float(c.dt(t, th)) for c in self.coords]
        col_s = [float(c.dth(t, th)) for c in self.coords]
        return np.column_stack([col_t, col_s])

    def map_coords(self, fn) -> "Surface4":
        """New surface with ``fn`` applied bottom-up to every node of every coordinate."""
        return Surface4(
            tuple(c.replace(fn) for c in self.coords),
            self.t_dom, self.s_dom, self.periodic_s, self.pole_low, self.pole_high,
        )

    def to_json(self) -> dict:
        return {
            "type": "surface4",
            "coords": [c.to_json() for c in self.coords],
            "t_dom": [self.t_dom.lo, self.t_dom.hi],
            "s_dom": [self.s_dom.lo, self.s_dom.hi],
            "periodic_s": self.periodic_s,
            "pole_low": self.pole_low,
            "pole_high": self.pole_high,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Surface4":
        return cls(
            tuple(node_from_json(d) for d in doc["coords"]),
            Interval(*doc["t_dom"]),
            Interval(*doc["s_dom"]),
            bool(doc.get("periodic_s", True)),
            bool(doc.get("pole_low", True)),
            bool(doc.get("pole_high", True)),
        )


@dataclass(frozen=True)
class PolyMap4:
    """Fully polynomial map (t, s) -> R^4; same sampling protocol as Surface4."""

    polys: tuple[Poly2, Poly2, Poly2, Poly2]
    t_dom: Interval
    s_dom: Interval
    periodic_s: bool = False
    pole_low: bool = False
    pole_high: bool = False

    def evaluate(self, t, s) -> np.ndarray:
        t = np.asarray(t, float)
        s = np.asarray(s, float)
        return np.stack([p(t, s) for p in self.polys], axis=-1)

    def eval_grid(self, tvals, svals) -> np.ndarray:
        T, S = np.meshgrid(np.asarray(tvals, float), np.asarray(svals, float), indexing="ij")
        return self.evaluate(T, S)

    def partials_grid(self, tvals, svals):
        T, S = np.meshgrid(np.asarray(tvals, float), np.asarray(svals, float), indexing="ij")
        dt = np.stack([p.partial("t")(T, S) for p in self.polys], axis=-1)
        ds = np.stack([p.partial("s")(T, S) for p in self.polys], axis=-1)
        return dt, ds

    def to_json(self) -> dict:
        return {
            "type": "polymap4",
            "coords": [p.to_json() for p in self.polys],
            "t_dom": [self.t_dom.lo, self.t_dom.hi],
            "s_dom": [self.s_dom.lo, self.s_dom.hi],
            "periodic_s": self.periodic_s,
            "pole_low": self.pole_low,
            "pole_high": self.pole_high,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PolyMap4":
        return cls(
            tuple(Poly2.from_json(d) for d in doc["coords"]),
            Interval(*doc["t_dom"]),
            Interval(*doc["s_dom"]),
            bool(doc.get("periodic_s", False)),
            bool(doc.get("pole_low", False)),
            bool(doc.get("pole_high", False)),
        )


def max_grid_deviation(a, b, n_t: int = 200, n_s: int = 200) -> float:
    """Max Euclidean distance between two samplers over a shared tensor grid."""
    tvals = a.t_dom.sample(n_t)
    svals = a.s_dom.sample(n_s)
    pa = a.eval_grid(tvals, svals)
    pb = b.eval_grid(tvals, svals)
    return float(np.max(np.linalg.norm(pa - pb, axis=-1)))
