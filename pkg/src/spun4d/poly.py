"""Univariate and bivariate polynomials with coefficient arithmetic and real
root isolation on intervals.

Coefficients are plain float64.  ``Poly1`` stores ``coeffs[i]`` as the
coefficient of ``t**i``; ``Poly2`` stores ``coeffs[i, j]`` as the coefficient
of ``t**i * s**j``.  Both are immutable and safe to share between threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.signal import convolve2d

from .errors import DegenerateInput

__all__ = ["Interval", "Poly1", "Poly2", "roots_in_interval", "poly_scale"]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"interval requires lo <= hi, got [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, t, slack: float = 0.0) -> bool:
        return bool(np.all((np.asarray(t) >= self.lo - slack) & (np.asarray(t) <= self.hi + slack)))

    def sample(self, n: int) -> np.ndarray:
        return np.linspace(self.lo, self.hi, n)


def _trim1(coeffs) -> tuple[float, ...]:
    c = [float(x) for x in coeffs]
    while c and c[-1] == 0.0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Poly1:
    """Real polynomial in one variable, evaluated by Horner's scheme."""

    coeffs: tuple[float, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim1(self.coeffs))

    # -- queries -----------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    @property
    def degree(self) -> int:
        """Degree of the polynomial; the zero polynomial reports -1."""
        return len(self.coeffs) - 1

    def __call__(self, t):
        if self.is_zero:
            return np.zeros_like(np.asarray(t, dtype=float)) + 0.0
        return npoly.polyval(np.asarray(t, dtype=float), self.coeffs)

    # -- calculus ----------------------------------------------------------
    def derivative(self, order: int = 1) -> "Poly1":
        if order < 1:
            raise ValueError("order must be >= 1")
        if self.is_zero:
            return Poly1()
        return Poly1(npoly.polyder(self.coeffs, m=order))

    def integral(self) -> "Poly1":
        """Coefficientwise antiderivative with zero constant term."""
        if self.is_zero:
            return Poly1()
        return Poly1(npoly.polyint(self.coeffs))

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other: "Poly1") -> "Poly1":
        return Poly1(npoly.polyadd(self.coeffs or (0.0,), other.coeffs or (0.0,)))

    def __sub__(self, other: "Poly1") -> "Poly1":
        return Poly1(npoly.polysub(self.coeffs or (0.0,), other.coeffs or (0.0,)))

    def __mul__(self, other):
        if isinstance(other, Poly1):
            if self.is_zero or other.is_zero:
                return Poly1()
            return Poly1(npoly.polymul(self.coeffs, other.coeffs))
        return Poly1(tuple(float(other) * c for c in self.coeffs))

    __rmul__ = __mul__

    def __neg__(self) -> "Poly1":
        return self * -1.0

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        return {"coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, doc: dict) -> "Poly1":
        return cls(tuple(doc["coeffs"]))

    def __repr__(self):
        return f"Poly1({list(self.coeffs)})"


def _trim2(grid) -> np.ndarray:
    a = np.array(grid, dtype=float)
    if a.ndim != 2:
        a = np.atleast_2d(a)
    while a.shape[0] > 1 and not a[-1].any():
        a = a[:-1]
    while a.shape[1] > 1 and not a[:, -1].any():
        a = a[:, :-1]
    if a.shape == (1, 1) and a[0, 0] == 0.0:
        pass  # canonical zero: [[0.0]]
    a = a.copy()
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Poly2:
    """Real polynomial in two variables; ``coeffs[i, j]`` multiplies t^i s^j."""

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros((1, 1)))

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim2(self.coeffs))

    @property
    def is_zero(self) -> bool:
        return self.coeffs.shape == (1, 1) and self.coeffs[0, 0] == 0.0

    @property
    def deg_t(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def deg_s(self) -> int:
        return self.coeffs.shape[1] - 1

    def __call__(self, t, s):
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        return npoly.polyval2d(t, s, self.coeffs)

    def partial(self, wrt: str) -> "Poly2":
        """Formal partial derivative with respect to 't' or 's'."""
        if wrt == "t":
            return Poly2(npoly.polyder(self.coeffs, axis=0))
        if wrt == "s":
            return Poly2(npoly.polyder(self.coeffs, axis=1))
        raise ValueError("wrt must be 't' or 's'")

    def __add__(self, other: "Poly2") -> "Poly2":
        nt = max(self.coeffs.shape[0], other.coeffs.shape[0])
        ns = max(self.coeffs.shape[1], other.coeffs.shape[1])
        a = np.zeros((nt, ns))
        a[: self.coeffs.shape[0], : self.coeffs.shape[1]] += self.coeffs
        a[: other.coeffs.shape[0], : other.coeffs.shape[1]] += other.coeffs
        return Poly2(a)

    def __sub__(self, other: "Poly2") -> "Poly2":
        return self + (other * -1.0)

    def __mul__(self, other):
        if isinstance(other, Poly2):
            if self.is_zero or other.is_zero:
                return Poly2()
            return Poly2(convolve2d(self.coeffs, other.coeffs))
        return Poly2(self.coeffs * float(other))

    __rmul__ = __mul__

    @classmethod
    def from_t(cls, p: Poly1) -> "Poly2":
        """Embed a univariate polynomial in t as a bivariate one."""
        c = np.array(p.coeffs or (0.0,), dtype=float).reshape(-1, 1)
        return cls(c)

    @classmethod
    def from_s(cls, p: Poly1) -> "Poly2":
        c = np.array(p.coeffs or (0.0,), dtype=float).reshape(1, -1)
        return cls(c)

    def to_json(self) -> dict:
        return {"coeffs": [list(row) for row in self.coeffs]}

    @classmethod
    def from_json(cls, doc: dict) -> "Poly2":
        return cls(np.array(doc["coeffs"], dtype=float))

    def __repr__(self):
        return f"Poly2(deg_t={self.deg_t}, deg_s={self.deg_s})"


def poly_scale(p: Poly1, iv: Interval) -> float:
    """Magnitude scale used to make root tolerances dimensionally sane:
    max |coefficient| times max(1, m**degree) with m the larger endpoint magnitude."""
    if p.is_zero:
        return 1.0
    m = max(abs(iv.lo), abs(iv.hi))
    return max(abs(c) for c in p.coeffs) * max(1.0, m ** p.degree)


_REFINE_WIDTH = 1e-12


def _refine_bracket(p: Poly1, dp: Poly1, lo: float, hi: float) -> float:
    """Newton refinement guarded by the sign-change bracket [lo, hi]."""
    flo = float(p(lo))
    x = 0.5 * (lo + hi)
    for _ in range(200):
        if hi - lo <= _REFINE_WIDTH:
            break
        fx = float(p(x))
        if fx == 0.0:
            return x
        # shrink the bracket
        if (fx > 0) == (flo > 0):
            lo, flo = x, fx
        else:
            hi = x
        d = float(dp(x))
        if d != 0.0:
            xn = x - fx / d
            if lo < xn < hi:
                x = xn
                continue
        x = 0.5 * (lo + hi)
    return 0.5 * (lo + hi)


def roots_in_interval(p: Poly1, iv: Interval, tol: float = 1e-9) -> list[float]:
    """All real roots of ``p`` inside ``iv`` located by sign-change bisection
    with Newton refinement.

    Simple roots bracketed by a sign change on the scan grid are always found.
    Even-multiplicity touch points are detected as local minima of |p| that dip
    below ``tol * poly_scale(p, iv)`` and are included in the result.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if p.is_zero:
        raise DegenerateInput("cannot isolate roots of the zero polynomial")
    scale = poly_scale(p, iv)
    dp = p.derivative()
    n = max(256, 64 * max(p.degree, 1))
    ts = iv.sample(n + 1)
    vs = np.asarray(p(ts))

    roots: list[float] = []
    # grid points that are exact (or numerically exact) roots
    exact = np.abs(vs) <= 1e-14 * scale
    for t in ts[exact]:
        roots.append(float(t))
    sgn = np.sign(vs)
    sgn[exact] = 0.0
    for i in range(n):
        if sgn[i] * sgn[i + 1] < 0:
            roots.append(_refine_bracket(p, dp, float(ts[i]), float(ts[i + 1])))

    # even-multiplicity candidates: interior local minima of |p| below tolerance
    absv = np.abs(vs)
    interior = np.arange(1, n)
    is_min = (absv[interior] <= absv[interior - 1]) & (absv[interior] <= absv[interior + 1])
    for i in interior[is_min]:
        if sgn[i] == 0.0 or absv[i] > tol * scale:
            continue
        # polish with a few Newton steps on p' (critical point of p)
        x = float(ts[i])
        d2 = dp.derivative() if dp.degree >= 1 else Poly1()
        for _ in range(50):
            d1v = float(dp(x))
            d2v = float(d2(x)) if not d2.is_zero else 0.0
            if d2v == 0.0:
                break
            step = d1v / d2v
            x -= step
            if abs(step) < _REFINE_WIDTH:
                break
        if iv.contains(x, slack=1e-12) and abs(float(p(x))) <= tol * scale:
            roots.append(x)

    roots.sort()
    merged: list[float] = []
    for r in roots:
        if merged and r - merged[-1] <= 2 * _REFINE_WIDTH:
            continue
        merged.append(r)
    return merged


def load_poly_json(path) -> Poly1 | Poly2:
    with open(path) as fh:
        doc = json.load(fh)
    c = doc["coeffs"]
    if c and isinstance(c[0], list):
        return Poly2.from_json(doc)
    return Poly1.from_json(doc)
