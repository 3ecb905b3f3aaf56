import math

import numpy as np
import pytest

from spun4d.poly import Interval, Poly1, Poly2, load_poly_json, poly_scale, roots_in_interval


def test_interval_basics():
    iv = Interval(-2.0, 3.0)
    assert iv.length == 5.0
    assert iv.mid == 0.5
    assert iv.contains(3.0) and iv.contains(-2.0)
    assert not iv.contains(3.0001)
    assert iv.contains(3.0001, slack=1e-3)
    s = iv.sample(11)
    assert s[0] == -2.0 and s[-1] == 3.0 and len(s) == 11


def test_interval_reversed_raises():
    with pytest.raises(ValueError):
        Interval(2.0, 1.0)


def test_poly1_eval_horner_matches_numpy():
    rng = np.random.default_rng(0)
    c = rng.normal(size=7)
    p = Poly1(tuple(c))
    t = rng.normal(size=50) * 3
    assert np.allclose(p(t), np.polynomial.polynomial.polyval(t, c))


def test_poly1_trim_and_degree():
    p = Poly1((1.0, 2.0, 0.0, 0.0))
    assert p.degree == 1
    assert Poly1(()).is_zero
    assert Poly1((0.0, 0.0)).is_zero


def test_poly1_arithmetic():
    p = Poly1((1.0, 0.0, 1.0))     # 1 + t^2
    q = Poly1((0.0, 2.0))          # 2t
    assert (p + q).coeffs == (1.0, 2.0, 1.0)
    assert (p - q).coeffs == (1.0, -2.0, 1.0)
    assert (p * q).coeffs == (0.0, 2.0, 0.0, 2.0)
    assert (-q).coeffs == (0.0, -2.0)
    assert (p * 3.0).coeffs == (3.0, 0.0, 3.0)


def test_poly1_derivative_integral_inverse():
    p = Poly1((2.0, -1.0, 0.5, 4.0))
    back = p.integral().derivative()
    assert np.allclose(back.coeffs, p.coeffs)
    assert p.derivative().coeffs == (-1.0, 1.0, 12.0)


def test_poly1_json_roundtrip():
    p = Poly1((1.5, 0.0, -2.0))
    assert Poly1.from_json(p.to_json()) == p


def test_poly2_eval_and_partials():
    # q(t, s) = 1 + 2 t + 3 s + 4 t s + 5 t^2 s
    C = np.array([[1.0, 3.0], [2.0, 4.0], [0.0, 5.0]])
    q = Poly2(C)
    t, s = 0.7, -1.3
    expect = 1 + 2 * t + 3 * s + 4 * t * s + 5 * t * t * s
    assert math.isclose(q(t, s), expect, rel_tol=1e-14)
    dt = q.partial("t")
    ds = q.partial("s")
    assert math.isclose(dt(t, s), 2 + 4 * s + 10 * t * s, rel_tol=1e-13)
    assert math.isclose(ds(t, s), 3 + 4 * t + 5 * t * t, rel_tol=1e-13)


def test_poly2_product_matches_pointwise():
    rng = np.random.default_rng(1)
    a = Poly2(rng.normal(size=(3, 2)))
    b = Poly2(rng.normal(size=(2, 4)))
    t = rng.normal(size=20)
    s = rng.normal(size=20)
    assert np.allclose((a * b)(t, s), a(t, s) * b(t, s))


def test_poly2_from_t_from_s():
    p = Poly1((1.0, 2.0, 3.0))
    t = np.linspace(-2, 2, 9)
    s = np.linspace(0, 5, 9)
    assert np.allclose(Poly2.from_t(p)(t, s), p(t))
    assert np.allclose(Poly2.from_s(p)(t, s), p(s))


def test_poly_scale_bounds_values():
    p = Poly1((3.0, 0.0, -1.0, 0.0, 2.0))
    iv = Interval(-2.5, 2.5)
    bound = poly_scale(p, iv)
    t = iv.sample(500)
    assert np.max(np.abs(p(t))) <= bound + 1e-12


def test_roots_in_interval_against_numpy():
    # (t - 0.3)(t + 1.2)(t - 2.0) expanded, roots well separated
    r = np.array([0.3, -1.2, 2.0])
    c = np.polynomial.polynomial.polyfromroots(r)
    got = roots_in_interval(Poly1(tuple(c)), Interval(-3, 3))
    assert np.allclose(sorted(got), sorted(r), atol=1e-9)


def test_roots_in_interval_subset():
    r = np.array([-2.0, -0.5, 0.5, 2.0])
    c = np.polynomial.polynomial.polyfromroots(r)
    got = roots_in_interval(Poly1(tuple(c)), Interval(-1, 1))
    assert np.allclose(got, [-0.5, 0.5], atol=1e-9)


def test_roots_in_interval_even_touch():
    # (t - 1)^2 touches zero without sign change
    p = Poly1((1.0, -2.0, 1.0))
    got = roots_in_interval(p, Interval(0, 2))
    assert np.allclose(got, [1.0], atol=1e-6)


def test_roots_trefoil_heights_analytic():
    # -t^4 + 4 t^2 + 3 vanishes at t^2 = 2 + sqrt(7)
    h = Poly1((3.0, 0.0, 4.0, 0.0, -1.0))
    expect = math.sqrt(2.0 + math.sqrt(7.0))
    got = roots_in_interval(h, Interval(-5, 5))
    assert np.allclose(got, [-expect, expect], atol=1e-9)
    # -t^4 + 4 t^2 + 16 vanishes at t^2 = 2 + sqrt(20)
    h2 = Poly1((16.0, 0.0, 4.0, 0.0, -1.0))
    expect2 = math.sqrt(2.0 + math.sqrt(20.0))
    got2 = roots_in_interval(h2, Interval(-5, 5))
    assert np.allclose(got2, [-expect2, expect2], atol=1e-9)


def test_load_poly_json(tmp_path):
    path = tmp_path / "p.json"
    path.write_text('{"coeffs": [1.0, 0.0, -1.0]}')
    p = load_poly_json(str(path))
    assert p.coeffs == (1.0, 0.0, -1.0)
