"""Polynomialize the spun trefoil: replace cos/sin by Chebyshev interpolants,
fit a bivariate Bernstein surface, and build the odd-degree perturbation
family that keeps the polynomial model embedded.

Run from the repository root:  python3 demos/03_polynomialize.py
"""

import numpy as np

import spun4d

arc = spun4d.get_knot("trefoil_spun")
exact = spun4d.spin(arc)

# Chebyshev route: exact in (f, g), degree-d interpolants of cos/sin in theta.
for d in (8, 12, 16):
    poly = spun4d.polynomial_spin(arc, d)
    dev = spun4d.max_grid_deviation(exact, poly)
    print(f"Chebyshev degree {d:2d}: max deviation {dev:.3e}")

# Bernstein route: uniform-lattice tensor fit on the rescaled domain.
# Convergence is slow (Weierstrass-style) but unconditional.
for d in (10, 20, 40):
    lat = -1.0 + 2.0 * np.arange(d + 1) / d
    tv = exact.t_dom.mid + 0.5 * exact.t_dom.length * lat
    sv = exact.s_dom.mid + 0.5 * exact.s_dom.length * lat
    polys = spun4d.bernstein_fit2(exact.eval_grid(tv, sv), d)
    te = np.linspace(-1, 1, 100)
    T, S = np.meshgrid(te, te, indexing="ij")
    truth = exact.eval_grid(exact.t_dom.mid + 0.5 * exact.t_dom.length * te,
                            exact.s_dom.mid + 0.5 * exact.s_dom.length * te)
    fit = np.stack([p(T, S) for p in polys], axis=-1)
    print(f"Bernstein degree {d:2d}: max deviation "
          f"{np.max(np.linalg.norm(fit - truth, axis=-1)):.3e}")

# Perturbation family: adding eps * (t^(2N+1), s^(2N+1)) to the last two
# coordinates separates any residual coincidences while staying isotopic.
poly8 = spun4d.polynomial_spin(arc, 8)
spec, perturbed = spun4d.odd_perturbation(poly8.polys, 2, [])
print(f"perturbation: N={spec.N}, eps={spec.epsilon}")
ok = spun4d.isotopy_family_check(poly8, spec, [0.0, 0.25, 0.5, 0.75, 1.0])
print(f"family embedded for u in 0..1: {ok}")
