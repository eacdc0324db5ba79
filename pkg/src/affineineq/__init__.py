"""Numerical toolkit for sharp affine Sobolev-type inequalities.

Library layers:

- constants: every closed-form scalar (omega_k, a1, a2, ell_q, c_np, L_np,
  S_np, k_n, GN family), self-contained Gamma.
- quadrature: deterministic rules on the sphere S^{n-1} and on R^n.
- bodies: star/convex body calculus (radial, support, polar, volume,
  Lp centroid body, linear images, seeded random bodies).
- functions: closed-form test function families with analytic gradients.
- functionals: Z_p / E_p affine energy, the bodies L_f and K_f, homogeneous
  convex conjugation and the lemma identity checks.
- inequalities: one deficit evaluation path per inequality, each returning a
  structured DeficitReport.
- cli: batch front end (verify / deficit / sweep / body).
"""

from .constants import ConstantSet, GNConstantSet, constants_for, gamma, gentil_constant, gn_constants_for, omega

__all__ = [
    "ConstantSet",
    "GNConstantSet",
    "constants_for",
    "gamma",
    "gentil_constant",
    "gn_constants_for",
    "omega",
]

__version__ = "0.1.0"
