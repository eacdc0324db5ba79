"""Closed-form scalar constants for the affine inequality suite.

Everything here is an exact formula in n, p and Gamma-function values: unit
ball volumes (real index allowed), the centroid-body normalizer a1, the
duality constant a2, the conjugate-maximum ell_q, the directional constant
c_np, the log-Sobolev constant L_np, the Sobolev constant S_np (only for
p < n), the L-infinity constant k_n, and the Gagliardo-Nirenberg family
(sigma_alpha_p, c1, c2, G_npa, theta).

The Gamma function is self-contained (fixed Lanczos coefficients, positive
arguments only) so the constant layer has no external numerical dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "gamma",
    "log_gamma",
    "omega",
    "ell_q_of",
    "ConstantSet",
    "GNConstantSet",
    "constants_for",
    "gn_constants_for",
    "gentil_constant",
]

# Lanczos approximation, g = 7, 9 terms.  Relative error < 1e-13 across the
# positive axis, comfortably inside the 1e-12 target on [0.5, 50].
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _lanczos_series(x: float) -> float:
    s = _LANCZOS_C[0]
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        s += c / (x + i)
    return s


def gamma(x: float) -> float:
    """Gamma(x) for real x > 0.

    Raises ValueError for x <= 0; the reflection branch is deliberately not
    implemented because no formula in this package evaluates Gamma off the
    positive axis.
    """
    if not (x > 0.0):
        raise ValueError(f"gamma requires a positive argument, got {x!r}")
    if x < 0.5:
        # One recursion step keeps the Lanczos core on its accurate range.
        return gamma(x + 1.0) / x
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * _lanczos_series(z)


def log_gamma(x: float) -> float:
    """log Gamma(x) for real x > 0, same Lanczos core as gamma()."""
    if not (x > 0.0):
        raise ValueError(f"log_gamma requires a positive argument, got {x!r}")
    if x < 0.5:
        return log_gamma(x + 1.0) - math.log(x)
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return 0.5 * math.log(2.0 * math.pi) + (z + 0.5) * math.log(t) - t + math.log(_lanczos_series(z))


def omega(k: float) -> float:
    """Volume of the unit ball in R^k, extended to real index k >= 0.

    omega(k) = pi^(k/2) / Gamma(k/2 + 1).  Fractional indices appear through
    a1 and c_np (omega_{p-1}, omega_{n+p-2}, omega_{n+p}).
    """
    if k < 0.0:
        raise ValueError(f"omega requires k >= 0, got {k!r}")
    return math.pi ** (k / 2.0) / gamma(k / 2.0 + 1.0)


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def ell_q_of(q: float) -> float:
    """ell_q = q^(-p/q) / p where p is the conjugate of q (max of t^(1/q) - t)."""
    if not (q > 1.0):
        raise ValueError(f"ell_q_of requires q > 1, got {q!r}")
    p = q / (q - 1.0)
    return q ** (-p / q) / p


@dataclass(frozen=True)
class ConstantSet:
    """All closed-form scalars for a fixed (n, p), p > 1.

    S_np is only defined for 1 < p < n and is None otherwise.
    """

    n: int
    p: float
    q: float
    omega: dict[float, float] = field(repr=False)
    a1: float
    a2: float
    ell_q: float
    c_np: float
    L_np: float
    k_n: float
    c_n_inf: float
    S_np: float | None

    def omega_k(self, k: float) -> float:
        v = self.omega.get(float(k))
        return omega(k) if v is None else v


def constants_for(n: int, p: float) -> ConstantSet:
    """Populate every constant for dimension n >= 1 and exponent p > 1."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n!r}")
    n = int(n)
    p = float(p)
    if not (p > 1.0):
        raise ValueError(f"p must be > 1, got {p!r}")
    q = p / (p - 1.0)

    needed = {float(k) for k in range(0, n + 1)}
    needed.update({2.0, float(p - 1.0), float(n + p - 2.0), float(n + p)})
    om = {k: omega(k) for k in sorted(needed)}

    w_n = om[float(n)]
    a1 = om[float(n + p)] / (om[2.0] * w_n * om[float(p - 1.0)])
    lq = ell_q_of(q)
    a2 = lq * n ** ((n + p) / n) / (a1 * (n + p))
    c_np = (n * w_n) ** (1.0 / n) * (n * w_n * om[float(p - 1.0)] / (2.0 * om[float(n + p - 2.0)])) ** (1.0 / p)
    c_n_inf = (n * w_n) ** (1.0 / n)
    L_np = (
        (p / n)
        * ((p - 1.0) / math.e) ** (p - 1.0)
        * math.pi ** (-p / 2.0)
        * (gamma(n / 2.0 + 1.0) / gamma(n * (p - 1.0) / p + 1.0)) ** (p / n)
    )
    k_n = (1.0 / (gamma(n + 1.0) * w_n)) ** (1.0 / n)

    S_np = None
    if p < n:
        S_np = (
            math.pi ** (-0.5)
            * n ** (-1.0 / p)
            * ((p - 1.0) / (n - p)) ** (1.0 - 1.0 / p)
            * (gamma(n / 2.0 + 1.0) * gamma(float(n)) / (gamma(n - n / p + 1.0) * gamma(n / p))) ** (1.0 / n)
        )

    return ConstantSet(
        n=n, p=p, q=q, omega=om, a1=a1, a2=a2, ell_q=lq,
        c_np=c_np, L_np=L_np, k_n=k_n, c_n_inf=c_n_inf, S_np=S_np,
    )


@dataclass(frozen=True)
class GNConstantSet:
    """Gagliardo-Nirenberg family constants for r = alpha*p, m = alpha*(p-1)+1.

    sigma_alpha_p normalizes the profile (sigma + (alpha-1)*C(x))^(1/(1-alpha))
    to unit r-norm for the Euclidean reference C(x) = |x|^q / q; c1 is defined
    operationally as the vol-independent factor of the product formula for the
    inverse sharp constant, c2 = a2^(1/p) / (c1 * c_np), and G_npa = c2^theta.
    """

    n: int
    p: float
    alpha: float
    m: float
    r: float
    theta: float
    sigma_alpha_p: float
    c1: float
    c2: float
    G_npa: float


def gn_constants_for(n: int, p: float, alpha: float) -> GNConstantSet:
    """GN constants for 1 < p < n and 1 < alpha < n/(n-p)."""
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    n = int(n)
    p = float(p)
    alpha = float(alpha)
    if not (1.0 < p < n):
        raise ValueError(f"gn constants need 1 < p < n, got p={p!r}, n={n}")
    if not (1.0 < alpha < n / (n - p)):
        raise ValueError(f"alpha must lie in (1, n/(n-p)) = (1, {n / (n - p)}), got {alpha!r}")

    q = p / (p - 1.0)
    m = alpha * (p - 1.0) + 1.0
    r = alpha * p
    theta = n * p * (r - m) / (r * (m * (p - n) + n * p))
    if not (0.0 < theta < 1.0):
        raise ValueError(f"theta={theta!r} outside (0,1); parameters inconsistent")

    phi = p * alpha / (alpha - 1.0)
    # Unit sublevel volume of the Euclidean reference C(x) = |x|^q / q.
    # Assembled in log space: phi blows up as alpha -> 1+ and the individual
    # Gamma values overflow long before the ratio does.
    vol_c = omega(n) * q ** (n / q)
    log_inner = (
        math.log(q)
        + (n / q) * math.log(alpha - 1.0)
        + log_gamma(phi)
        - math.log(n * vol_c)
        - log_gamma(n / q)
        - log_gamma(phi - n / q)
    )
    sigma = math.exp(log_inner * (-(1.0 - alpha) * q / (alpha * n - n - alpha * p * q)))

    # Product formula for (inverse constant)^theta with the sublevel volume
    # divided out; assembled in log space to dodge large Gamma values.
    log_c1_theta = (
        -theta * math.log(alpha - 1.0)
        + (theta / p) * math.log(n / p)
        - (1.0 / (alpha * p)) * log_gamma(n * (1.0 / p - 1.0) + phi)
        + theta * ((phi - 1.0) / n - 1.0) * log_gamma(phi)
        + (theta + alpha * theta * p / (n - alpha * n)) * log_gamma(phi - 1.0)
        + theta * (alpha * p / ((alpha - 1.0) * n) + 1.0 / p - 1.0) * log_gamma(n * (1.0 / p - 1.0) + phi - 1.0)
        + (theta / n) * log_gamma(n - n / p + 1.0)
    )

    consts = constants_for(n, p)
    # G_npa = (a2^(1/p) / (c1 c_np))^theta stays finite toward alpha -> 1+
    # even where c1 itself overflows, so it is built from log_c1_theta.
    log_G = theta * (math.log(consts.a2) / p - math.log(consts.c_np)) - log_c1_theta
    return GNConstantSet(
        n=n, p=p, alpha=alpha, m=m, r=r, theta=theta,
        sigma_alpha_p=sigma,
        c1=_safe_exp(log_c1_theta / theta),
        c2=_safe_exp(math.log(consts.a2) / p - math.log(consts.c_np) - log_c1_theta / theta),
        G_npa=math.exp(log_G),
    )


def gn_c2_direct(n: int, p: float, alpha: float) -> float:
    """The explicit single formula for c2, kept as a cross-check of the
    product route used in gn_constants_for."""
    n = int(n)
    p = float(p)
    alpha = float(alpha)
    q = p / (p - 1.0)
    phi = p * alpha / (alpha - 1.0)
    num = (
        (alpha - 1.0) ** 2
        * p
        * q ** (-1.0 / q)
        * n ** (-1.0 / p)
        * (phi - 1.0) ** ((alpha * n - n - alpha * p) / ((alpha - 1.0) * n))
        * (n * (1.0 / p - 1.0) + phi - 1.0) ** ((alpha * n - n + alpha * p * p) / ((alpha - 1.0) * n * p))
    )
    den = math.sqrt(math.pi) * ((p - 1.0) * (-alpha * n + n + alpha * p) + p)
    log_gam = -(1.0 / n) * (
        log_gamma(-n / p + n + 1.0) + log_gamma(n * (1.0 / p - 1.0) + phi)
        - log_gamma(n / 2.0 + 1.0) - log_gamma(phi)
    )
    return num / den * math.exp(log_gam)


def gentil_constant(n: int, p: float, expC_integral: float) -> float:
    """Sharp constant p^(p+1) / (n e^(p-1) (int e^-C)^(p/n)) of the
    norm-generalized log-Sobolev inequality."""
    if not (expC_integral > 0.0):
        raise ValueError(f"expC_integral must be > 0, got {expC_integral!r}")
    return p ** (p + 1.0) / (n * math.e ** (p - 1.0) * expC_integral ** (p / float(n)))
