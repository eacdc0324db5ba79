"""Star/convex body calculus: radial, gauge, support, polar, volume,
L_p centroid bodies, linear images and seeded random bodies.

Representations:
  EllipsoidBody(A)        A applied to the unit ball, det A != 0
  LqBallBody(s, A)        A applied to the unit ell_s ball (cube: s = inf,
                          cross-polytope: s = 1)
  HalfspaceBody(V)        {x : <x, v_j> <= 1 for every row v_j}
  HullBody(W)             conv{+-w_j} (0-symmetric vertex hull)
  RadialBody(rule, r)     star body from radial samples on a sphere rule,
                          optionally with an anywhere-evaluable radial
  SupportBody(rule, h)    body from support samples (centroid-body output),
                          optionally with an anywhere-evaluable support

Support values for bodies that only know their radial function (and radial
values for support-only bodies) come from the polar envelope over the grid:

    h(u) = max_xi r(xi) <u, xi>,     r(u) = min_xi h(xi) / <u, xi>_+

which is exact in the limit of grid refinement for convex bodies.  When the
underlying function is evaluable at arbitrary directions the envelope is
sharpened by a shrinking local search on the sphere (the objective is
quasi-convex on the hemisphere, so the coarse argmin lands in the right
basin); this removes the O(spacing^2) grid bias that would otherwise
swamp the tight equality-case tolerances.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .constants import gamma, omega
from .quadrature import SphericalRule, sphere_rule
from .zonal import GRID_DEGREE, ZonalMoment

__all__ = [
    "ConvexBody",
    "EllipsoidBody",
    "LqBallBody",
    "HalfspaceBody",
    "HullBody",
    "RadialBody",
    "SupportBody",
    "centroid_body",
    "support_to_radial",
    "linear_image",
    "random_body",
    "body_to_json",
    "body_from_json",
]

_MIN_RADIAL = 1e-9
_REFINE_ROUNDS = 10


# ---------------------------------------------------------------------------
# spherical local search

def _tangent_frame(V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal tangent vectors at each unit row of V (n = 2 or 3)."""
    n = V.shape[1]
    if n == 2:
        t1 = np.stack([-V[:, 1], V[:, 0]], axis=1)
        return t1, np.zeros_like(t1)
    helper = np.zeros_like(V)
    small = np.abs(V[:, 0]) < 0.9
    helper[small, 0] = 1.0
    helper[~small, 1] = 1.0
    t1 = np.cross(V, helper)
    t1 /= np.linalg.norm(t1, axis=1, keepdims=True)
    t2 = np.cross(V, t1)
    return t1, t2


def _local_extremize(fn, U: np.ndarray, v0: np.ndarray, best: np.ndarray,
                     spacing: float, minimize: bool, rounds: int) -> np.ndarray:
    """Shrinking pattern search of F(v) = fn-derived objective over the
    sphere, vectorized across all query directions U.

    fn(V, U_rows) must return the objective at candidate directions V paired
    row-wise with queries; v0/best hold the incumbent argmin and value.
    """
    n = U.shape[1]
    m = U.shape[0]
    v = v0.copy()
    val = best.copy()
    step = spacing
    sign = 1.0 if minimize else -1.0
    offsets = np.array([(1.0,), (-1.0,)]) if n == 2 else np.array(
        [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0),
         (0.7071067811865476, 0.7071067811865476),
         (-0.7071067811865476, 0.7071067811865476),
         (0.7071067811865476, -0.7071067811865476),
         (-0.7071067811865476, -0.7071067811865476)])
    k = offsets.shape[0]
    for _ in range(rounds):
        t1, t2 = _tangent_frame(v)
        if n == 2:
            cands = v[None, :, :] + step * offsets[:, 0, None, None] * t1[None, :, :]
        else:
            cands = (v[None, :, :]
                     + step * offsets[:, 0, None, None] * t1[None, :, :]
                     + step * offsets[:, 1, None, None] * t2[None, :, :])
        cands = cands.reshape(k * m, n)
        cands /= np.linalg.norm(cands, axis=1, keepdims=True)
        cv = fn(cands, np.broadcast_to(U, (k, m, n)).reshape(k * m, n)).reshape(k, m)
        pick = np.argmin(sign * cv, axis=0)
        cand_val = cv[pick, np.arange(m)]
        better = (sign * cand_val) < (sign * val)
        val = np.where(better, cand_val, val)
        v = np.where(better[:, None], cands.reshape(k, m, n)[pick, np.arange(m)], v)
        step *= 0.5
    return val


def _grid_spacing(rule: SphericalRule) -> float:
    if rule.n == 2:
        return 2.0 * math.pi / rule.size
    # product/Halton rules: typical nearest-node distance
    return 2.0 * math.sqrt(math.pi / rule.size) * (2.0 if rule.n == 3 else 3.0)


def support_to_radial(rule: SphericalRule, support_values: np.ndarray,
                      directions: np.ndarray | None = None) -> np.ndarray:
    """Halfspace envelope: r(u) = min over grid xi with <u, xi> > 0 of
    h(xi)/<u, xi>.  Pure grid version; overestimates by O(spacing^2) for
    smooth bodies and is exact where the minimizing direction lies on the
    grid."""
    h = np.asarray(support_values, dtype=float)
    if np.any(h <= 0.0):
        raise ValueError("support values must be positive")
    U = rule.nodes if directions is None else np.atleast_2d(directions)
    out = np.empty(U.shape[0])
    chunk = max(1, int(2**22 // rule.size))
    for start in range(0, U.shape[0], chunk):
        blk = slice(start, start + chunk)
        dots = U[blk] @ rule.nodes.T
        ratio = np.where(dots > 1e-12, h[None, :] / np.where(dots > 1e-12, dots, 1.0), np.inf)
        out[blk] = ratio.min(axis=1)
    if not np.all(np.isfinite(out)):
        raise ValueError("empty positive cone: some direction sees no grid support")
    return out


def _support_from_radial(rule: SphericalRule, radial_values: np.ndarray,
                         directions: np.ndarray) -> np.ndarray:
    """Grid support: h(u) = max over grid xi of r(xi) <u, xi> (support of the
    inscribed polytope; underestimates by O(spacing^2))."""
    r = np.asarray(radial_values, dtype=float)
    U = np.atleast_2d(directions)
    out = np.empty(U.shape[0])
    chunk = max(1, int(2**22 // rule.size))
    for start in range(0, U.shape[0], chunk):
        blk = slice(start, start + chunk)
        out[blk] = ((U[blk] @ rule.nodes.T) * r[None, :]).max(axis=1)
    return out


def _argmin_envelope(rule, h, U):
    dots = U @ rule.nodes.T
    ratio = np.where(dots > 1e-12, h[None, :] / np.where(dots > 1e-12, dots, 1.0), np.inf)
    idx = np.argmin(ratio, axis=1)
    return rule.nodes[idx], ratio[np.arange(U.shape[0]), idx]


def _argmax_support(rule, r, U):
    prods = (U @ rule.nodes.T) * r[None, :]
    idx = np.argmax(prods, axis=1)
    return rule.nodes[idx], prods[np.arange(U.shape[0]), idx]


# ---------------------------------------------------------------------------


class ConvexBody:
    """Base class; subclasses override the closed forms they have."""

    kind = "abstract"

    def __init__(self, n: int, rule: SphericalRule | None = None):
        self.n = int(n)
        self.rule = rule if rule is not None else sphere_rule(self.n)
        self._radial_samples: np.ndarray | None = None
        self._support_samples: np.ndarray | None = None
        self._volume: float | None = None

    # -- anywhere-evaluable closed forms (None when unavailable) --
    def radial_fn(self, U: np.ndarray) -> np.ndarray | None:
        return None

    def support_fn(self, U: np.ndarray) -> np.ndarray | None:
        return None

    # -- public evaluators --
    def radial(self, U: np.ndarray) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        direct = self.radial_fn(U)
        if direct is not None:
            return direct
        h = self.support_samples()
        v0, val = _argmin_envelope(self.rule, h, U)
        if self.support_fn(U[:1]) is not None:
            hfn = self.support_fn

            def obj(V, Urows):
                dots = np.einsum("ij,ij->i", V, Urows)
                hv = hfn(V)
                return np.where(dots > 1e-12, hv / np.where(dots > 1e-12, dots, 1.0), np.inf)

            val = _local_extremize(obj, U, v0, val, _grid_spacing(self.rule), True, _REFINE_ROUNDS)
        return val

    def support(self, U: np.ndarray) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        direct = self.support_fn(U)
        if direct is not None:
            return direct
        r = self.radial_samples()
        v0, val = _argmax_support(self.rule, r, U)
        rfn = self.radial_fn
        if rfn(U[:1]) is not None:
            def obj(V, Urows):
                return rfn(V) * np.einsum("ij,ij->i", V, Urows)
            val = _local_extremize(obj, U, v0, val, _grid_spacing(self.rule), False, _REFINE_ROUNDS)
        return val

    def gauge(self, U: np.ndarray) -> np.ndarray:
        return 1.0 / self.radial(U)

    def radial_samples(self) -> np.ndarray:
        if self._radial_samples is None:
            self._radial_samples = self.radial(self.rule.nodes)
            if np.min(self._radial_samples) < _MIN_RADIAL:
                raise ValueError(f"{self.kind}: origin is not interior (min radial "
                                 f"{np.min(self._radial_samples):.3e})")
        return self._radial_samples

    def support_samples(self) -> np.ndarray:
        if self._support_samples is None:
            self._support_samples = self.support(self.rule.nodes)
        return self._support_samples

    def volume(self) -> float:
        """vol(K) = (1/n) Int r_K^n over the sphere."""
        if self._volume is None:
            r = self.radial_samples()
            self._volume = float(self.rule.weights @ r**self.n) / self.n
        return self._volume

    def polar(self) -> "ConvexBody":
        """Body with r_polar(u) = 1/h(u)."""
        h = self.support_samples()
        if np.any(h <= 0.0):
            raise ValueError("polar undefined: support vanishes in some direction")
        hfn = self.support_fn if self.support_fn(self.rule.nodes[:1]) is not None else None
        if hfn is not None:
            return RadialBody(self.rule, 1.0 / h, radial=lambda U: 1.0 / hfn(U))
        # generic: support of self at arbitrary u through the grid machinery
        return RadialBody(self.rule, 1.0 / h, radial=lambda U: 1.0 / self.support(U))

    def descriptor(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"<{self.kind} body n={self.n}>"


class EllipsoidBody(ConvexBody):
    """A @ B^n; radial, support, gauge, polar and volume all closed form."""

    kind = "ellipsoid"

    def __init__(self, A: np.ndarray, rule: SphericalRule | None = None):
        A = np.asarray(A, dtype=float)
        super().__init__(A.shape[0], rule)
        if abs(np.linalg.det(A)) < 1e-12:
            raise ValueError("ellipsoid matrix must be invertible")
        self.A = A
        self._Ainv = np.linalg.inv(A)

    def radial_fn(self, U):
        return 1.0 / np.linalg.norm(np.atleast_2d(U) @ self._Ainv.T, axis=1)

    def support_fn(self, U):
        return np.linalg.norm(np.atleast_2d(U) @ self.A, axis=1)

    def volume(self):
        return abs(np.linalg.det(self.A)) * omega(self.n)

    def polar(self):
        return EllipsoidBody(self._Ainv.T, self.rule)

    def descriptor(self):
        return {"kind": self.kind, "n": self.n, "params": {"A": self.A.tolist()},
                "level": self.rule.level}


class LqBallBody(ConvexBody):
    """A applied to the unit ell_s ball, s >= 1 (s = inf gives the cube)."""

    kind = "lq-ball"

    def __init__(self, s: float, A: np.ndarray, rule: SphericalRule | None = None):
        A = np.asarray(A, dtype=float)
        super().__init__(A.shape[0], rule)
        if s < 1.0:
            raise ValueError(f"lq-ball exponent must be >= 1, got {s!r}")
        self.s = float(s)
        self.A = A
        self._Ainv = np.linalg.inv(A)
        self._s_dual = 1.0 if math.isinf(s) else (math.inf if s == 1.0 else s / (s - 1.0))

    @staticmethod
    def _vecnorm(X, s):
        if math.isinf(s):
            return np.abs(X).max(axis=1)
        return (np.abs(X) ** s).sum(axis=1) ** (1.0 / s)

    def radial_fn(self, U):
        return 1.0 / self._vecnorm(np.atleast_2d(U) @ self._Ainv.T, self.s)

    def support_fn(self, U):
        return self._vecnorm(np.atleast_2d(U) @ self.A, self._s_dual)

    def volume(self):
        s = self.s
        unit = 2.0**self.n if math.isinf(s) else (2.0 * gamma(1.0 / s + 1.0)) ** self.n / gamma(self.n / s + 1.0)
        return abs(np.linalg.det(self.A)) * unit

    def polar(self):
        return LqBallBody(self._s_dual, self._Ainv.T, self.rule)

    def descriptor(self):
        return {"kind": self.kind, "n": self.n,
                "params": {"s": None if math.isinf(self.s) else self.s, "A": self.A.tolist()},
                "level": self.rule.level}


class HalfspaceBody(ConvexBody):
    """{x : <x, v_j> <= 1}; radial closed form, support via the grid."""

    kind = "halfspace"

    def __init__(self, normals: np.ndarray, rule: SphericalRule | None = None):
        V = np.atleast_2d(np.asarray(normals, dtype=float))
        super().__init__(V.shape[1], rule)
        self.normals = V
        slopes = self.rule.nodes @ V.T
        if np.any(slopes.max(axis=1) <= 0.0):
            raise ValueError("halfspace body is unbounded in some grid direction")

    def radial_fn(self, U):
        slopes = (np.atleast_2d(U) @ self.normals.T).max(axis=1)
        if np.any(slopes <= 0.0):
            raise ValueError("direction outside representable cone (unbounded body)")
        return 1.0 / slopes

    def descriptor(self):
        return {"kind": self.kind, "n": self.n,
                "params": {"normals": self.normals.tolist()}, "level": self.rule.level}


class HullBody(ConvexBody):
    """conv{+-w_j}; support closed form, radial via the refined envelope."""

    kind = "hull"

    def __init__(self, vertices: np.ndarray, rule: SphericalRule | None = None):
        W = np.atleast_2d(np.asarray(vertices, dtype=float))
        super().__init__(W.shape[1], rule)
        if np.linalg.matrix_rank(W) < self.n:
            raise ValueError("hull vertices do not span R^n (origin not interior)")
        self.vertices = W

    def support_fn(self, U):
        return np.abs(np.atleast_2d(U) @ self.vertices.T).max(axis=1)

    def descriptor(self):
        return {"kind": self.kind, "n": self.n,
                "params": {"vertices": self.vertices.tolist()}, "level": self.rule.level}


class RadialBody(ConvexBody):
    """Star body from radial samples; off-grid queries use the callable when
    given, else angular interpolation (n = 2) / nearest node."""

    kind = "radial"

    def __init__(self, rule: SphericalRule, values: np.ndarray, radial=None):
        super().__init__(rule.n, rule)
        values = np.asarray(values, dtype=float)
        if values.shape != (rule.size,):
            raise ValueError("radial sample count does not match the rule")
        if np.min(values) < _MIN_RADIAL:
            raise ValueError("origin is not interior (non-positive radial sample)")
        self._vals = values
        self._radial_callable = radial
        self._radial_samples = values

    def radial_fn(self, U):
        U = np.atleast_2d(U)
        if self._radial_callable is not None:
            return np.asarray(self._radial_callable(U), dtype=float)
        if self.n == 2:
            theta = np.mod(np.arctan2(U[:, 1], U[:, 0]), 2.0 * math.pi)
            m = self.rule.size
            pos = theta / (2.0 * math.pi) * m
            i0 = np.floor(pos).astype(int) % m
            frac = pos - np.floor(pos)
            return (1.0 - frac) * self._vals[i0] + frac * self._vals[(i0 + 1) % m]
        idx = np.argmax(U @ self.rule.nodes.T, axis=1)
        return self._vals[idx]

    def descriptor(self):
        return {"kind": self.kind, "n": self.n,
                "params": {"values": self._vals.tolist()}, "level": self.rule.level}


class SupportBody(ConvexBody):
    """Body known through support samples plus (optionally) an
    anywhere-evaluable support callable; radial via the refined envelope."""

    kind = "support"

    def __init__(self, rule: SphericalRule, values: np.ndarray, support=None):
        super().__init__(rule.n, rule)
        values = np.asarray(values, dtype=float)
        if values.shape != (rule.size,):
            raise ValueError("support sample count does not match the rule")
        if np.min(values) <= 0.0:
            raise ValueError("support samples must be positive")
        self._vals = values
        self._support_callable = support
        self._support_samples = values

    def support_fn(self, U):
        U = np.atleast_2d(U)
        if self._support_callable is not None:
            return np.asarray(self._support_callable(U), dtype=float)
        return None

    def support(self, U):
        U = np.atleast_2d(np.asarray(U, dtype=float))
        direct = self.support_fn(U)
        if direct is not None:
            return direct
        # support samples only: treat them as exact on-grid, interpolate off-grid
        if self.n == 2:
            theta = np.mod(np.arctan2(U[:, 1], U[:, 0]), 2.0 * math.pi)
            m = self.rule.size
            pos = theta / (2.0 * math.pi) * m
            i0 = np.floor(pos).astype(int) % m
            frac = pos - np.floor(pos)
            return (1.0 - frac) * self._vals[i0] + frac * self._vals[(i0 + 1) % m]
        idx = np.argmax(U @ self.rule.nodes.T, axis=1)
        return self._vals[idx]

    def descriptor(self):
        return {"kind": self.kind, "n": self.n,
                "params": {"values": self._vals.tolist()}, "level": self.rule.level}


# ---------------------------------------------------------------------------
# operations


def centroid_body(K: ConvexBody, p: float, rule: SphericalRule | None = None,
                  max_degree: int | None = None) -> SupportBody:
    """L_p centroid body, normalized so the unit ball is fixed:

        h^p(v) = (1 / (a1 vol(K))) Int_K |<v, y>|^p dy
               = (1 / (a1 vol(K) (n+p))) Int r_K^{n+p}(xi) |<v, xi>|^p dxi.
    """
    if p < 1.0:
        raise ValueError(f"centroid body needs p >= 1, got {p!r}")
    rule = rule or K.rule
    n = K.n
    r = K.radial(rule.nodes) if rule is not K.rule else K.radial_samples()
    vol = K.volume()
    a1 = omega(n + p) / (omega(2) * omega(n) * omega(p - 1.0))
    masses = rule.weights * r ** (n + p)
    moment = ZonalMoment(rule.nodes, masses, p,
                         max_degree=max_degree if max_degree is not None else
                         min(GRID_DEGREE, max(2, rule.level - 1)))
    scale = 1.0 / (a1 * vol * (n + p))

    def h_fn(V):
        return (scale * moment(V)) ** (1.0 / p)

    return SupportBody(rule, h_fn(rule.nodes), support=h_fn)


def linear_image(K: ConvexBody, A: np.ndarray) -> ConvexBody:
    """Body A K; h_{AK}(u) = h_K(A^T u), vol(AK) = |det A| vol(K)."""
    A = np.asarray(A, dtype=float)
    if abs(np.linalg.det(A)) < 1e-12:
        raise ValueError("linear image requires an invertible matrix")
    if isinstance(K, EllipsoidBody):
        return EllipsoidBody(A @ K.A, K.rule)
    if isinstance(K, LqBallBody):
        return LqBallBody(K.s, A @ K.A, K.rule)
    if isinstance(K, HalfspaceBody):
        return HalfspaceBody(K.normals @ np.linalg.inv(A), K.rule)
    if isinstance(K, HullBody):
        return HullBody(K.vertices @ A.T, K.rule)
    Ainv = np.linalg.inv(A)

    def radial(U, K=K, Ainv=Ainv):
        U = np.atleast_2d(U)
        back = U @ Ainv.T
        norms = np.linalg.norm(back, axis=1)
        return K.radial(back / norms[:, None]) / norms

    return RadialBody(K.rule, radial(K.rule.nodes), radial=radial)


def random_body(seed: int, kind: str, n: int, count: int = 8,
                rule: SphericalRule | None = None) -> ConvexBody:
    """Reproducible random body.

    halfspace: count random unit normals plus +-e_i slabs (bounded by
    construction); hull: symmetric hull of count Gaussian points;
    ellipsoid: QR orthogonal times positive diagonal, det normalized to 1.
    """
    rng = np.random.default_rng(seed)
    if kind == "halfspace":
        normals = rng.standard_normal((count, n))
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        slabs = np.concatenate([np.eye(n), -np.eye(n)], axis=0)
        return HalfspaceBody(np.concatenate([normals, slabs], axis=0), rule)
    if kind == "hull":
        count = max(count, n + 1)
        pts = rng.standard_normal((count, n)) + 0.3
        return HullBody(pts, rule)
    if kind == "ellipsoid":
        M = rng.standard_normal((n, n))
        Q, _ = np.linalg.qr(M)
        d = np.exp(rng.uniform(-0.6, 0.6, size=n))
        A = Q @ np.diag(d)
        A /= abs(np.linalg.det(A)) ** (1.0 / n)
        return EllipsoidBody(A, rule)
    raise ValueError(f"unknown random body kind {kind!r}")


# ---------------------------------------------------------------------------
# JSON round-trip


def body_to_json(K: ConvexBody) -> str:
    return json.dumps(K.descriptor())


def body_from_json(doc: str | dict, rule: SphericalRule | None = None) -> ConvexBody:
    d = json.loads(doc) if isinstance(doc, str) else doc
    kind = d["kind"]
    n = int(d["n"])
    level = d.get("level")
    if rule is None:
        rule = sphere_rule(n, level) if level else sphere_rule(n)
    params = d.get("params", {})
    if kind == "ellipsoid":
        return EllipsoidBody(np.array(params["A"], dtype=float), rule)
    if kind == "lq-ball":
        s = params.get("s")
        return LqBallBody(math.inf if s is None else float(s),
                          np.array(params["A"], dtype=float), rule)
    if kind == "halfspace":
        return HalfspaceBody(np.array(params["normals"], dtype=float), rule)
    if kind == "hull":
        return HullBody(np.array(params["vertices"], dtype=float), rule)
    if kind == "radial":
        return RadialBody(rule, np.array(params["values"], dtype=float))
    if kind == "support":
        return SupportBody(rule, np.array(params["values"], dtype=float))
    if kind == "ball":
        return EllipsoidBody(np.eye(n) * float(params.get("radius", 1.0)), rule)
    raise ValueError(f"unknown body kind {kind!r}")
