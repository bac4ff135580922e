"""Knot vectors, B-spline/NURBS basis evaluation and tensor-product surfaces.

Open (clamped) knot vectors without repeated interior knots, basis function
values with derivatives up to second order, rational surface evaluation via
homogeneous coordinates, and geometry-preserving refinement by knot insertion.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True, eq=False)
class KnotVector:
    """Open knot vector with simple interior knots.

    ``n_basis = len(knots) - degree - 1`` basis functions are defined; the
    first and last knot must each repeat exactly ``degree + 1`` times.
    """

    knots: np.ndarray
    degree: int

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        knots.flags.writeable = False
        object.__setattr__(self, "knots", knots)
        p = self.degree
        if p < 0:
            raise ValueError(f"degree must be nonnegative, got {p}")
        if np.any(np.diff(knots) < 0.0):
            raise ValueError("knots must be nondecreasing")
        n = len(knots) - p - 1
        if n < p + 1:
            raise ValueError(f"need at least {2 * (p + 1)} knots for degree {p}")
        if np.any(knots[: p + 1] != knots[0]) or np.any(knots[-(p + 1):] != knots[-1]):
            raise ValueError("knot vector must be open (clamped)")
        interior = knots[p + 1 : n]
        if interior.size and (np.any(np.diff(interior) == 0.0)
                              or np.any(interior == knots[0])
                              or np.any(interior == knots[-1])):
            raise ValueError("interior knots must be simple")

    @property
    def n_basis(self) -> int:
        return len(self.knots) - self.degree - 1

    @property
    def start(self) -> float:
        return float(self.knots[0])

    @property
    def end(self) -> float:
        return float(self.knots[-1])

    def spans(self) -> np.ndarray:
        """Indices i of the nonempty spans [knots[i], knots[i+1])."""
        k = self.knots
        return np.array([i for i in range(self.degree, self.n_basis)
                         if k[i + 1] > k[i]], dtype=int)


def find_span(kv: KnotVector, theta: float) -> int:
    """Return i with knots[i] <= theta < knots[i+1].

    The right endpoint maps to the last nonempty span so that boundary
    points remain evaluable.
    """
    k, p, n = kv.knots, kv.degree, kv.n_basis
    if theta < k[0] or theta > k[-1]:
        raise DomainError(f"parameter {theta} outside knot range [{k[0]}, {k[-1]}]")
    if theta >= k[n]:
        return n - 1
    # binary search over the open range
    lo, hi = p, n
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if theta < k[mid]:
            hi = mid
        else:
            lo = mid
    return lo


def basis_ders(kv: KnotVector, theta: float, order: int = 0) -> np.ndarray:
    """Nonzero B-spline values and derivatives at ``theta``.

    Returns an array of shape (order+1, degree+1): row d holds the d-th
    derivatives of the degree+1 functions N_{span-p}..N_{span} supported on
    the containing span.  Standard knot-difference recurrence, evaluated
    before any rationalization by weights.
    """
    if order > 2:
        raise ValueError(f"derivative order {order} unsupported (max 2)")
    span = find_span(kv, theta)
    return _basis_ders_at_span(kv.knots, kv.degree, span, theta, order)


def _basis_ders_at_span(knots, p, span, theta, order):
    left = np.empty(p + 1)
    right = np.empty(p + 1)
    ndu = np.ones((p + 1, p + 1))
    for j in range(1, p + 1):
        left[j] = theta - knots[span + 1 - j]
        right[j] = knots[span + j] - theta
        saved = 0.0
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved

    nders = min(order, p)
    ders = np.zeros((order + 1, p + 1))
    ders[0, :] = ndu[:, p]

    a = np.ones((2, p + 1))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for k in range(1, nders + 1):
            d = 0.0
            rk, pk = r - k, p - k
            if r >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                d += a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, r]
                d += a[s2, k] * ndu[r, pk]
            ders[k, r] = d
            s1, s2 = s2, s1

    fac = float(p)
    for k in range(1, nders + 1):
        ders[k, :] *= fac
        fac *= p - k
    return ders


@dataclass(frozen=True, eq=False)
class NurbsSurface:
    """Rational tensor-product surface with a weighted control net.

    ``ctrl`` has shape (n_u, n_v, 3) in length units and ``weights``
    (n_u, n_v), all strictly positive.
    """

    kv_u: KnotVector
    kv_v: KnotVector
    ctrl: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        ctrl = np.asarray(self.ctrl, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        nu, nv = self.kv_u.n_basis, self.kv_v.n_basis
        if ctrl.shape != (nu, nv, 3):
            raise ValueError(f"control grid shape {ctrl.shape} != {(nu, nv, 3)}")
        if w.shape != (nu, nv):
            raise ValueError(f"weight grid shape {w.shape} != {(nu, nv)}")
        if np.any(w <= 0.0):
            raise ValueError("all weights must be strictly positive")
        ctrl.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "ctrl", ctrl)
        object.__setattr__(self, "weights", w)

    @property
    def shape(self) -> tuple[int, int]:
        return self.kv_u.n_basis, self.kv_v.n_basis

    @property
    def n_cp(self) -> int:
        nu, nv = self.shape
        return nu * nv

    def homogeneous(self) -> np.ndarray:
        """Control net in projective form (wx, wy, wz, w), shape (n_u, n_v, 4)."""
        h = np.empty(self.shape + (4,))
        h[..., :3] = self.ctrl * self.weights[..., None]
        h[..., 3] = self.weights
        return h


@dataclass(frozen=True, eq=False)
class BasisEval:
    """Rational basis values and derivatives on one element.

    Arrays hold the (p_u+1)(p_v+1) functions supported on the containing
    spans, u-major, with derivative component order (11, 22, 12).
    """

    span_u: int
    span_v: int
    N: np.ndarray
    N1: np.ndarray
    N2: np.ndarray
    N11: np.ndarray
    N22: np.ndarray
    N12: np.ndarray


def _tensor_homogeneous(surface, t1, t2, order):
    """Homogeneous sums S = sum_A B_A(theta) * (w_A P_A, w_A) and derivatives."""
    du = basis_ders(surface.kv_u, t1, order)
    dv = basis_ders(surface.kv_v, t2, order)
    su, sv = find_span(surface.kv_u, t1), find_span(surface.kv_v, t2)
    pu, pv = surface.kv_u.degree, surface.kv_v.degree
    h = surface.homogeneous()[su - pu: su + 1, sv - pv: sv + 1]  # (pu+1, pv+1, 4)

    def S(d1, d2):
        return np.einsum("i,j,ijc->c", du[d1], dv[d2], h)

    out = {(0, 0): S(0, 0)}
    if order >= 1:
        out[(1, 0)] = S(1, 0)
        out[(0, 1)] = S(0, 1)
    if order >= 2:
        out[(2, 0)] = S(2, 0)
        out[(1, 1)] = S(1, 1)
        out[(0, 2)] = S(0, 2)
    return out, (su, sv), (du, dv)


def surface_eval(surface: NurbsSurface, t1: float, t2: float, order: int = 2):
    """Evaluate position and parametric derivatives of the surface.

    Returns (r,) for order 0, (r, r1, r2) for order 1 and
    (r, r1, r2, r11, r22, r12) for order 2.  Derivatives of the rational
    map are obtained by quotient-rule expansion of the homogeneous form.
    """
    if order > 2:
        raise ValueError(f"derivative order {order} unsupported (max 2)")
    S, _, _ = _tensor_homogeneous(surface, t1, t2, order)
    return _project(S, order)


def _project(S, order):
    w = S[(0, 0)][3]
    r = S[(0, 0)][:3] / w
    if order == 0:
        return (r,)
    w1, w2 = S[(1, 0)][3], S[(0, 1)][3]
    r1 = (S[(1, 0)][:3] - w1 * r) / w
    r2 = (S[(0, 1)][:3] - w2 * r) / w
    if order == 1:
        return (r, r1, r2)
    w11, w22, w12 = S[(2, 0)][3], S[(0, 2)][3], S[(1, 1)][3]
    r11 = (S[(2, 0)][:3] - w11 * r - 2.0 * w1 * r1) / w
    r22 = (S[(0, 2)][:3] - w22 * r - 2.0 * w2 * r2) / w
    r12 = (S[(1, 1)][:3] - w12 * r - w1 * r2 - w2 * r1) / w
    return (r, r1, r2, r11, r22, r12)


def basis_eval(surface: NurbsSurface, t1: float, t2: float) -> BasisEval:
    """Rational basis functions with first and second partials at a point."""
    S, (su, sv), (du, dv) = _tensor_homogeneous(surface, t1, t2, 2)
    pu, pv = surface.kv_u.degree, surface.kv_v.degree
    wgrid = surface.weights[su - pu: su + 1, sv - pv: sv + 1]

    W = S[(0, 0)][3]
    W1, W2 = S[(1, 0)][3], S[(0, 1)][3]
    W11, W22, W12 = S[(2, 0)][3], S[(0, 2)][3], S[(1, 1)][3]

    def B(d1, d2):
        return np.outer(du[d1], dv[d2]) * wgrid  # weighted tensor B-spline

    N = B(0, 0) / W
    N1 = (B(1, 0) - N * W1) / W
    N2 = (B(0, 1) - N * W2) / W
    N11 = (B(2, 0) - 2.0 * N1 * W1 - N * W11) / W
    N22 = (B(0, 2) - 2.0 * N2 * W2 - N * W22) / W
    N12 = (B(1, 1) - N1 * W2 - N2 * W1 - N * W12) / W
    return BasisEval(su, sv, N.ravel(), N1.ravel(), N2.ravel(),
                     N11.ravel(), N22.ravel(), N12.ravel())


# ---------------------------------------------------------------------------
# Knot insertion
# ---------------------------------------------------------------------------

def _insert_knot_1d(knots, p, grid_h, ubar, axis):
    """Insert ubar once along the given grid axis, in homogeneous coordinates."""
    n = len(knots) - p - 1
    k = int(np.searchsorted(knots, ubar, side="right") - 1)
    k = min(max(k, p), n - 1)
    grid = np.moveaxis(grid_h, axis, 0)
    new = np.empty((grid.shape[0] + 1,) + grid.shape[1:])
    new[: k - p + 1] = grid[: k - p + 1]
    new[k + 1:] = grid[k:]
    for i in range(k - p + 1, k + 1):
        alpha = (ubar - knots[i]) / (knots[i + p] - knots[i])
        new[i] = alpha * grid[i] + (1.0 - alpha) * grid[i - 1]
    new_knots = np.insert(knots, k + 1, ubar)
    return new_knots, np.moveaxis(new, 0, axis)


def _from_homogeneous(kv_u, kv_v, grid_h):
    w = grid_h[..., 3]
    return NurbsSurface(kv_u, kv_v, grid_h[..., :3] / w[..., None], w)


def insert_knots(surface: NurbsSurface, direction: str, values) -> NurbsSurface:
    """Insert each value once in the given direction ('u' or 'v').

    Values already present in the knot vector (to 1e-12) are skipped so the
    simple-interior-knot invariant is preserved.  Geometry is unchanged.
    """
    if direction not in ("u", "v"):
        raise ValueError(f"direction must be 'u' or 'v', got {direction!r}")
    kv = surface.kv_u if direction == "u" else surface.kv_v
    axis = 0 if direction == "u" else 1
    knots, p = kv.knots.copy(), kv.degree
    grid_h = surface.homogeneous()
    for ubar in values:
        if ubar <= knots[0] or ubar >= knots[-1]:
            raise DomainError(f"knot {ubar} outside open range")
        if np.any(np.abs(knots - ubar) < 1e-12):
            continue
        knots, grid_h = _insert_knot_1d(knots, p, grid_h, float(ubar), axis)
    new_kv = KnotVector(knots, p)
    if direction == "u":
        return _from_homogeneous(new_kv, surface.kv_v, grid_h)
    return _from_homogeneous(surface.kv_u, new_kv, grid_h)


def refine_uniform(surface: NurbsSurface, direction: str, times: int) -> NurbsSurface:
    """Bisect every nonempty span ``times`` times by knot insertion."""
    if times < 0:
        raise ValueError("times must be >= 0")
    s = surface
    for _ in range(times):
        kv = s.kv_u if direction == "u" else s.kv_v
        k = kv.knots
        mids = [(k[i] + k[i + 1]) / 2.0 for i in kv.spans()]
        s = insert_knots(s, direction, mids)
    return s


def make_uniform(surface: NurbsSurface, n_u: int, n_v: int) -> NurbsSurface:
    """Refine to a uniform n_u x n_v element mesh over the parametric square.

    Assumes the knot ranges are [0, 1]; inserts the missing knots i/n in each
    direction.  For n a power of two this produces the same knot multiset as
    repeated bisection, hence the identical refined surface.
    """
    s = surface
    for direction, n in (("u", n_u), ("v", n_v)):
        kv = s.kv_u if direction == "u" else s.kv_v
        if not (kv.start == 0.0 and kv.end == 1.0):
            raise ValueError("make_uniform expects knot ranges [0, 1]")
        s = insert_knots(s, direction, [i / n for i in range(1, n)])
    return s


# ---------------------------------------------------------------------------
# Plain-text serialization
# ---------------------------------------------------------------------------

def save_surface(surface: NurbsSurface, stream) -> None:
    """Write the surface in the plain-text exchange format.

    Layout: degrees, then each knot vector (count followed by values), then
    the grid dimensions and one "x y z w" row per control point, u-major.
    All numbers are written with full double precision and '.' decimal point.
    """
    own = isinstance(stream, str)
    f = open(stream, "w", encoding="ascii") if own else stream

    def fmt(x):
        return format(float(x), ".17g")

    try:
        f.write(f"{surface.kv_u.degree} {surface.kv_v.degree}\n")
        for kv in (surface.kv_u, surface.kv_v):
            f.write(f"{len(kv.knots)}\n")
            f.write(" ".join(fmt(x) for x in kv.knots) + "\n")
        nu, nv = surface.shape
        f.write(f"{nu} {nv}\n")
        for i in range(nu):
            for j in range(nv):
                x, y, z = surface.ctrl[i, j]
                f.write(f"{fmt(x)} {fmt(y)} {fmt(z)} {fmt(surface.weights[i, j])}\n")
    finally:
        if own:
            f.close()


def load_surface(stream) -> NurbsSurface:
    """Read a surface written by :func:`save_surface`."""
    own = isinstance(stream, str)
    f = open(stream, "r", encoding="ascii") if own else stream
    try:
        tokens = f.read().split()
    finally:
        if own:
            f.close()
    it = iter(tokens)

    def ints(n):
        return [int(next(it)) for _ in range(n)]

    def floats(n):
        return np.array([float(next(it)) for _ in range(n)])

    pu, pv = ints(2)
    kvs = []
    for p in (pu, pv):
        (count,) = ints(1)
        kvs.append(KnotVector(floats(count), p))
    nu, nv = ints(2)
    rows = floats(nu * nv * 4).reshape(nu, nv, 4)
    return NurbsSurface(kvs[0], kvs[1], rows[..., :3], rows[..., 3])


def surface_to_text(surface: NurbsSurface) -> str:
    buf = io.StringIO()
    save_surface(surface, buf)
    return buf.getvalue()


def surface_from_text(text: str) -> NurbsSurface:
    return load_surface(io.StringIO(text))
