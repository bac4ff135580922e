"""Element quadrature, CS/CAS element stiffness, loads, constraints, assembly.

Two quadratic element types share one code path:

* ``cs``  -- compatible strains evaluated at the quadrature points;
* ``cas`` -- membrane strain rows evaluated at the four element corners and
  interpolated bilinearly across the element, which makes the assumed
  membrane strains C0-continuous across element boundaries.  The bending
  part is identical to ``cs``.

Element kernels are vectorized over batches of elements; the public
per-element functions run the same kernel on a batch of one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import SingularGeometryError
from .nurbs import (NurbsSurface, _basis_ders_at_span, basis_eval, find_span,
                    surface_eval)
from .shell import ShellMaterial, bending_rows, constitutive_voigt, frame_arrays, membrane_rows
from .solver import SparseSymmetric

CS = "cs"
CAS = "cas"

# parent-square corners in (u, v), u-major; L columns follow this order
_CORNERS = np.array([[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]])


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Tensor-product rule on the parent square [-1, 1]^2, u-major point order."""

    points: np.ndarray   # (nq, 2)
    weights: np.ndarray  # (nq,)

    @property
    def n(self) -> int:
        return len(self.weights)

    def nodes_1d(self) -> np.ndarray:
        m = round(len(self.weights) ** 0.5)
        x = self.points[::m, 0]
        if not np.array_equal(np.repeat(x, m), self.points[:, 0]):
            raise ValueError("rule is not a u-major tensor product")
        return x


def gauss_1d(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def tensor_rule(n_per_dir: int) -> QuadratureRule:
    """Gauss-Legendre tensor rule with n points per direction (any n >= 1)."""
    x, w = gauss_1d(n_per_dir)
    pts = np.array([(xi, eta) for xi in x for eta in x])
    wts = np.array([wi * wj for wi in w for wj in w])
    return QuadratureRule(pts, wts)


def gauss_rule(n_per_dir: int) -> QuadratureRule:
    """Element integration rule; the discretization uses 2x2 or 3x3 points."""
    if n_per_dir not in (2, 3):
        raise ValueError(f"unsupported quadrature order {n_per_dir} (use 2 or 3)")
    return tensor_rule(n_per_dir)


# ---------------------------------------------------------------------------
# Patch: elements, connectivity, dof map
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Patch:
    """A NURBS surface with element connectivity and a dof map.

    Control point (iu, iv) has grid index iu * n_v + iv and dof indices
    3 * g + {0, 1, 2} for the global Cartesian displacement components.
    """

    surface: NurbsSurface
    spans_u: np.ndarray = field(init=False)
    spans_v: np.ndarray = field(init=False)
    conn: np.ndarray = field(init=False)

    def __post_init__(self):
        s = self.surface
        self.spans_u = s.kv_u.spans()
        self.spans_v = s.kv_v.spans()
        pu, pv = s.kv_u.degree, s.kv_v.degree
        nv = s.kv_v.n_basis
        offs_u = np.arange(-pu, 1)
        offs_v = np.arange(-pv, 1)
        conn = np.empty((len(self.spans_u), len(self.spans_v),
                         (pu + 1) * (pv + 1)), dtype=np.int64)
        for a, su in enumerate(self.spans_u):
            for b, sv in enumerate(self.spans_v):
                grid = (su + offs_u)[:, None] * nv + (sv + offs_v)[None, :]
                conn[a, b] = grid.ravel()
        self.conn = conn.reshape(-1, (pu + 1) * (pv + 1))

    @property
    def n_el(self) -> tuple[int, int]:
        return len(self.spans_u), len(self.spans_v)

    @property
    def n_elements(self) -> int:
        return self.conn.shape[0]

    @property
    def n_cp(self) -> int:
        return self.surface.n_cp

    @property
    def n_dof(self) -> int:
        return 3 * self.surface.n_cp

    def element_spans(self, eid: int) -> tuple[int, int]:
        nb = len(self.spans_v)
        return int(self.spans_u[eid // nb]), int(self.spans_v[eid % nb])

    def element_bounds(self, eid: int):
        su, sv = self.element_spans(eid)
        ku, kv = self.surface.kv_u.knots, self.surface.kv_v.knots
        return (ku[su], ku[su + 1]), (kv[sv], kv[sv + 1])

    def element_dofs(self, eid: int) -> np.ndarray:
        return (3 * self.conn[eid][:, None] + np.arange(3)).ravel()

    def element_containing(self, t1: float, t2: float) -> int:
        su = find_span(self.surface.kv_u, t1)
        sv = find_span(self.surface.kv_v, t2)
        a = int(np.searchsorted(self.spans_u, su))
        b = int(np.searchsorted(self.spans_v, sv))
        return a * len(self.spans_v) + b

    def cp_index(self, iu: int, iv: int) -> int:
        return iu * self.surface.kv_v.n_basis + iv


# ---------------------------------------------------------------------------
# Batched evaluation over elements
# ---------------------------------------------------------------------------

def _dir_tables(kv, xi):
    """Per-span basis tables at mapped 1D parent points.

    Returns (theta, half, V) with theta (n_span, m), half-widths (n_span,),
    and V (n_span, m, 3, p+1) holding value/1st/2nd derivative rows.
    """
    spans = kv.spans()
    m = len(xi)
    p = kv.degree
    V = np.empty((len(spans), m, 3, p + 1))
    theta = np.empty((len(spans), m))
    half = np.empty(len(spans))
    for a, s in enumerate(spans):
        lo, hi = kv.knots[s], kv.knots[s + 1]
        half[a] = 0.5 * (hi - lo)
        for q, x in enumerate(xi):
            th = lo + 0.5 * (x + 1.0) * (hi - lo)
            theta[a, q] = th
            d = _basis_ders_at_span(kv.knots, p, s, th, 2)
            V[a, q, : d.shape[0]] = d
            V[a, q, d.shape[0]:] = 0.0
    return theta, half, V


_DPAIRS = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def _batch_eval(patch: Patch, eids, xi_u, xi_v, order: int = 2):
    """Geometry and rational basis arrays on a batch of elements.

    Quadrature grid is the tensor product of the parent points xi_u, xi_v
    (u-major).  Returns a dict of arrays with leading shape (ne, nq).
    """
    s = patch.surface
    th_u, half_u, Vu = _dir_tables(s.kv_u, np.asarray(xi_u, dtype=float))
    th_v, half_v, Vv = _dir_tables(s.kv_v, np.asarray(xi_v, dtype=float))
    nb = len(patch.spans_v)
    eids = np.asarray(eids, dtype=int)
    ai, bi = eids // nb, eids % nb

    Au = Vu[ai]  # (ne, mu, 3, pu+1)
    Av = Vv[bi]
    ne, mu = Au.shape[0], Au.shape[1]
    mv = Av.shape[1]
    nq = mu * mv
    nfun = Au.shape[-1] * Av.shape[-1]

    conn = patch.conn[eids]
    Ph = s.homogeneous().reshape(-1, 4)[conn]        # (ne, nfun, 4)
    wloc = s.weights.ravel()[conn]                   # (ne, nfun)

    pairs = _DPAIRS[:1] if order == 0 else (_DPAIRS[:3] if order == 1 else _DPAIRS)
    B = {}
    S = {}
    for d1, d2 in pairs:
        t = np.einsum("eqi,erj->eqrij", Au[:, :, d1, :], Av[:, :, d2, :])
        B[(d1, d2)] = t.reshape(ne, nq, nfun)
        S[(d1, d2)] = np.einsum("eqA,eAc->eqc", B[(d1, d2)], Ph)

    out = {
        "theta": np.stack(
            [th_u[ai][:, :, None].repeat(mv, axis=2).reshape(ne, nq),
             th_v[bi][:, None, :].repeat(mu, axis=1).reshape(ne, nq)], axis=-1),
        "half": np.stack([half_u[ai], half_v[bi]], axis=-1),  # (ne, 2)
        "conn": conn,
    }

    W = S[(0, 0)][..., 3]
    r = S[(0, 0)][..., :3] / W[..., None]
    out["r"] = r
    if order >= 1:
        W1, W2 = S[(1, 0)][..., 3], S[(0, 1)][..., 3]
        r1 = (S[(1, 0)][..., :3] - W1[..., None] * r) / W[..., None]
        r2 = (S[(0, 1)][..., :3] - W2[..., None] * r) / W[..., None]
        out["r1"], out["r2"] = r1, r2
    if order >= 2:
        W11, W22, W12 = S[(2, 0)][..., 3], S[(0, 2)][..., 3], S[(1, 1)][..., 3]
        out["r11"] = (S[(2, 0)][..., :3] - W11[..., None] * r
                      - 2.0 * W1[..., None] * r1) / W[..., None]
        out["r22"] = (S[(0, 2)][..., :3] - W22[..., None] * r
                      - 2.0 * W2[..., None] * r2) / W[..., None]
        out["r12"] = (S[(1, 1)][..., :3] - W12[..., None] * r
                      - W1[..., None] * r2 - W2[..., None] * r1) / W[..., None]

    # rational basis functions (same quotient rule applied per function)
    N = B[(0, 0)] * wloc[:, None, :] / W[..., None]
    out["N"] = N
    if order >= 1:
        N1 = (B[(1, 0)] * wloc[:, None, :] - N * W1[..., None]) / W[..., None]
        N2 = (B[(0, 1)] * wloc[:, None, :] - N * W2[..., None]) / W[..., None]
        out["N1"], out["N2"] = N1, N2
    if order >= 2:
        out["N11"] = (B[(2, 0)] * wloc[:, None, :] - 2.0 * N1 * W1[..., None]
                      - N * W11[..., None]) / W[..., None]
        out["N22"] = (B[(0, 2)] * wloc[:, None, :] - 2.0 * N2 * W2[..., None]
                      - N * W22[..., None]) / W[..., None]
        out["N12"] = (B[(1, 1)] * wloc[:, None, :] - N1 * W2[..., None]
                      - N2 * W1[..., None] - N * W12[..., None]) / W[..., None]
    return out


def _voigt(rows):
    """Double the shear row: (e11, e22, e12) -> (e11, e22, 2 e12)."""
    v = rows.copy()
    v[..., 2, :] *= 2.0
    return v


def _corner_membrane_rows(patch, eids):
    """Voigt membrane rows at the four element corners, (ne, 4, 3, 3*nfun)."""
    ev = _batch_eval(patch, eids, [-1.0, 1.0], [-1.0, 1.0], order=1)
    rows = membrane_rows(ev["N1"], ev["N2"], ev["r1"], ev["r2"])
    return _voigt(rows)


def _corner_weights(rule: QuadratureRule):
    """Bilinear corner interpolation table L (nq, 4), corner order as _CORNERS."""
    xi, eta = rule.points[:, 0], rule.points[:, 1]
    cols = [(1.0 + su * xi) * (1.0 + sv * eta) * 0.25 for su, sv in _CORNERS]
    return np.stack(cols, axis=-1)


def _stiffness_batch(patch, eids, mat, rule, kind):
    """Membrane and bending element stiffness for a batch, (ne, nd, nd) each."""
    xi1d = rule.nodes_1d()
    ev = _batch_eval(patch, eids, xi1d, xi1d, order=2)
    try:
        fr = frame_arrays(ev["r1"], ev["r2"], ev["r11"], ev["r22"], ev["r12"])
    except SingularGeometryError as exc:
        raise SingularGeometryError(f"elements {list(eids)}: {exc}") from exc

    wdA = (rule.weights[None, :] * fr["jac"]
           * (ev["half"][:, 0] * ev["half"][:, 1])[:, None])

    Bk = _voigt(bending_rows(ev, fr))
    Db = constitutive_voigt(fr["a_inv"], mat.bending_stiffness, mat.nu)
    k_kappa = np.einsum("eqai,eqab,eqbj,eq->eij", Bk, Db, Bk, wdA, optimize=True)

    if kind == CS:
        Bm = _voigt(membrane_rows(ev["N1"], ev["N2"], ev["r1"], ev["r2"]))
    elif kind == CAS:
        if patch.surface.kv_u.degree != 2 or patch.surface.kv_v.degree != 2:
            raise ValueError("cas elements are defined for quadratic patches only")
        Bc = _corner_membrane_rows(patch, eids)
        L = _corner_weights(rule)
        Bm = np.einsum("ql,elai->eqai", L, Bc)
    else:
        raise ValueError(f"unknown element kind {kind!r}")
    Dm = constitutive_voigt(fr["a_inv"], mat.membrane_stiffness, mat.nu)
    k_eps = np.einsum("eqai,eqab,eqbj,eq->eij", Bm, Dm, Bm, wdA, optimize=True)
    return k_eps, k_kappa


def element_stiffness(patch: Patch, eid: int, mat: ShellMaterial,
                      rule: QuadratureRule, kind: str) -> np.ndarray:
    """Element stiffness k = k_eps + k_kappa for one element."""
    try:
        k_eps, k_kappa = _stiffness_batch(patch, [eid], mat, rule, kind)
    except SingularGeometryError as exc:
        raise SingularGeometryError(f"element {eid}: {exc}") from exc
    return k_eps[0] + k_kappa[0]


def element_stiffness_cs(patch, eid, mat, rule):
    return element_stiffness(patch, eid, mat, rule, CS)


def element_stiffness_cas(patch, eid, mat, rule):
    return element_stiffness(patch, eid, mat, rule, CAS)


# ---------------------------------------------------------------------------
# Constraints and the global system
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Constraint:
    """Set of global dof indices prescribed to zero."""

    fixed: np.ndarray

    def __post_init__(self):
        fixed = np.unique(np.asarray(self.fixed, dtype=np.int64))
        fixed.flags.writeable = False
        object.__setattr__(self, "fixed", fixed)

    @staticmethod
    def empty() -> "Constraint":
        return Constraint(np.empty(0, dtype=np.int64))

    @staticmethod
    def union(*parts: "Constraint") -> "Constraint":
        if not parts:
            return Constraint.empty()
        return Constraint(np.concatenate([p.fixed for p in parts]))


def fix_cps(patch: Patch, cp_indices, components=(0, 1, 2)) -> Constraint:
    cp = np.asarray(list(cp_indices), dtype=np.int64)
    comps = np.asarray(list(components), dtype=np.int64)
    return Constraint((3 * cp[:, None] + comps[None, :]).ravel())


def edge_cp_lines(patch: Patch, edge: str, n_lines: int = 1):
    """Control point indices of the first n_lines grid lines at a patch edge."""
    nu, nv = patch.surface.shape
    iu = np.arange(nu)
    iv = np.arange(nv)
    out = []
    for k in range(n_lines):
        if edge == "u0":
            out.extend(patch.cp_index(k, j) for j in iv)
        elif edge == "u1":
            out.extend(patch.cp_index(nu - 1 - k, j) for j in iv)
        elif edge == "v0":
            out.extend(patch.cp_index(i, k) for i in iu)
        elif edge == "v1":
            out.extend(patch.cp_index(i, nv - 1 - k) for i in iu)
        else:
            raise ValueError(f"unknown edge {edge!r}")
    return np.array(out, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class LinearConstraint:
    """One homogeneous multipoint condition: sum_i coeffs[i] * U[dofs[i]] = 0.

    Used for rotation conditions at symmetry edges, which couple the surface
    normal components of adjacent control point rows.
    """

    dofs: np.ndarray
    coeffs: np.ndarray


@dataclass(eq=False)
class GlobalSystem:
    """Assembled stiffness, load vector, and homogeneous constraints."""

    K: SparseSymmetric
    F: np.ndarray
    constraints: Constraint
    linear: tuple = ()


@dataclass(eq=False)
class ReducedSystem:
    """Constraint-eliminated system with a recovery map to full dof vectors."""

    K: SparseSymmetric
    F: np.ndarray
    free: np.ndarray
    n_dof: int
    T: object = None  # sparse (n_dof, n_free) when multipoint constraints exist

    def expand(self, U_free: np.ndarray) -> np.ndarray:
        if self.T is not None:
            return np.asarray(self.T @ np.asarray(U_free, dtype=float))
        U = np.zeros(self.n_dof)
        U[self.free] = U_free
        return U


def _mpc_transform(n, fixed_mask, rows):
    """Master/slave elimination basis T for homogeneous multipoint rows.

    Sequential elimination with substitution: each row is first rewritten in
    terms of dofs that are not yet slaves, then its largest-coefficient dof
    is eliminated.  Rows that reduce to nothing (all dofs fixed or already
    implied) are dropped.
    """
    slave_of = {}
    max_depth = len(rows) + 2

    def expand_into(out, d, coef, depth):
        if depth > max_depth:
            raise ValueError("multipoint constraint chain too deep")
        if fixed_mask[d] or coef == 0.0:
            return
        entry = slave_of.get(int(d))
        if entry is None:
            out[int(d)] = out.get(int(d), 0.0) + coef
        else:
            for dm, wm in entry:
                expand_into(out, int(dm), coef * wm, depth + 1)

    for lc in rows:
        out = {}
        for d, c in zip(np.asarray(lc.dofs, dtype=int),
                        np.asarray(lc.coeffs, dtype=float)):
            expand_into(out, int(d), float(c), 0)
        out = {d: c for d, c in out.items() if c != 0.0}
        if not out:
            continue
        scale = max(abs(c) for c in out.values())
        out = {d: c for d, c in out.items() if abs(c) > 1e-14 * scale}
        slave = min(d for d, c in out.items() if abs(c) == scale) \
            if any(abs(c) == scale for c in out.values()) else None
        if slave is None:
            slave = max(out, key=lambda d: abs(out[d]))
        cs = out.pop(slave)
        slave_of[slave] = tuple((d, -c / cs) for d, c in sorted(out.items()))

    is_slave = np.zeros(n, dtype=bool)
    is_slave[list(slave_of.keys())] = True
    free = np.nonzero(~fixed_mask & ~is_slave)[0]
    col_of = -np.ones(n, dtype=np.int64)
    col_of[free] = np.arange(len(free))

    def expand_final(d, coef, out, depth):
        if depth > max_depth:
            raise ValueError("multipoint constraint chain too deep")
        if fixed_mask[d] or coef == 0.0:
            return
        entry = slave_of.get(int(d))
        if entry is None:
            out[int(d)] = out.get(int(d), 0.0) + coef
        else:
            for dm, wm in entry:
                expand_final(int(dm), coef * wm, out, depth + 1)

    ti, tj, tv = list(free), list(range(len(free))), [1.0] * len(free)
    for slave, entry in slave_of.items():
        out = {}
        for d, w in entry:
            expand_final(int(d), float(w), out, 0)
        for d, w in sorted(out.items()):
            if w == 0.0:
                continue
            ti.append(slave)
            tj.append(int(col_of[d]))
            tv.append(float(w))
    T = sp.csr_matrix((tv, (ti, tj)), shape=(n, len(free)))
    return free, T


def apply_constraints(system: GlobalSystem) -> ReducedSystem:
    """Eliminate fixed dofs (value 0) and any multipoint rows.

    Fixed dofs are removed by row/column deletion; multipoint rows by
    master/slave elimination K -> T' K T, which preserves symmetry and
    definiteness.
    """
    n = system.K.n
    fixed = system.constraints.fixed
    if len(fixed) and (fixed.min() < 0 or fixed.max() >= n):
        raise ValueError("constraint dof index out of range")
    fixed_mask = np.zeros(n, dtype=bool)
    fixed_mask[fixed] = True

    if system.linear:
        free, T = _mpc_transform(n, fixed_mask, system.linear)
        if free.size == 0:
            raise ValueError("all dofs constrained: empty reduced system")
        Kfull = system.K.to_csr()
        Kred = sp.csr_matrix(T.T @ Kfull @ T)
        return ReducedSystem(SparseSymmetric.from_csr(Kred), T.T @ system.F,
                             free, n, T=T)

    free = np.nonzero(~fixed_mask)[0]
    if free.size == 0:
        raise ValueError("all dofs constrained: empty reduced system")
    Kfull = system.K.to_csr()
    Kff = Kfull[free][:, free]
    return ReducedSystem(SparseSymmetric.from_csr(Kff), system.F[free], free, n)


# ---------------------------------------------------------------------------
# Assembly and loads
# ---------------------------------------------------------------------------

_CHUNK = 2048


def assemble(patch: Patch, mat: ShellMaterial, rule: QuadratureRule,
             kind: str) -> GlobalSystem:
    """Scatter-add all element stiffness matrices into the global matrix.

    Elements are visited in a fixed order and duplicate entries are summed
    in canonical CSR order, so the result is bitwise reproducible.
    """
    n = patch.n_dof
    nd = patch.conn.shape[1] * 3
    rows_, cols_, vals_ = [], [], []
    for start in range(0, patch.n_elements, _CHUNK):
        eids = np.arange(start, min(start + _CHUNK, patch.n_elements))
        k_eps, k_kappa = _stiffness_batch(patch, eids, mat, rule, kind)
        k = k_eps + k_kappa
        dofs = (3 * patch.conn[eids][:, :, None]
                + np.arange(3)[None, None, :]).reshape(len(eids), nd)
        rows_.append(np.repeat(dofs, nd, axis=1).ravel())
        cols_.append(np.tile(dofs, (1, nd)).ravel())
        vals_.append(k.ravel())
    K = sp.coo_matrix(
        (np.concatenate(vals_), (np.concatenate(rows_), np.concatenate(cols_))),
        shape=(n, n)).tocsr()
    K.sum_duplicates()
    return GlobalSystem(SparseSymmetric.from_csr(K), np.zeros(n), Constraint.empty())


def load_area(patch: Patch, rule: QuadratureRule, f) -> np.ndarray:
    """Consistent load vector for a per-area force on the midsurface.

    ``f`` is either a constant 3-vector or a callable mapping positions
    (..., 3) to force densities (..., 3).
    """
    F = np.zeros(patch.n_dof)
    const = None if callable(f) else np.asarray(f, dtype=float)
    xi1d = rule.nodes_1d()
    for start in range(0, patch.n_elements, _CHUNK):
        eids = np.arange(start, min(start + _CHUNK, patch.n_elements))
        ev = _batch_eval(patch, eids, xi1d, xi1d, order=1)
        jac = np.linalg.norm(np.cross(ev["r1"], ev["r2"]), axis=-1)
        wdA = (rule.weights[None, :] * jac
               * (ev["half"][:, 0] * ev["half"][:, 1])[:, None])
        fv = f(ev["r"]) if const is None else np.broadcast_to(
            const, ev["r"].shape)
        Fe = np.einsum("eqA,eqc,eq->eAc", ev["N"], fv, wdA)
        np.add.at(F, (3 * ev["conn"][:, :, None]
                      + np.arange(3)[None, None, :]).ravel(), Fe.ravel())
    return F


_EDGES = {"u0": ("v", 0.0), "u1": ("v", 1.0), "v0": ("u", 0.0), "v1": ("u", 1.0)}


def load_edge_line(patch: Patch, edge: str, n_gauss: int, q) -> np.ndarray:
    """Consistent load vector for a per-arc-length line load on a patch edge.

    ``edge`` is one of 'u0', 'u1', 'v0', 'v1' (the boundary where that
    parameter takes the given end value); ``q`` is a constant 3-vector or a
    callable on positions.
    """
    if edge not in _EDGES:
        raise ValueError(f"{edge!r} is not a patch boundary edge")
    s = patch.surface
    run_dir, fixed_frac = _EDGES[edge]
    run_kv = s.kv_u if run_dir == "u" else s.kv_v
    fixed_kv = s.kv_v if run_dir == "u" else s.kv_u
    fixed_val = fixed_kv.start if fixed_frac == 0.0 else fixed_kv.end

    const = None if callable(q) else np.asarray(q, dtype=float)
    x1, w1 = gauss_1d(n_gauss)
    F = np.zeros(patch.n_dof)
    for span in run_kv.spans():
        lo, hi = run_kv.knots[span], run_kv.knots[span + 1]
        half = 0.5 * (hi - lo)
        for xq, wq in zip(x1, w1):
            t_run = lo + 0.5 * (xq + 1.0) * (hi - lo)
            t1, t2 = (t_run, fixed_val) if run_dir == "u" else (fixed_val, t_run)
            be = basis_eval(s, t1, t2)
            r, r1, r2 = surface_eval(s, t1, t2, order=1)
            tangent = r1 if run_dir == "u" else r2
            ds = np.linalg.norm(tangent)
            qv = q(r) if const is None else const
            eid = patch.element_containing(t1, t2)
            dofs = patch.element_dofs(eid)
            F[dofs] += (np.outer(be.N, qv) * (wq * half * ds)).ravel()
    return F


def load_point(patch: Patch, theta, P) -> np.ndarray:
    """Load vector for a concentrated force at a parametric point."""
    t1, t2 = theta
    be = basis_eval(patch.surface, t1, t2)
    eid = patch.element_containing(t1, t2)
    dofs = patch.element_dofs(eid)
    F = np.zeros(patch.n_dof)
    F[dofs] += np.outer(be.N, np.asarray(P, dtype=float)).ravel()
    return F
