"""Pointwise Kirchhoff-Love shell kinematics and linear-elastic resultant laws.

Surface frames in curvilinear coordinates, membrane strain and bending
pseudo-strain operators as per-dof row arrays, membrane force / bending
moment laws, effective membrane forces, and the transformation of resultants
to a local Cartesian basis.

All core formulas are written over arrays with arbitrary leading (batch)
dimensions; the public single-point functions wrap them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BasisConventionError, SingularGeometryError
from .nurbs import BasisEval, NurbsSurface, surface_eval

CURVILINEAR = "curvilinear"
CARTESIAN = "local-cartesian"


@dataclass(frozen=True)
class ShellMaterial:
    """Isotropic linear-elastic shell material: modulus, Poisson ratio, thickness."""

    E: float
    nu: float
    t: float

    def __post_init__(self):
        if self.E <= 0.0:
            raise ValueError("Young's modulus must be positive")
        if not 0.0 <= self.nu < 0.5:
            raise ValueError("Poisson ratio must lie in [0, 0.5)")
        if self.t <= 0.0:
            raise ValueError("thickness must be positive")

    @property
    def membrane_stiffness(self) -> float:
        return self.E * self.t / (1.0 - self.nu ** 2)

    @property
    def bending_stiffness(self) -> float:
        return self.E * self.t ** 3 / (12.0 * (1.0 - self.nu ** 2))


@dataclass(frozen=True)
class StrainTriple:
    """Symmetric covariant strain coefficients (11, 22, 12)."""

    c11: float
    c22: float
    c12: float

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.c11, self.c12], [self.c12, self.c22]])


@dataclass(frozen=True)
class ResultantTriple:
    """Symmetric contravariant resultant coefficients (11, 22, 12) plus basis tag."""

    c11: float
    c22: float
    c12: float
    basis: str = CURVILINEAR

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.c11, self.c12], [self.c12, self.c22]])


@dataclass(frozen=True, eq=False)
class SurfaceFrame:
    """Midsurface geometry bundle at one parametric point.

    Covariant tangents a1, a2, unit normal a3, metric a_ab and its inverse,
    curvature b_ab and mixed form b_mixed = a_inv @ b_ab, orthonormal local
    basis (e1, e2) with e1 parallel to a1, area density jac = ||a1 x a2||,
    and the second parametric derivatives d2 stored in row order (11, 22, 12).
    """

    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    a_ab: np.ndarray
    a_inv: np.ndarray
    b_ab: np.ndarray
    b_mixed: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    jac: float
    d2: np.ndarray


def _dot(u, v):
    return np.einsum("...i,...i->...", u, v)


def frame_arrays(r1, r2, r11, r22, r12):
    """Frame quantities from parametric derivatives; broadcasts over leading dims.

    Returns a dict with keys a1, a2, a3, a_ab, a_inv, b_ab, b_mixed, e1, e2,
    jac, d2 (d2 stacked as (..., 3, 3) in component order 11, 22, 12).
    """
    cross = np.cross(r1, r2)
    jac = np.linalg.norm(cross, axis=-1)
    if np.any(jac <= 0.0) or not np.all(np.isfinite(jac)):
        raise SingularGeometryError("degenerate tangents: ||a1 x a2|| = 0")
    a3 = cross / jac[..., None]

    a_ab = np.empty(r1.shape[:-1] + (2, 2))
    a_ab[..., 0, 0] = _dot(r1, r1)
    a_ab[..., 0, 1] = a_ab[..., 1, 0] = _dot(r1, r2)
    a_ab[..., 1, 1] = _dot(r2, r2)
    det = a_ab[..., 0, 0] * a_ab[..., 1, 1] - a_ab[..., 0, 1] ** 2
    a_inv = np.empty_like(a_ab)
    a_inv[..., 0, 0] = a_ab[..., 1, 1] / det
    a_inv[..., 1, 1] = a_ab[..., 0, 0] / det
    a_inv[..., 0, 1] = a_inv[..., 1, 0] = -a_ab[..., 0, 1] / det

    d2 = np.stack([r11, r22, r12], axis=-2)
    b_ab = np.empty_like(a_ab)
    b_ab[..., 0, 0] = _dot(r11, a3)
    b_ab[..., 1, 1] = _dot(r22, a3)
    b_ab[..., 0, 1] = b_ab[..., 1, 0] = _dot(r12, a3)
    b_mixed = a_inv @ b_ab

    e1 = r1 / np.linalg.norm(r1, axis=-1, keepdims=True)
    t = r2 - _dot(r2, e1)[..., None] * e1
    e2 = t / np.linalg.norm(t, axis=-1, keepdims=True)

    return dict(a1=r1, a2=r2, a3=a3, a_ab=a_ab, a_inv=a_inv, b_ab=b_ab,
                b_mixed=b_mixed, e1=e1, e2=e2, jac=jac, d2=d2)


def frame_at(surface: NurbsSurface, t1: float, t2: float) -> SurfaceFrame:
    """Surface frame at a parametric point."""
    r, r1, r2, r11, r22, r12 = surface_eval(surface, t1, t2, order=2)
    f = frame_arrays(r1, r2, r11, r22, r12)
    return SurfaceFrame(a1=f["a1"], a2=f["a2"], a3=f["a3"], a_ab=f["a_ab"],
                        a_inv=f["a_inv"], b_ab=f["b_ab"], b_mixed=f["b_mixed"],
                        e1=f["e1"], e2=f["e2"], jac=float(f["jac"]), d2=f["d2"])


# ---------------------------------------------------------------------------
# Strain operators (per-dof rows)
# ---------------------------------------------------------------------------
# Rows are indexed by the local dof (A, i) with A the basis function and i the
# global Cartesian direction, flattened as 3*A + i.  Component order of the
# strain rows is (11, 22, 12), storing the plain 12 coefficient.

def membrane_rows(N1, N2, a1, a2):
    """Membrane strain rows, batched.

    N1, N2: (..., nfun) rational basis partials; a1, a2: (..., 3) tangents.
    Returns (..., 3, 3*nfun) with eps_ab = rows @ dofs.
    """
    e11 = np.einsum("...A,...i->...Ai", N1, a1)
    e22 = np.einsum("...A,...i->...Ai", N2, a2)
    e12 = 0.5 * (np.einsum("...A,...i->...Ai", N1, a2)
                 + np.einsum("...A,...i->...Ai", N2, a1))
    rows = np.stack([e11, e22, e12], axis=-3)
    return rows.reshape(rows.shape[:-2] + (rows.shape[-2] * 3,))


def bending_rows(basis_arrays, frame_arrays_):
    """Bending pseudo-strain rows, batched.

    Implements, per component ab with c = r_,ab and j = ||a1 x a2||:

        kappa_ab = -a3 . u_,ab
                   + (1/j) [ (c x a2) . u_,1 + (a1 x c) . u_,2
                             + (c . a3) ( (a2 x a3) . u_,1 + (a3 x a1) . u_,2 ) ]

    basis_arrays: dict with N1, N2, N11, N22, N12 of shape (..., nfun).
    Returns (..., 3, 3*nfun) rows in component order (11, 22, 12).
    """
    f = frame_arrays_
    a1, a2, a3, jac, d2 = f["a1"], f["a2"], f["a3"], f["jac"], f["d2"]
    N1, N2 = basis_arrays["N1"], basis_arrays["N2"]
    second = (basis_arrays["N11"], basis_arrays["N22"], basis_arrays["N12"])

    a2xa3 = np.cross(a2, a3)
    a3xa1 = np.cross(a3, a1)
    inv_j = 1.0 / jac[..., None]

    comps = []
    for k, Nab in enumerate(second):
        c = d2[..., k, :]
        c_dot_a3 = _dot(c, a3)[..., None]
        v1 = (np.cross(c, a2) + c_dot_a3 * a2xa3) * inv_j
        v2 = (np.cross(a1, c) + c_dot_a3 * a3xa1) * inv_j
        row = (-np.einsum("...A,...i->...Ai", Nab, a3)
               + np.einsum("...A,...i->...Ai", N1, v1)
               + np.einsum("...A,...i->...Ai", N2, v2))
        comps.append(row)
    rows = np.stack(comps, axis=-3)
    return rows.reshape(rows.shape[:-2] + (rows.shape[-2] * 3,))


def membrane_strain_op(frame: SurfaceFrame, basis: BasisEval) -> np.ndarray:
    """Membrane strain rows B_eps, shape (3, 3*nfun), components (11, 22, 12)."""
    return membrane_rows(basis.N1, basis.N2, frame.a1, frame.a2)


def bending_strain_op(frame: SurfaceFrame, basis: BasisEval) -> np.ndarray:
    """Bending pseudo-strain rows B_kappa, shape (3, 3*nfun)."""
    arrays = dict(N1=basis.N1, N2=basis.N2, N11=basis.N11,
                  N22=basis.N22, N12=basis.N12)
    f = dict(a1=frame.a1, a2=frame.a2, a3=frame.a3,
             jac=np.asarray(frame.jac), d2=frame.d2)
    return bending_rows(arrays, f)


# ---------------------------------------------------------------------------
# Constitutive laws
# ---------------------------------------------------------------------------

def _law_matrix(strain_mat, a_inv, scale, nu):
    """c * [ (1-nu) A E A + nu A tr(A E) ] for symmetric E and A = a_inv."""
    AE = a_inv @ strain_mat
    return scale * ((1.0 - nu) * (AE @ a_inv.T).T
                    + nu * np.trace(AE) * a_inv)


def membrane_law(eps: StrainTriple, frame: SurfaceFrame,
                 mat: ShellMaterial) -> ResultantTriple:
    """Contravariant membrane forces from covariant membrane strains."""
    n = _law_matrix(eps.as_matrix(), frame.a_inv, mat.membrane_stiffness, mat.nu)
    return ResultantTriple(n[0, 0], n[1, 1], 0.5 * (n[0, 1] + n[1, 0]))


def bending_law(kappa: StrainTriple, frame: SurfaceFrame,
                mat: ShellMaterial) -> ResultantTriple:
    """Contravariant bending moments from covariant bending pseudo-strains."""
    m = _law_matrix(kappa.as_matrix(), frame.a_inv, mat.bending_stiffness, mat.nu)
    return ResultantTriple(m[0, 0], m[1, 1], 0.5 * (m[0, 1] + m[1, 0]))


def effective_membrane(n: ResultantTriple, m: ResultantTriple,
                       frame: SurfaceFrame) -> ResultantTriple:
    """Effective membrane forces n_eff^ab = n^ab - m^al b^b_l (curvilinear).

    The moment-curvature coupling carries the shape-operator sign: with this
    pairing n_eff reproduces the force transmitted through a cross-section
    (e.g. the tangential tip-load component on a statically determinate
    arch), which the opposite sign does not for any surface orientation.
    """
    if n.basis != CURVILINEAR or m.basis != CURVILINEAR:
        raise BasisConventionError("effective_membrane expects curvilinear inputs")
    ne = n.as_matrix() - m.as_matrix() @ frame.b_mixed.T
    return ResultantTriple(ne[0, 0], ne[1, 1], 0.5 * (ne[0, 1] + ne[1, 0]))


def to_local_cartesian(res: ResultantTriple, frame: SurfaceFrame) -> ResultantTriple:
    """Transform contravariant coefficients to the local Cartesian basis.

    hat{n}^ab = n^gm (e_a . a_g)(a_m . e_b); the output carries physical
    units (force/length for membrane, force for moments).
    """
    if res.basis != CURVILINEAR:
        raise BasisConventionError("resultant is already in a local Cartesian basis")
    T = np.empty((2, 2))
    T[0, 0] = frame.e1 @ frame.a1
    T[0, 1] = frame.e1 @ frame.a2
    T[1, 0] = frame.e2 @ frame.a1
    T[1, 1] = frame.e2 @ frame.a2
    h = T @ res.as_matrix() @ T.T
    return ResultantTriple(h[0, 0], h[1, 1], 0.5 * (h[0, 1] + h[1, 0]),
                           basis=CARTESIAN)


def constitutive_voigt(a_inv, scale, nu):
    """Voigt 3x3 law matrix D with strain vector (e11, e22, 2*e12), batched.

    Built so that s_voigt . D s_voigt equals eps_ab n^ab for symmetric
    strains; shared by the membrane and bending contractions (only the
    thickness scale differs).
    """
    A11 = a_inv[..., 0, 0]
    A22 = a_inv[..., 1, 1]
    A12 = a_inv[..., 0, 1]
    D = np.empty(a_inv.shape[:-2] + (3, 3))
    D[..., 0, 0] = A11 ** 2
    D[..., 1, 1] = A22 ** 2
    D[..., 0, 1] = D[..., 1, 0] = nu * A11 * A22 + (1.0 - nu) * A12 ** 2
    D[..., 0, 2] = D[..., 2, 0] = A11 * A12
    D[..., 1, 2] = D[..., 2, 1] = A22 * A12
    D[..., 2, 2] = nu * A12 ** 2 + 0.5 * (1.0 - nu) * (A11 * A22 + A12 ** 2)
    if np.ndim(scale) > 0:
        return D * scale[..., None, None]
    return D * scale
