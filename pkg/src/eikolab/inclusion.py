"""The matrix family M(theta), its Beltrami form, and the gradient transform.

A unit-gradient u with vanishing cubic-entropy divergences induces a map F
whose Jacobian lies pointwise in the one-parameter compact family

    M(theta) = [[ (2/3) sin^3 t,                (2/3) cos^3 t              ],
                [ -cos t (1 - (2/3) cos^2 t),   sin t (1 - (2/3) sin^2 t)  ]].

Writing v = F_1 + i F_2, membership DF in K = {M(theta)} is equivalent to the
constrained non-linear Beltrami system

    dv/dzbar = (4/3) (dv/dz)^3,   |dv/dz| = 1/2.

The family has no rank-one connections: det(M(t+a) - M(t)) = f(a) > 0 for
a in (0, 2pi), with the theta-independent kernels

    f(a) = 4/9 - (2/3) cos a + (2/9) cos^3 a   (determinant),
    g(a) = 10/9 - (2/3) cos a - (4/9) cos^3 a  (squared Frobenius norm),

and f/g^2 is bounded below by a positive constant, measured here by brute
force (the small-angle limit gives 1/6; reported as a derived conjecture).

Norm convention: |A|^2 sums all four squared entries, so |M(theta)|^2 = 5/9
for every theta.  Under the half-norm (Hilbert-Schmidt/2) convention the
same constant reads 10/36.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import PreconditionError
from .grid import (MatrixField2D, ScalarField2D, VectorField2D, _dx, _dy,
                   _shrink_mask)
from .solutions import eikonal_residual

__all__ = [
    "conformal_split",
    "KMatrix",
    "k_matrix",
    "k_matrix_values",
    "WirtingerPair",
    "wirtinger",
    "beltrami_residual",
    "phase_recover",
    "det_kernel",
    "c0_bruteforce",
    "C0Result",
    "gamma_forward",
    "GammaForward",
    "gamma_inverse",
]


def conformal_split(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unique decomposition A = [A]_c + [A]_a; determinants add exactly.

    Works on any (..., 2, 2) stack.
    """
    A = np.asarray(A, dtype=float)
    a11, a12 = A[..., 0, 0], A[..., 0, 1]
    a21, a22 = A[..., 1, 0], A[..., 1, 1]
    s = 0.5 * (a11 + a22)
    r = 0.5 * (a21 - a12)
    p = 0.5 * (a11 - a22)
    q = 0.5 * (a21 + a12)
    c = np.stack([np.stack([s, -r], axis=-1), np.stack([r, s], axis=-1)], axis=-2)
    a = np.stack([np.stack([p, q], axis=-1), np.stack([q, -p], axis=-1)], axis=-2)
    return c, a


def k_matrix_values(theta) -> np.ndarray:
    """M(theta) for an array of phases; shape theta.shape + (2, 2)."""
    t = np.asarray(theta, dtype=float)
    s, c = np.sin(t), np.cos(t)
    row1 = np.stack([(2.0 / 3.0) * s ** 3, (2.0 / 3.0) * c ** 3], axis=-1)
    row2 = np.stack([-c * (1 - (2.0 / 3.0) * c ** 2), s * (1 - (2.0 / 3.0) * s ** 2)], axis=-1)
    return np.stack([row1, row2], axis=-2)


@dataclass(frozen=True)
class KMatrix:
    """One member of the family, with its phase."""

    theta: float
    matrix: np.ndarray

    @property
    def conformal(self) -> np.ndarray:
        return conformal_split(self.matrix)[0]

    @property
    def anticonformal(self) -> np.ndarray:
        return conformal_split(self.matrix)[1]

    @property
    def frobenius_sq(self) -> float:
        return float(np.sum(self.matrix ** 2))


def k_matrix(theta: float) -> KMatrix:
    t = float(theta) % (2.0 * np.pi)
    return KMatrix(t, k_matrix_values(t))


@dataclass(frozen=True)
class WirtingerPair:
    """Complex derivatives recovered from a Jacobian via the conformal split."""

    dz: complex
    dzbar: complex

    @classmethod
    def from_matrix(cls, A: np.ndarray) -> "WirtingerPair":
        dz, dzbar = wirtinger(A)
        return cls(complex(dz), complex(dzbar))


def wirtinger(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(dv/dz, dv/dzbar) of v = A-row1 + i A-row2, vectorized over (..., 2, 2).

    The conformal part represents dv/dz directly; the anticonformal part
    times diag(1, -1) represents dv/dzbar.
    """
    c, a = conformal_split(A)
    dz = c[..., 0, 0] + 1j * c[..., 1, 0]
    dzbar = a[..., 0, 0] + 1j * a[..., 1, 0]
    return dz, dzbar


def beltrami_residual(DF) -> tuple[np.ndarray, np.ndarray]:
    """(r1, r2) with r1 = |dzbar - (4/3) dz^3| and r2 = ||dz| - 1/2|.

    Both vanish exactly on the family; accepts a raw (..., 2, 2) array or a
    MatrixField2D (masked-out cells give zero residual).
    """
    if isinstance(DF, MatrixField2D):
        A = np.where(DF.mask[..., None, None], DF.values, 0.0)
        dz, dzbar = wirtinger(A)
        r1 = np.abs(dzbar - (4.0 / 3.0) * dz ** 3)
        r2 = np.abs(np.abs(dz) - 0.5)
        r1[~DF.mask] = 0.0
        r2[~DF.mask] = 0.0
        return r1, r2
    dz, dzbar = wirtinger(np.asarray(DF, dtype=float))
    return np.abs(dzbar - (4.0 / 3.0) * dz ** 3), np.abs(np.abs(dz) - 0.5)


def phase_recover(A: np.ndarray, tol: float = 1e-6) -> float:
    """Phase from cos t = A12 - A21, sin t = A11 + A22, mapped to [0, 2pi).

    Raises PreconditionError when M(theta) fails to reproduce A within tol.
    """
    A = np.asarray(A, dtype=float)
    c = A[0, 1] - A[1, 0]
    s = A[0, 0] + A[1, 1]
    t = float(np.arctan2(s, c) % (2.0 * np.pi))
    err = float(np.max(np.abs(k_matrix_values(t) - A)))
    if err > tol:
        raise PreconditionError(f"matrix is {err:.3e} away from the family (tol {tol:.1e})")
    return t


# ----------------------------------------------------------------------------
# the trigonometric kernels of the rank-one-connection estimate
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class DetKernel:
    f: np.ndarray
    g: np.ndarray
    ratio: np.ndarray


def det_kernel(alpha) -> DetKernel:
    """f(a) = det(M(t+a) - M(t)), g(a) = |M(t+a) - M(t)|^2, ratio = f/g^2.

    Both are independent of the base phase t.  The ratio is NaN at a = 0
    where f = g = 0; its small-angle limit is 1/6.
    """
    a = np.asarray(alpha, dtype=float)
    ca = np.cos(a)
    f = 4.0 / 9.0 - (2.0 / 3.0) * ca + (2.0 / 9.0) * ca ** 3
    g = 10.0 / 9.0 - (2.0 / 3.0) * ca - (4.0 / 9.0) * ca ** 3
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(g > 0, f / np.where(g > 0, g, 1.0) ** 2, np.nan)
    return DetKernel(f, g, ratio)


@dataclass(frozen=True)
class C0Result:
    """Brute-force certificate for det(A - B) >= c0 |A - B|^4 on the family.

    ``c0`` is the refined minimum of f/g^2 over the sampled phase gaps; the
    numeric value (1/6, attained in the small-gap limit) is a derived
    conjecture, not a constant asserted by the theory, which only provides
    existence of a positive c0.
    """

    c0: float
    alpha_at_min: float
    f_min: float
    n_samples: int
    conjecture: str = "c0 = 1/6 from the small-angle expansion; derived, not asserted"


def c0_bruteforce(n_samples: int = 100_000, alpha_min: float = 1e-3) -> C0Result:
    """Grid scan of f/g^2 over [alpha_min, 2pi - alpha_min] plus local refinement."""
    if n_samples < 10_000:
        raise ValueError("n_samples must be at least 10^4")
    alphas = np.linspace(alpha_min, 2.0 * np.pi - alpha_min, n_samples)
    k = det_kernel(alphas)
    i = int(np.argmin(k.ratio))
    lo = alphas[max(i - 1, 0)]
    hi = alphas[min(i + 1, n_samples - 1)]
    res = minimize_scalar(lambda a: float(det_kernel(a).ratio), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-12})
    c0 = min(float(res.fun), float(k.ratio[i]))
    return C0Result(c0=c0,
                    alpha_at_min=float(res.x if res.fun <= k.ratio[i] else alphas[i]),
                    f_min=float(np.min(k.f)),
                    n_samples=n_samples)


# ----------------------------------------------------------------------------
# the gradient transform and its inverse
# ----------------------------------------------------------------------------

def df_from_gradient(grad_u: VectorField2D) -> MatrixField2D:
    """Assemble the Jacobian field pointwise from grad u.

    Row 1 is the quarter-turn of the e1e2 cubic entropy of u, row 2 the
    quarter-turn of the eps1eps2 one, so each row is a gradient exactly when
    the corresponding entropy divergence vanishes.
    """
    u1 = grad_u.values[..., 0]
    u2 = grad_u.values[..., 1]
    a = u2 * (1 - u1 ** 2 - u2 ** 2 / 3)
    b = u1 * (1 - u2 ** 2 - u1 ** 2 / 3)
    c = -u1 * (1 - 2 * u1 ** 2 / 3)
    d = u2 * (1 - 2 * u2 ** 2 / 3)
    vals = np.stack([np.stack([a, b], axis=-1), np.stack([c, d], axis=-1)], axis=-2)
    vals[~grad_u.mask] = 0.0
    return MatrixField2D(grad_u.grid, vals, grad_u.mask)


def _curl_stats(P: np.ndarray, Q: np.ndarray, mask: np.ndarray, h: float):
    """(L1 mass, max) of the discrete curl d1 Q - d2 P over interior cells."""
    cur = _dx(Q, h) - _dy(P, h)
    ok = _shrink_mask(mask)
    vals = np.abs(cur[ok])
    if vals.size == 0:
        return 0.0, 0.0
    return float(np.sum(vals) * h * h), float(np.max(vals))


def _line_cumulative(vals: np.ndarray, valid: np.ndarray, h: float, i0: int):
    """Trapezoid antiderivative along the last axis, anchored at index i0."""
    out = np.zeros_like(vals)
    ok = np.zeros(vals.shape, dtype=bool)
    ok[..., i0] = valid[..., i0]
    n = vals.shape[-1]
    for i in range(i0 + 1, n):
        out[..., i] = out[..., i - 1] + 0.5 * h * (vals[..., i - 1] + vals[..., i])
        ok[..., i] = ok[..., i - 1] & valid[..., i] & valid[..., i - 1]
    for i in range(i0 - 1, -1, -1):
        out[..., i] = out[..., i + 1] - 0.5 * h * (vals[..., i] + vals[..., i + 1])
        ok[..., i] = ok[..., i + 1] & valid[..., i] & valid[..., i + 1]
    return np.where(ok, out, 0.0), ok


def _potential(P: np.ndarray, Q: np.ndarray, mask: np.ndarray, h: float,
               anchor: tuple[int, int]):
    """Potential of (P, Q) by two staircase paths from the anchor cell.

    Returns (F, valid, discrepancy) where discrepancy is the max difference
    between the row-then-column and column-then-row path integrals over
    cells reachable by both.
    """
    ay, ax = anchor
    row_f, row_ok = _line_cumulative(P[ay, :], mask[ay, :], h, ax)
    col_f, col_ok = _line_cumulative(Q.T, mask.T, h, ay)
    f_rc = row_f[None, :] + col_f.T
    ok_rc = row_ok[None, :] & col_ok.T

    col0_f, col0_ok = _line_cumulative(Q[:, ax], mask[:, ax], h, ay)
    rows_f, rows_ok = _line_cumulative(P, mask, h, ax)
    f_cr = col0_f[:, None] + rows_f
    ok_cr = col0_ok[:, None] & rows_ok

    both = ok_rc & ok_cr
    disc = float(np.max(np.abs(f_rc - f_cr)[both])) if np.any(both) else np.inf
    f = np.where(ok_rc, f_rc, f_cr)
    valid = ok_rc | ok_cr
    return np.where(valid, f, 0.0), valid, disc


@dataclass(frozen=True)
class GammaForward:
    """Jacobian field, reconstructed potential and integrability diagnostics."""

    DF: MatrixField2D
    F: VectorField2D
    path_residual: float
    curl_l1: tuple[float, float]
    curl_max: tuple[float, float]
    in_e_omega: bool


def gamma_forward(u: ScalarField2D, grad_u: VectorField2D,
                  curl_l1_tol: float = 0.25,
                  unit_tol: float = 1e-10) -> GammaForward:
    """Build DF from grad u and reconstruct F by path integration.

    The integrability certificate is the L1 mass of the discrete curl of
    each row (sum of |curl| h^2): it stays O(h) for fields with vanishing
    entropy divergences and measures the jump line mass (4/3 per unit
    length) for entropy producers, which are flagged ``in_e_omega=False``.
    The anchor is the masked-in cell nearest the domain center with F = 0.
    """
    if eikonal_residual(grad_u) > unit_tol:
        raise PreconditionError("grad u must be a unit field on masked-in cells")
    grid = grad_u.grid
    DF = df_from_gradient(grad_u)
    h = grid.h
    rows = [(DF.values[..., 0, 0], DF.values[..., 0, 1]),
            (DF.values[..., 1, 0], DF.values[..., 1, 1])]
    curls = [_curl_stats(P, Q, DF.mask, h) for P, Q in rows]
    in_e = max(c[0] for c in curls) <= curl_l1_tol

    center = (grid.origin[0] + 0.5 * grid.extent[0], grid.origin[1] + 0.5 * grid.extent[1])
    iy0, ix0 = grid.nearest_cell(center)
    ys, xs = np.where(DF.mask)
    if ys.size == 0:
        raise PreconditionError("no masked-in cells")
    # nearest valid cell to the center whose row and column are useful anchors
    order = np.argsort((ys - iy0) ** 2 + (xs - ix0) ** 2, kind="stable")
    ay, ax = int(ys[order[0]]), int(xs[order[0]])

    comps = []
    valid = np.ones_like(DF.mask)
    disc = 0.0
    for P, Q in rows:
        f, ok, d = _potential(P, Q, DF.mask, h, (ay, ax))
        comps.append(f)
        valid &= ok
        disc = max(disc, d)
    F = VectorField2D(grid, np.stack(comps, axis=-1), valid)
    return GammaForward(DF=DF, F=F, path_residual=disc,
                        curl_l1=(curls[0][0], curls[1][0]),
                        curl_max=(curls[0][1], curls[1][1]),
                        in_e_omega=bool(in_e))


def gamma_inverse(DF: MatrixField2D, tol: float = 1e-6) -> VectorField2D:
    """Recover grad u from DF by the two linear combinations of entries.

    u_1 = DF_12 - DF_21 and u_2 = DF_11 + DF_22; exact (pointwise algebra,
    no differentiation) whenever DF lies on the family.  Cells further than
    ``tol`` from the family (Beltrami residuals) raise a PreconditionError.
    """
    r1, r2 = beltrami_residual(DF)
    worst = float(np.max(np.maximum(r1, r2)[DF.mask])) if np.any(DF.mask) else 0.0
    if worst > tol:
        raise PreconditionError(f"DF is {worst:.3e} away from the family (tol {tol:.1e})")
    u1 = DF.values[..., 0, 1] - DF.values[..., 1, 0]
    u2 = DF.values[..., 0, 0] + DF.values[..., 1, 1]
    vals = np.stack([u1, u2], axis=-1)
    vals[~DF.mask] = 0.0
    return VectorField2D(DF.grid, vals, DF.mask)
