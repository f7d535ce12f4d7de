"""Entropy calculus for unit vector fields.

An entropy here is a smooth vector field Phi with z . DPhi(z) z_perp = 0,
Phi(0) = 0, DPhi(0) = 0; applied to w = (grad u)_perp its distributional
divergence detects gradient jumps of u.  The module provides:

* the two explicit cubic entropies whose vanishing divergence defines the
  regular solution class (``sigma_e1e2`` / ``sigma_eps1eps2``),
* the generator correspondence  Phi(z) = phi(z) z + (grad phi . z_perp) z_perp
  between scalar functions phi and entropies,
* the companion field Psi with DPhi(z) + 2 Psi(z) (x) z isotropic, used in the
  divergence identity  div[Phi(m)] = Psi(m) . grad(1 - |m|^2),
* weak-form entropy production  P_eps(Phi, zeta) = -int Phi(w_eps) . grad zeta,
* the closed-form divergence identities of the two cubic entropies.

Entropy evaluators are pure and vectorized over numpy arrays of z-points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import sympy as sp

from .errors import DomainError, PreconditionError, SingularityError
from .grid import (Mollifier, ScalarField2D, VectorField2D, _dx, _dy,
                   _shrink_mask, divergence, gradient, mollify,
                   second_derivatives)

__all__ = [
    "EntropyGenerator",
    "Entropy",
    "make_entropy",
    "make_psi",
    "psi_antisymmetry",
    "sigma_e1e2_tilde",
    "sigma_eps1eps2_tilde",
    "sigma_e1e2_tilde_jacobian",
    "sigma_eps1eps2_tilde_jacobian",
    "sigma_e1e2",
    "sigma_eps1eps2",
    "SpecialEntropyPair",
    "entropy_production",
    "divergence_identity_check",
    "lemma18_identity_check",
    "EPS1_BASIS",
    "EPS2_BASIS",
]

# the rotated basis obtained from (e1, e2) by an anticlockwise quarter-of-pi turn
EPS1_BASIS = (1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0))
EPS2_BASIS = (-1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0))

_Z1, _Z2 = sp.symbols("z1 z2")


@dataclass(frozen=True)
class EntropyGenerator:
    """A scalar generator phi(z) with evaluators for its z-derivatives.

    ``grad_lap`` evaluates grad(Delta phi), the quantity controlling the
    antisymmetric part of DPsi.  Evaluators take (z1, z2) arrays.
    """

    phi: Callable
    grad: Callable
    hess: Callable
    grad_lap: Callable
    support_radius: float | None = None
    label: str = "phi"

    @classmethod
    def from_expression(cls, expr: str, support_radius: float | None = None) -> "EntropyGenerator":
        """Build analytic evaluators from a sympy expression in z1, z2."""
        e = sp.sympify(expr, locals={"z1": _Z1, "z2": _Z2})
        d1, d2 = sp.diff(e, _Z1), sp.diff(e, _Z2)
        d11, d12, d22 = sp.diff(d1, _Z1), sp.diff(d1, _Z2), sp.diff(d2, _Z2)
        lap = d11 + d22
        gl1, gl2 = sp.diff(lap, _Z1), sp.diff(lap, _Z2)
        fs = [sp.lambdify((_Z1, _Z2), f, modules="numpy")
              for f in (e, d1, d2, d11, d12, d22, gl1, gl2)]

        def _arr(f):
            def run(z1, z2):
                return np.broadcast_to(np.asarray(f(z1, z2), dtype=float),
                                       np.broadcast_shapes(np.shape(z1), np.shape(z2))).copy()
            return run

        phi, p1, p2, p11, p12, p22, g1, g2 = (_arr(f) for f in fs)
        return cls(
            phi=phi,
            grad=lambda z1, z2: (p1(z1, z2), p2(z1, z2)),
            hess=lambda z1, z2: (p11(z1, z2), p12(z1, z2), p22(z1, z2)),
            grad_lap=lambda z1, z2: (g1(z1, z2), g2(z1, z2)),
            support_radius=support_radius,
            label=expr,
        )

    @classmethod
    def from_callable(cls, phi: Callable, step: float = 1e-3,
                      label: str = "phi") -> "EntropyGenerator":
        """Derivatives by 4th-order central differences in z (no closed form)."""

        def d(f, axis):
            def run(z1, z2):
                h = step
                s1 = h if axis == 0 else 0.0
                s2 = h if axis == 1 else 0.0
                return (-f(z1 + 2 * s1, z2 + 2 * s2) + 8 * f(z1 + s1, z2 + s2)
                        - 8 * f(z1 - s1, z2 - s2) + f(z1 - 2 * s1, z2 - 2 * s2)) / (12 * h)
            return run

        p1, p2 = d(phi, 0), d(phi, 1)
        p11, p12, p22 = d(p1, 0), d(p1, 1), d(p2, 1)
        lap = lambda z1, z2: p11(z1, z2) + p22(z1, z2)
        return cls(
            phi=lambda z1, z2: np.asarray(phi(z1, z2), dtype=float),
            grad=lambda z1, z2: (p1(z1, z2), p2(z1, z2)),
            hess=lambda z1, z2: (p11(z1, z2), p12(z1, z2), p22(z1, z2)),
            grad_lap=lambda z1, z2: (d(lap, 0)(z1, z2), d(lap, 1)(z1, z2)),
            label=label,
        )


class Entropy:
    """An entropy with vectorized evaluators Phi(z) and DPhi(z)."""

    def __init__(self, eval_fn, jac_fn=None, label="Phi"):
        self._eval = eval_fn
        self._jac = jac_fn
        self.label = label

    def __call__(self, z1, z2):
        return self._eval(np.asarray(z1, dtype=float), np.asarray(z2, dtype=float))

    def jacobian(self, z1, z2):
        """Entries (P11, P12, P21, P22) of DPhi with Pij = d Phi_i / d z_j."""
        if self._jac is None:
            return self.jacobian_fd(z1, z2)
        return self._jac(np.asarray(z1, dtype=float), np.asarray(z2, dtype=float))

    def jacobian_fd(self, z1, z2, step=1e-5):
        """Finite-difference Jacobian, for derivative-free residual checks."""
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        a1, b1 = self(z1 + step, z2)
        a2, b2 = self(z1 - step, z2)
        c1, d1 = self(z1, z2 + step)
        c2, d2 = self(z1, z2 - step)
        return ((a1 - a2) / (2 * step), (c1 - c2) / (2 * step),
                (b1 - b2) / (2 * step), (d1 - d2) / (2 * step))

    def on_field(self, w: VectorField2D) -> VectorField2D:
        p1, p2 = self(w.values[..., 0], w.values[..., 1])
        vals = np.stack([np.where(w.mask, p1, 0.0), np.where(w.mask, p2, 0.0)], axis=-1)
        return VectorField2D(w.grid, vals, w.mask)


def make_entropy(phi: EntropyGenerator) -> Entropy:
    """Entropy from the generator formula Phi = phi z + (grad phi . z_perp) z_perp."""
    z0 = float(np.asarray(phi.phi(0.0, 0.0)))
    if abs(z0) > 1e-12:
        raise ValueError(f"generator requires phi(0) = 0, got {z0}")

    def eval_fn(z1, z2):
        p = phi.phi(z1, z2)
        g1, g2 = phi.grad(z1, z2)
        q = -g1 * z2 + g2 * z1  # grad phi . z_perp
        return p * z1 - q * z2, p * z2 + q * z1

    def jac_fn(z1, z2):
        p = phi.phi(z1, z2)
        g1, g2 = phi.grad(z1, z2)
        h11, h12, h22 = phi.hess(z1, z2)
        q = -g1 * z2 + g2 * z1
        dq1 = -h11 * z2 + h12 * z1 + g2
        dq2 = -h12 * z2 + h22 * z1 - g1
        p11 = g1 * z1 + p - dq1 * z2
        p12 = g2 * z1 - dq2 * z2 - q
        p21 = g1 * z2 + dq1 * z1 + q
        p22 = g2 * z2 + p + dq2 * z1
        return p11, p12, p21, p22

    return Entropy(eval_fn, jac_fn, label=f"entropy[{phi.label}]")


def make_psi(Phi: Entropy, axis_completion: bool = True, axis_tol: float = 1e-6) -> Callable:
    """Companion field Psi(z) making DPhi(z) + 2 Psi(z) (x) z isotropic.

    Off the coordinate axes Psi is computed from the quotient formulas
    Psi_1 = -Phi_{1,2} / (2 z2), Psi_2 = -Phi_{2,1} / (2 z1); within
    ``axis_tol`` of an axis the defining 2x2 isotropy system is solved
    instead (it is regular for z != 0).
    """

    def psi(z1, z2):
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        p11, p12, p21, p22 = Phi.jacobian(z1, z2)
        near_axis = (np.abs(z1) < axis_tol) | (np.abs(z2) < axis_tol)
        if np.any(near_axis) and not axis_completion:
            raise SingularityError("Psi quotient formulas are singular on the axes")
        safe1 = np.where(np.abs(z1) < axis_tol, 1.0, z1)
        safe2 = np.where(np.abs(z2) < axis_tol, 1.0, z2)
        q1 = -p12 / (2.0 * safe2)
        q2 = -p21 / (2.0 * safe1)
        if np.any(near_axis):
            r2 = z1 * z1 + z2 * z2
            det = np.where(r2 == 0.0, 1.0, 4.0 * r2)
            b1 = p22 - p11
            b2 = -(p12 + p21)
            c1 = (2.0 * z1 * b1 + 2.0 * z2 * b2) / det
            c2 = (-2.0 * z2 * b1 + 2.0 * z1 * b2) / det
            q1 = np.where(near_axis, c1, q1)
            q2 = np.where(near_axis, c2, q2)
        return q1, q2

    return psi


def isotropy_residual(Phi: Entropy, psi: Callable, z1, z2) -> np.ndarray:
    """max of |M11 - M22|, |M12 + M21| for M = DPhi + 2 Psi (x) z."""
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    p11, p12, p21, p22 = Phi.jacobian(z1, z2)
    q1, q2 = psi(z1, z2)
    m11 = p11 + 2 * q1 * z1
    m12 = p12 + 2 * q1 * z2
    m21 = p21 + 2 * q2 * z1
    m22 = p22 + 2 * q2 * z2
    return np.maximum(np.abs(m11 - m22), np.abs(m12 + m21))


def psi_antisymmetry(phi: EntropyGenerator, z, step: float = 1e-4) -> tuple[float, float]:
    """Both sides of  Psi_{1,2}(z) - Psi_{2,1}(z) = (1/2) grad(Delta phi) . z_perp.

    The left side differentiates the quotient-formula Psi by central
    differences, so z must stay off the coordinate axes.
    """
    z1, z2 = float(z[0]), float(z[1])
    if min(abs(z1), abs(z2)) < 10 * step:
        raise SingularityError("psi_antisymmetry requires an off-axis point")
    Phi = make_entropy(phi)
    psi = make_psi(Phi, axis_completion=False)

    def psi1(a, b):
        return psi(a, b)[0]

    def psi2(a, b):
        return psi(a, b)[1]

    lhs = (psi1(z1, z2 + step) - psi1(z1, z2 - step)) / (2 * step) \
        - (psi2(z1 + step, z2) - psi2(z1 - step, z2)) / (2 * step)
    g1, g2 = phi.grad_lap(z1, z2)
    rhs = 0.5 * (-float(g1) * z2 + float(g2) * z1)
    return float(lhs), float(rhs)


# ----------------------------------------------------------------------------
# the two special cubic entropies
# ----------------------------------------------------------------------------

def sigma_e1e2_tilde(z1, z2):
    """(y(1 - x^2 - y^2/3), x(1 - y^2 - x^2/3)) at z = (x, y)."""
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    return z2 * (1 - z1 ** 2 - z2 ** 2 / 3), z1 * (1 - z2 ** 2 - z1 ** 2 / 3)


def sigma_e1e2_tilde_jacobian(z1, z2):
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    p11 = -2 * z1 * z2
    p12 = 1 - z1 ** 2 - z2 ** 2
    p21 = 1 - z2 ** 2 - z1 ** 2
    p22 = -2 * z1 * z2
    return p11, p12, p21, p22


def sigma_eps1eps2_tilde(z1, z2):
    """(-x(1 - 2x^2/3), y(1 - 2y^2/3)) at z = (x, y)."""
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    return -z1 * (1 - 2 * z1 ** 2 / 3), z2 * (1 - 2 * z2 ** 2 / 3)


def sigma_eps1eps2_tilde_jacobian(z1, z2):
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    zero = np.zeros_like(z1 + z2)
    return -1 + 2 * z1 ** 2 + zero, zero, zero, 1 - 2 * z2 ** 2 + zero


SIGMA_E1E2 = Entropy(sigma_e1e2_tilde, sigma_e1e2_tilde_jacobian, label="sigma_e1e2")
SIGMA_EPS1EPS2 = Entropy(sigma_eps1eps2_tilde, sigma_eps1eps2_tilde_jacobian,
                         label="sigma_eps1eps2")


@dataclass(frozen=True)
class SpecialEntropyPair:
    """The fixed cubic pair, bundled for scenario plumbing."""

    e1e2: Entropy = SIGMA_E1E2
    eps1eps2: Entropy = SIGMA_EPS1EPS2


def sigma_e1e2(grad_u: VectorField2D) -> VectorField2D:
    """(u1 (1 - u2^2 - u1^2/3), -u2 (1 - u1^2 - u2^2/3)) from grad u pointwise."""
    u1 = grad_u.values[..., 0]
    u2 = grad_u.values[..., 1]
    vals = np.stack([u1 * (1 - u2 ** 2 - u1 ** 2 / 3),
                     -u2 * (1 - u1 ** 2 - u2 ** 2 / 3)], axis=-1)
    vals[~grad_u.mask] = 0.0
    return VectorField2D(grad_u.grid, vals, grad_u.mask)


def sigma_eps1eps2(grad_u: VectorField2D) -> VectorField2D:
    """(u2 (1 - 2 u2^2/3), u1 (1 - 2 u1^2/3)) from grad u pointwise."""
    u1 = grad_u.values[..., 0]
    u2 = grad_u.values[..., 1]
    vals = np.stack([u2 * (1 - 2 * u2 ** 2 / 3),
                     u1 * (1 - 2 * u1 ** 2 / 3)], axis=-1)
    vals[~grad_u.mask] = 0.0
    return VectorField2D(grad_u.grid, vals, grad_u.mask)


# ----------------------------------------------------------------------------
# entropy production and divergence identities
# ----------------------------------------------------------------------------

def entropy_production(Phi: Entropy, w: VectorField2D, zeta: ScalarField2D,
                       eps: float = 0.0) -> float:
    """Weak production pairing  P_eps(Phi, zeta) = -int Phi(w_eps) . grad zeta dx.

    For eps = 0 the raw field w is paired directly (the limit object).  The
    support of zeta must keep an eps-halo inside the domain rectangle;
    interior excised cells (singular cores) are simply omitted from the
    quadrature, which is consistent with the a.e. formulation.
    """
    grid = w.grid
    h = grid.h
    if eps > 0.0:
        w_eff = mollify(w, Mollifier(eps))
        X, Y = grid.cell_centers()
        halo = ((X > grid.origin[0] + eps) & (X < grid.origin[0] + grid.extent[0] - eps)
                & (Y > grid.origin[1] + eps) & (Y < grid.origin[1] + grid.extent[1] - eps))
        if np.any((zeta.values > 1e-300) & ~halo):
            raise DomainError("zeta support violates the eps-halo of the domain")
    else:
        w_eff = w
    gx = _dx(zeta.values, h)
    gy = _dy(zeta.values, h)
    ok = w_eff.mask & _shrink_mask(zeta.mask)
    p1, p2 = Phi(w_eff.values[..., 0], w_eff.values[..., 1])
    return float(-np.sum(np.where(ok, p1 * gx + p2 * gy, 0.0)) * h * h)


def strong_production_density(Phi: Entropy, w: VectorField2D) -> ScalarField2D:
    """Pointwise discrete divergence of Phi(w); the production heatmap."""
    return divergence(Phi.on_field(w))


def divergence_identity_check(u_eps: ScalarField2D, trim: int = 6) -> tuple[float, float]:
    """Max-norm residuals of the two closed-form divergence identities.

    For smooth v the divergences of the cubic entropy fields collapse to
    (v_11 - v_22)(1 - |grad v|^2) and 2 v_12 (1 - |grad v|^2); both sides are
    evaluated with centered stencils and the max interior discrepancy is
    returned, one value per identity.  ``trim`` drops a boundary ring where
    the iterated stencils are one-sided.
    """
    g = gradient(u_eps)
    f11, f22, f12 = second_derivatives(u_eps)
    s1 = divergence(sigma_e1e2(g))
    s2 = divergence(sigma_eps1eps2(g))
    one_minus = 1.0 - g.magnitude() ** 2
    ok = s1.mask & f12.mask
    ok[:trim, :] = False
    ok[-trim:, :] = False
    ok[:, :trim] = False
    ok[:, -trim:] = False
    if not np.any(ok):
        raise DomainError("no interior cells left after trimming")
    r1 = np.abs(s1.values - (f11.values - f22.values) * one_minus)
    r2 = np.abs(s2.values - 2.0 * f12.values * one_minus)
    return float(np.max(r1[ok])), float(np.max(r2[ok]))


def lemma18_identity_check(phi: EntropyGenerator, m: VectorField2D,
                           div_tol: float = 1e-6, trim: int = 4) -> float:
    """Max residual of  div[Phi(m)] = Psi(m) . grad(1 - |m|^2)  for div-free m."""
    dv = divergence(m)
    if float(np.max(np.abs(dv.values[dv.mask]))) > div_tol:
        raise PreconditionError("m is not discretely divergence-free")
    Phi = make_entropy(phi)
    psi = make_psi(Phi)
    lhs = divergence(Phi.on_field(m))
    q = ScalarField2D(m.grid, 1.0 - m.magnitude() ** 2, m.mask)
    gq = gradient(q)
    q1, q2 = psi(m.values[..., 0], m.values[..., 1])
    rhs = q1 * gq.values[..., 0] + q2 * gq.values[..., 1]
    ok = lhs.mask & gq.mask
    ok[:trim, :] = False
    ok[-trim:, :] = False
    ok[:, :trim] = False
    ok[:, -trim:] = False
    return float(np.max(np.abs(lhs.values - rhs)[ok]))
