"""Closed-form solutions (and violators) of |grad u| = 1, sampled onto grids.

Generators produce the scalar field u and its exact gradient from closed
forms.  The scalar u is Lipschitz and sampled everywhere; the gradient mask
excises cells where the closed form is undefined: a 3x3 block around each
point singularity, and the cell row whose centers lie on a jump line.
The ridge lines of the distance-to-point-set generator are intentionally
left unmasked; its gradient is defined a.e. and the jump across a ridge is
the signal the singularity detector is expected to flag as line-like.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError, DomainError
from .grid import (GridSpec, ScalarField2D, VectorField2D, _dx, _dy,
                   _shrink_mask)

__all__ = [
    "EikonalSolution",
    "vortex",
    "planar",
    "roof",
    "ball_distance",
    "point_set_distance",
    "sample",
    "eikonal_residual",
    "chi",
    "HalfSpaceIndicator",
    "jop_characteristic_residual",
]


@dataclass(frozen=True)
class EikonalSolution:
    """A closed-form u with evaluators for u and grad u plus a grad-mask rule."""

    kind: str
    params: dict
    u_fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    grad_fn: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]
    grad_mask_fn: Callable[[GridSpec], np.ndarray]
    domain_mask_fn: Callable[[GridSpec], np.ndarray] | None = None


def _point_block_mask(grid: GridSpec, points) -> np.ndarray:
    """Mask out the 3x3 block around the cell nearest each singular point."""
    m = np.ones((grid.ny, grid.nx), dtype=bool)
    for p in points:
        iy, ix = grid.nearest_cell(p)
        m[max(0, iy - 1):iy + 2, max(0, ix - 1):ix + 2] = False
    return m


def vortex(center=(0.0, 0.0), sign: int = 1) -> EikonalSolution:
    """u(x) = sign * |x - center|; gradient is the radial unit field."""
    if sign not in (-1, 1):
        raise ConfigurationError("vortex sign must be -1 or +1")
    cx, cy = float(center[0]), float(center[1])

    def u_fn(X, Y):
        return sign * np.hypot(X - cx, Y - cy)

    def grad_fn(X, Y):
        r = np.hypot(X - cx, Y - cy)
        r = np.where(r == 0.0, 1.0, r)
        return sign * (X - cx) / r, sign * (Y - cy) / r

    return EikonalSolution("vortex", {"center": (cx, cy), "sign": sign},
                           u_fn, grad_fn,
                           lambda grid: _point_block_mask(grid, [(cx, cy)]))


def planar(direction=(0.0, 1.0)) -> EikonalSolution:
    """u(x) = x . xi for a unit direction xi; gradient is constant."""
    d = np.asarray(direction, dtype=float)
    if abs(np.hypot(*d) - 1.0) > 1e-12:
        raise ConfigurationError("planar direction must be a unit vector")

    return EikonalSolution(
        "planar", {"direction": tuple(d)},
        lambda X, Y: d[0] * X + d[1] * Y,
        lambda X, Y: (np.full_like(X, d[0]), np.full_like(Y, d[1])),
        lambda grid: np.ones((grid.ny, grid.nx), dtype=bool))


def roof(line_point=(0.0, 0.0), line_normal=(0.0, 1.0),
         grad_plus=None, grad_minus=None) -> EikonalSolution:
    """Two affine pieces glued along a line; the canonical entropy producer.

    Defaults give u(x) = |(x - p) . nu|, i.e. side gradients +-nu.  Arbitrary
    side gradients are accepted when they are unit and tangentially
    continuous across the line, which keeps u continuous.
    """
    p = np.asarray(line_point, dtype=float)
    nu = np.asarray(line_normal, dtype=float)
    nu = nu / np.hypot(*nu)
    gp = nu if grad_plus is None else np.asarray(grad_plus, dtype=float)
    gm = -nu if grad_minus is None else np.asarray(grad_minus, dtype=float)
    tau = np.array([-nu[1], nu[0]])
    if abs(np.hypot(*gp) - 1.0) > 1e-12 or abs(np.hypot(*gm) - 1.0) > 1e-12:
        raise ConfigurationError("roof side gradients must be unit vectors")
    if abs(gp @ tau - gm @ tau) > 1e-12:
        raise ConfigurationError("roof side gradients must agree tangentially")
    if abs(gp @ nu) < 1e-12 or np.sign(gp @ nu) == np.sign(gm @ nu):
        raise ConfigurationError("roof side gradients must point to opposite sides")

    def signed(X, Y):
        return (X - p[0]) * nu[0] + (Y - p[1]) * nu[1]

    def u_fn(X, Y):
        s = signed(X, Y)
        t = (X - p[0]) * tau[0] + (Y - p[1]) * tau[1]
        return np.where(s > 0, gp @ nu, gm @ nu) * s + (gp @ tau) * t

    def grad_fn(X, Y):
        s = signed(X, Y)
        return (np.where(s > 0, gp[0], gm[0]), np.where(s > 0, gp[1], gm[1]))

    def grad_mask_fn(grid):
        X, Y = grid.cell_centers()
        return np.abs(signed(X, Y)) >= 0.5 * grid.h * (1.0 - 1e-12)

    return EikonalSolution("roof", {"line_point": tuple(p), "line_normal": tuple(nu),
                                    "grad_plus": tuple(gp), "grad_minus": tuple(gm)},
                           u_fn, grad_fn, grad_mask_fn)


def ball_distance(center=(0.0, 0.0), radius: float = 0.45) -> EikonalSolution:
    """u = distance to the boundary of the ball, sampled on in-ball cells only."""
    cx, cy = float(center[0]), float(center[1])
    if radius <= 0:
        raise ConfigurationError("ball radius must be positive")

    def u_fn(X, Y):
        return radius - np.hypot(X - cx, Y - cy)

    def grad_fn(X, Y):
        r = np.hypot(X - cx, Y - cy)
        r = np.where(r == 0.0, 1.0, r)
        return -(X - cx) / r, -(Y - cy) / r

    def domain_mask_fn(grid):
        X, Y = grid.cell_centers()
        return np.hypot(X - cx, Y - cy) < radius

    return EikonalSolution("ball", {"center": (cx, cy), "radius": radius},
                           u_fn, grad_fn,
                           lambda grid: _point_block_mask(grid, [(cx, cy)]),
                           domain_mask_fn)


def point_set_distance(points) -> EikonalSolution:
    """u(x) = min_i |x - z_i|; gradient from the nearest point, ridges unmasked."""
    pts = [(float(p[0]), float(p[1])) for p in points]
    if not pts:
        raise ConfigurationError("point set must be non-empty")

    def dists(X, Y):
        return np.stack([np.hypot(X - p[0], Y - p[1]) for p in pts])

    def u_fn(X, Y):
        return np.min(dists(X, Y), axis=0)

    def grad_fn(X, Y):
        d = dists(X, Y)
        idx = np.argmin(d, axis=0)
        gx = np.zeros_like(X, dtype=float)
        gy = np.zeros_like(Y, dtype=float)
        for i, p in enumerate(pts):
            sel = idx == i
            r = np.where(d[i] == 0.0, 1.0, d[i])
            gx = np.where(sel, (X - p[0]) / r, gx)
            gy = np.where(sel, (Y - p[1]) / r, gy)
        return gx, gy

    return EikonalSolution("point_set", {"points": pts},
                           u_fn, grad_fn,
                           lambda grid: _point_block_mask(grid, pts))


def sample(sol: EikonalSolution, grid: GridSpec) -> tuple[ScalarField2D, VectorField2D]:
    """Sample u and grad u from the closed forms onto a grid."""
    X, Y = grid.cell_centers()
    dom = np.ones((grid.ny, grid.nx), dtype=bool)
    if sol.domain_mask_fn is not None:
        dom = sol.domain_mask_fn(grid)
    u = ScalarField2D(grid, np.where(dom, sol.u_fn(X, Y), 0.0), dom)
    gx, gy = sol.grad_fn(X, Y)
    gmask = dom & sol.grad_mask_fn(grid)
    vals = np.stack([np.where(gmask, gx, 0.0), np.where(gmask, gy, 0.0)], axis=-1)
    return u, VectorField2D(grid, vals, gmask)


def eikonal_residual(grad_u: VectorField2D) -> float:
    """max over masked-in cells of | |grad u| - 1 |."""
    mag = grad_u.magnitude()
    return float(np.max(np.abs(mag[grad_u.mask] - 1.0))) if np.any(grad_u.mask) else 0.0


def chi(m: VectorField2D, xi) -> ScalarField2D:
    """Half-space indicator: 1 where m . xi > 0, else 0 (ties map to 0)."""
    xi = np.asarray(xi, dtype=float)
    if abs(np.hypot(*xi) - 1.0) > 1e-12:
        raise ValueError("xi must be a unit vector")
    dot = m.values[..., 0] * xi[0] + m.values[..., 1] * xi[1]
    return ScalarField2D(m.grid, (dot > 0.0).astype(float), m.mask)


@dataclass(frozen=True)
class HalfSpaceIndicator:
    """chi(., xi) of an underlying unit vector field, bundled with xi."""

    xi: tuple[float, float]
    indicator: ScalarField2D

    @classmethod
    def of(cls, m: VectorField2D, xi) -> "HalfSpaceIndicator":
        return cls((float(xi[0]), float(xi[1])), chi(m, xi))


def jop_characteristic_residual(m: VectorField2D, xi, zeta: ScalarField2D,
                                region: np.ndarray | None = None) -> float:
    """Weak characteristic test: integral of chi(x, xi) (xi . grad zeta) dx.

    Zero (up to discretization) iff the transport condition of the
    characteristic indicator holds against the test function zeta.
    """
    ind = chi(m, xi).values
    h = m.grid.h
    gx = _dx(zeta.values, h)
    gy = _dy(zeta.values, h)
    ok = m.mask & _shrink_mask(zeta.mask)
    if region is not None:
        if np.any((zeta.values > 1e-300) & ~region):
            raise DomainError("test function support exits the region")
        ok &= region
    xi = np.asarray(xi, dtype=float)
    return float(np.sum(np.where(ok, ind * (xi[0] * gx + xi[1] * gy), 0.0)) * h * h)
