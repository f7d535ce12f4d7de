"""Fractional difference-quotient metrics and the second-order energy.

The double-sum quadratures here discretize

    [v]^p_{sigma,p,R}  =  int_{region} int_{h <= |y| <= R}
                          |v(x+y) - v(x)|^p / |y|^(2 + p sigma)  dy dx

and the eps-scaled quotient with |y| <= eps and normalization eps^(2 + 4/3).
The self-pair |y| < h is excluded, the discrete analogue of the a.e.
formulation.  Cost is O(N^2 (R/h)^2); a ``stride`` subsamples the offset
lattice with matching quadrature weight for coarse fast passes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PreconditionError
from .grid import (Mollifier, ScalarField2D, VectorField2D, gradient,
                   interior_region, mollify, mollify_derivative,
                   second_derivatives)

__all__ = [
    "gagliardo_seminorm",
    "eps_scaled_quotient",
    "aviles_giga_energy",
    "key_estimate_probe",
    "key_estimate_dual_norm",
    "mollification_bounds_check",
    "SeminormSweep",
    "EnergyReport",
]


def _margin_of(region: np.ndarray, grid) -> float:
    """Distance from the region to the domain rectangle boundary."""
    X, Y = grid.cell_centers()
    xs = X[region]
    ys = Y[region]
    return float(min(xs.min() - grid.origin[0],
                     grid.origin[0] + grid.extent[0] - xs.max(),
                     ys.min() - grid.origin[1],
                     grid.origin[1] + grid.extent[1] - ys.max()))


def _offset_sum(v: VectorField2D, region: np.ndarray, radius: float,
                weight_fn, stride: int = 1, p: float = 4.0) -> float:
    """sum_y w(|y|) sum_x |v(x+y) - v(x)|^p h^2 h'^2 over valid pairs."""
    grid = v.grid
    h = grid.h
    if region is None:
        region = interior_region(grid)
    if not np.any(region):
        raise DomainError("empty region")
    if radius > _margin_of(region, grid) + 1e-12:
        raise DomainError(f"radius {radius} exceeds the region margin")
    m = int(np.floor(radius / h))
    v1 = v.values[..., 0]
    v2 = v.values[..., 1]
    mask = v.mask
    ny, nx = v1.shape
    total = 0.0
    half = p / 2.0
    for dy in range(-m, m + 1, stride):
        for dx in range(-m, m + 1, stride):
            if dx == 0 and dy == 0:
                continue
            yy = np.hypot(dx * h, dy * h)
            if yy > radius:
                continue
            sy0, sy1 = max(0, dy), ny + min(0, dy)
            sx0, sx1 = max(0, dx), nx + min(0, dx)
            if sy0 >= sy1 or sx0 >= sx1:
                continue
            a = (slice(sy0, sy1), slice(sx0, sx1))
            b = (slice(sy0 - dy, sy1 - dy), slice(sx0 - dx, sx1 - dx))
            ok = mask[a] & mask[b] & region[b]
            diff = (v1[a] - v1[b]) ** 2 + (v2[a] - v2[b]) ** 2
            total += float(np.sum(np.where(ok, diff ** half, 0.0))) * weight_fn(yy)
    return total * h * h * (h * stride) ** 2


def gagliardo_seminorm(v: VectorField2D, sigma: float, p: float = 4.0,
                       R: float = 0.1, region: np.ndarray | None = None,
                       stride: int = 1) -> float:
    """Discrete fractional seminorm of order sigma, integrability p, cutoff R."""
    if not 0.0 < sigma < 1.0:
        raise ValueError("sigma must lie in (0, 1)")
    expo = 2.0 + p * sigma
    return _offset_sum(v, region, R, lambda yy: yy ** (-expo), stride=stride, p=p)


def eps_scaled_quotient(v: VectorField2D, eps: float,
                        region: np.ndarray | None = None, stride: int = 1) -> float:
    """int int_{B_eps} |v(x+y) - v(x)|^4 / eps^(2 + 4/3) dy dx."""
    norm = eps ** (2.0 + 4.0 / 3.0)
    return _offset_sum(v, region, eps, lambda yy: 1.0 / norm, stride=stride, p=4.0)


def aviles_giga_energy(u: ScalarField2D, eps: float,
                       region: np.ndarray | None = None) -> float:
    """Quadrature of |1 - |grad u|^2|^2 / eps + eps |D^2 u|^2 over the interior."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    g = gradient(u)
    f11, f22, f12 = second_derivatives(u)
    dens = (1.0 - g.magnitude() ** 2) ** 2 / eps \
        + eps * (f11.values ** 2 + 2.0 * f12.values ** 2 + f22.values ** 2)
    ok = g.mask & f12.mask
    if region is not None:
        ok &= region
    if not np.any(ok):
        raise DomainError("empty region")
    return float(np.sum(dens[ok]) * u.grid.h ** 2)


def _mollified_second(u: ScalarField2D, eps: float):
    ue = mollify(u, Mollifier(eps))
    g = gradient(ue)
    f11, f22, f12 = second_derivatives(ue)
    ok = g.mask & f12.mask
    return g, (f11.values, f12.values, f22.values), ok


def key_estimate_probe(u: ScalarField2D, eps: float, f: ScalarField2D,
                       r: float = 4.0, m: int = 1, n: int = 1,
                       region: np.ndarray | None = None) -> tuple[float, float]:
    """LHS integral and L^r norm of the smoothing-error estimate.

    Returns (int |1 - |grad u_eps|^2| |d_m d_n u_eps| |f| dx, ||f||_{L^r}).
    The lemma behind it requires r >= 4.
    """
    if r < 4.0:
        raise ValueError("the estimate requires r >= 4")
    if m not in (1, 2) or n not in (1, 2):
        raise ValueError("derivative indices must be 1 or 2")
    if eps < 4 * u.grid.h:
        raise PreconditionError("eps must be at least 4h for a resolved kernel")
    g, (f11, f12, f22), ok = _mollified_second(u, eps)
    second = {(1, 1): f11, (1, 2): f12, (2, 1): f12, (2, 2): f22}[(m, n)]
    if region is not None:
        ok = ok & region
    ok = ok & f.mask
    if not np.any(ok):
        raise DomainError("empty region")
    h = u.grid.h
    integrand = np.abs(1.0 - g.magnitude() ** 2) * np.abs(second) * np.abs(f.values)
    lhs = float(np.sum(integrand[ok]) * h * h)
    fnorm = float((np.sum(np.abs(f.values[ok]) ** r) * h * h) ** (1.0 / r))
    return lhs, fnorm


def key_estimate_dual_norm(u: ScalarField2D, eps: float, r: float = 4.0,
                           m: int = 1, n: int = 1,
                           region: np.ndarray | None = None) -> float:
    """sup over f of LHS / ||f||_{L^r}: the L^{r'} norm of the density.

    This is the quantity the estimate actually bounds uniformly in eps; a
    fixed smooth f cannot exhibit the blow-up of entropy producers because
    their density concentrates on an eps-strip, so the extremal f must
    concentrate with it.
    """
    if r < 4.0:
        raise ValueError("the estimate requires r >= 4")
    g, (f11, f12, f22), ok = _mollified_second(u, eps)
    second = {(1, 1): f11, (1, 2): f12, (2, 1): f12, (2, 2): f22}[(m, n)]
    if region is not None:
        ok = ok & region
    if not np.any(ok):
        raise DomainError("empty region")
    rp = r / (r - 1.0)
    h = u.grid.h
    dens = np.abs(1.0 - g.magnitude() ** 2) * np.abs(second)
    return float((np.sum(dens[ok] ** rp) * h * h) ** (1.0 / rp))


def mollification_bounds_check(w: VectorField2D, eps: float,
                               slack: float = 0.05) -> tuple[int, int]:
    """Count violations of the two kernel smoothing bounds on a unit field.

    Bound 1:  1 - |w_eps(x)|^2  <=  (2 sup rho / eps^2) int_{B_eps} |w(x-z) - w(x)|^2 dz
    Bound 2:  |d_j w_eps(x)|    <=  (sup |grad rho| / eps^3) int_{B_eps} |w(x-z) - w(x)| dz

    Discrete both sides; the right sides carry a multiplicative ``slack`` to
    absorb the kernel quadrature normalization.  Contract: zero violations.
    """
    mag = w.magnitude()
    if float(np.max(np.abs(mag[w.mask] - 1.0))) > 1e-10:
        raise PreconditionError("w must be a unit field on masked-in cells")
    grid = w.grid
    h = grid.h
    mol = Mollifier(eps)
    we = mollify(w, mol)
    ok = we.mask
    m = int(np.floor(eps / h))
    w1 = np.where(w.mask, w.values[..., 0], 0.0)
    w2 = np.where(w.mask, w.values[..., 1], 0.0)
    ny, nx = w1.shape
    sum_sq = np.zeros_like(w1)
    sum_abs = np.zeros_like(w1)
    for dy in range(-m, m + 1):
        for dx in range(-m, m + 1):
            if np.hypot(dx * h, dy * h) >= eps:
                continue
            sy0, sy1 = max(0, dy), ny + min(0, dy)
            sx0, sx1 = max(0, dx), nx + min(0, dx)
            a = (slice(sy0, sy1), slice(sx0, sx1))      # x - z cells
            b = (slice(sy0 - dy, sy1 - dy), slice(sx0 - dx, sx1 - dx))  # x cells
            d2 = (w1[a] - w1[b]) ** 2 + (w2[a] - w2[b]) ** 2
            sum_sq[b] += d2
            sum_abs[b] += np.sqrt(d2)
    sum_sq *= h * h
    sum_abs *= h * h
    lhs1 = 1.0 - we.magnitude() ** 2
    rhs1 = (2.0 * mol.sup_rho / eps ** 2) * sum_sq
    viol1 = int(np.sum(ok & (lhs1 > (1.0 + slack) * rhs1 + 1e-14)))
    d1 = mollify_derivative_magnitude(w, mol)
    rhs2 = (mol.sup_grad_rho / eps ** 3) * sum_abs
    viol2 = int(np.sum(ok & (d1 > (1.0 + slack) * rhs2 + 1e-14)))
    return viol1, viol2


def mollify_derivative_magnitude(w: VectorField2D, mol: Mollifier) -> np.ndarray:
    """max over j of |d_j w_eps| via the kernel-gradient convolution."""
    out = np.zeros((w.grid.ny, w.grid.nx))
    for axis in (0, 1):
        d = mollify_derivative(w, mol, axis)
        out = np.maximum(out, d.magnitude() * d.mask)
    return out


@dataclass
class SeminormSweep:
    """Fractional seminorm values over (sigma, h) ladders at fixed cutoff R."""

    sigma_list: list[float]
    p: float
    R: float
    rows: list[dict] = field(default_factory=list)  # {n, h, sigma, value}

    def add(self, n: int, h: float, sigma: float, value: float):
        self.rows.append({"n": n, "h": h, "sigma": sigma, "value": value})

    def values_for(self, sigma: float) -> list[float]:
        return [r["value"] for r in self.rows if r["sigma"] == sigma]


@dataclass
class EnergyReport:
    """Second-order energy along an eps ladder."""

    eps_list: list[float]
    values: list[float] = field(default_factory=list)

    @property
    def limit_estimate(self) -> float:
        return self.values[-1] if self.values else float("nan")
