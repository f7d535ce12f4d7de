"""Locating gradient singularities and fitting the local cone structure.

The regular solutions are locally Lipschitz away from isolated points around
which u(x) = alpha |x - zeta| with alpha = +-1.  The detector thresholds a
local Lipschitz estimate of grad u against the smooth-field baseline
(1 / distance-to-boundary), clusters the flagged cells, and classifies each
cluster as a point candidate or a line-like diagnostic (jump sets, ridges;
such fields are entropy producers, not members of the regular class).

Point candidates are refined by a least-squares crossing of gradient rays:
for a cone field every line x - t grad u(x) passes through the apex, so

    zeta* = argmin_z sum_cells |(I - g g^T)(x - z)|^2

recovers the center to machine precision on exact data.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ResolutionError
from .grid import ScalarField2D, VectorField2D

__all__ = [
    "lipschitz_map",
    "SingularPoint",
    "LineLikeCluster",
    "DetectionReport",
    "detect_singularities",
    "vortex_fit",
]


def lipschitz_map(grad_u: VectorField2D, scale: float) -> ScalarField2D:
    """Per-cell sup of |v(x+y) - v(x)| / |y| over masked-in pairs, |y| <= scale."""
    grid = grad_u.grid
    h = grid.h
    if scale < 2 * h:
        raise ResolutionError(f"scale {scale} below 2h = {2 * h}")
    m = int(np.floor(scale / h))
    v1 = grad_u.values[..., 0]
    v2 = grad_u.values[..., 1]
    mask = grad_u.mask
    ny, nx = v1.shape
    best = np.zeros((ny, nx))
    seen = np.zeros((ny, nx), dtype=bool)
    for dy in range(-m, m + 1):
        for dx in range(0, m + 1):  # half the offsets; pairs are symmetric
            if dx == 0 and dy <= 0:
                continue
            yy = np.hypot(dx * h, dy * h)
            if yy > scale:
                continue
            sy0, sy1 = max(0, dy), ny + min(0, dy)
            sx0, sx1 = max(0, dx), nx + min(0, dx)
            if sy0 >= sy1 or sx0 >= sx1:
                continue
            a = (slice(sy0, sy1), slice(sx0, sx1))
            b = (slice(sy0 - dy, sy1 - dy), slice(sx0 - dx, sx1 - dx))
            ok = mask[a] & mask[b]
            q = np.where(ok, np.hypot(v1[a] - v1[b], v2[a] - v2[b]) / yy, 0.0)
            np.maximum(best[a], q, out=best[a], where=ok)
            np.maximum(best[b], q, out=best[b], where=ok)
            seen[a] |= ok
            seen[b] |= ok
    return ScalarField2D(grid, np.where(mask & seen, best, 0.0), mask & seen)


@dataclass(frozen=True)
class SingularPoint:
    zeta: tuple[float, float]
    alpha: int
    fit_residual: float
    radius: float
    accepted: bool
    grad_residual: float = float("nan")
    u_at_center: float = float("nan")

    def to_record(self) -> dict:
        return {"zeta": list(self.zeta), "alpha": self.alpha,
                "residual": self.fit_residual, "accepted": self.accepted}


@dataclass(frozen=True)
class LineLikeCluster:
    """A flagged cluster too extended to be a point: jump line or ridge."""

    diameter: float
    cells: int
    bbox: tuple[float, float, float, float]


@dataclass
class DetectionReport:
    candidates: list[tuple[float, float]] = field(default_factory=list)
    line_like: list[LineLikeCluster] = field(default_factory=list)
    threshold_factor: float = 10.0

    @property
    def candidate_count(self) -> int:
        return len(self.candidates)


def _refine_center(grid, g1, g2, mask, guess, rad):
    """Least-squares crossing point of the rays x - t g(x) near the guess.

    Returns (zeta, ok): ok requires the ray bundle to have genuine angular
    aperture and to actually concentrate at the crossing point (rms ray
    distance at cell scale).  Jump-line fragments fail both ways: their two
    parallel ray families leave an rms residual of the fragment's width.
    """
    X, Y = grid.cell_centers()
    sel = mask & (np.hypot(X - guess[0], Y - guess[1]) <= rad)
    count = int(np.count_nonzero(sel))
    if count < 8:
        return guess, False
    x = X[sel]
    y = Y[sel]
    a = g1[sel]
    b = g2[sel]
    s11 = np.sum(1 - a * a)
    s12 = np.sum(-a * b)
    s22 = np.sum(1 - b * b)
    r1 = np.sum((1 - a * a) * x - a * b * y)
    r2 = np.sum(-a * b * x + (1 - b * b) * y)
    M = np.array([[s11, s12], [s12, s22]])
    ev = np.linalg.eigvalsh(M)
    if ev[0] < 1e-2 * max(ev[1], 1e-300):  # rays nearly parallel: no crossing
        return guess, False
    z = np.linalg.solve(M, [r1, r2])
    if np.hypot(z[0] - guess[0], z[1] - guess[1]) > rad:
        return guess, False
    dx = x - z[0]
    dy = y - z[1]
    perp_dist_sq = (dx - (a * dx + b * dy) * a) ** 2 + (dy - (a * dx + b * dy) * b) ** 2
    rms = float(np.sqrt(np.sum(perp_dist_sq) / count))
    return (float(z[0]), float(z[1])), rms <= 1.5 * grid.h


def detect_singularities(grad_u: VectorField2D, threshold_factor: float = 10.0,
                         scale: float | None = None,
                         line_fraction: float = 0.1) -> DetectionReport:
    """Cluster cells whose local Lipschitz estimate beats the smooth baseline.

    A cell is flagged when lipschitz_map exceeds threshold_factor / (distance
    to the domain boundary).  Flagged 8-connected clusters wider than
    ``line_fraction`` of the domain are reported as line-like diagnostics;
    the rest yield refined point candidates.
    """
    grid = grad_u.grid
    h = grid.h
    scale = 4 * h if scale is None else scale
    lmap = lipschitz_map(grad_u, scale)
    X, Y = grid.cell_centers()
    d_boundary = np.minimum(
        np.minimum(X - grid.origin[0], grid.origin[0] + grid.extent[0] - X),
        np.minimum(Y - grid.origin[1], grid.origin[1] + grid.extent[1] - Y))
    flag = lmap.mask & (lmap.values > threshold_factor / d_boundary)
    report = DetectionReport(threshold_factor=threshold_factor)
    labels = np.zeros(flag.shape, dtype=int)
    next_label = 0
    for iy, ix in zip(*np.where(flag)):
        if labels[iy, ix]:
            continue
        next_label += 1
        queue = deque([(iy, ix)])
        labels[iy, ix] = next_label
        cells = []
        while queue:
            y, x = queue.popleft()
            cells.append((y, x))
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    yy, xx = y + dy, x + dx
                    if 0 <= yy < flag.shape[0] and 0 <= xx < flag.shape[1] \
                            and flag[yy, xx] and not labels[yy, xx]:
                        labels[yy, xx] = next_label
                        queue.append((yy, xx))
        ys = np.array([c[0] for c in cells])
        xs = np.array([c[1] for c in cells])
        wx = (xs.max() - xs.min() + 1) * h
        wy = (ys.max() - ys.min() + 1) * h
        diam = float(np.hypot(wx, wy))
        # a jump band or ridge network is extended AND thin (elongated bbox or
        # sparsely filled bbox); a cone's flagged blob is compact and filled,
        # even when the threshold geometry makes it wider than line_fraction
        aspect = max(wx, wy) / min(wx, wy)
        fill = len(cells) * h * h / (wx * wy)
        if diam > line_fraction * max(grid.extent) and (aspect >= 3.0 or fill < 0.4):
            report.line_like.append(LineLikeCluster(
                diameter=diam, cells=len(cells),
                bbox=(float(grid.xs[xs.min()]), float(grid.ys[ys.min()]),
                      float(grid.xs[xs.max()]), float(grid.ys[ys.max()]))))
            continue
        lvals = lmap.values[ys, xs]
        peak = int(np.argmax(lvals))
        py, px = cells[peak]
        near = (np.abs(ys - py) <= 3) & (np.abs(xs - px) <= 3)
        w = lvals[near]
        gx = grid.origin[0] + ((xs[near] * w).sum() / w.sum() + 0.5) * h
        gy = grid.origin[1] + ((ys[near] * w).sum() / w.sum() + 0.5) * h
        zeta, ok = _refine_center(grid, grad_u.values[..., 0], grad_u.values[..., 1],
                                  grad_u.mask, (gx, gy), 8 * h)
        if ok:  # flagged blobs without a ray crossing are jump fragments
            report.candidates.append((float(zeta[0]), float(zeta[1])))
    return report


def vortex_fit(u: ScalarField2D, zeta, radius: float,
               grad_u: VectorField2D | None = None,
               tol: float | None = None,
               core_radius: float | None = None) -> SingularPoint:
    """Fit u ~ c + alpha |x - zeta| on a ball around zeta, choosing the sign.

    Only differences of u enter: the additive constant is fitted as the
    midrange of u(x) - alpha |x - zeta|, so the result is invariant under
    shifting u.  When grad_u is supplied the cone gradient form is checked
    with the same sign and the worse of the two residuals must pass.
    """
    grid = u.grid
    h = grid.h
    tol = 5 * h if tol is None else tol
    core = 2.5 * h if core_radius is None else core_radius
    X, Y = grid.cell_centers()
    r = np.hypot(X - zeta[0], Y - zeta[1])
    sel = u.mask & (r <= radius) & (r >= core)
    if not np.any(sel):
        raise ResolutionError("fit annulus contains no masked-in cells")
    best = None
    for alpha in (1, -1):
        d = u.values[sel] - alpha * r[sel]
        resid = 0.5 * float(d.max() - d.min())
        center_val = 0.5 * float(d.max() + d.min())
        grad_resid = float("nan")
        if grad_u is not None:
            gsel = grad_u.mask & (r <= radius) & (r >= core)
            if np.any(gsel):
                e1 = (X - zeta[0])[gsel] / r[gsel]
                e2 = (Y - zeta[1])[gsel] / r[gsel]
                grad_resid = float(np.max(np.hypot(
                    grad_u.values[..., 0][gsel] - alpha * e1,
                    grad_u.values[..., 1][gsel] - alpha * e2)))
        worst = resid if np.isnan(grad_resid) else max(resid, grad_resid)
        cand = SingularPoint(zeta=(float(zeta[0]), float(zeta[1])), alpha=alpha,
                             fit_residual=resid, radius=radius,
                             accepted=worst <= tol, grad_residual=grad_resid,
                             u_at_center=center_val)
        if best is None or cand.fit_residual < best.fit_residual:
            best = cand
    return best
