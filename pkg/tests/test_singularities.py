import numpy as np
import pytest

import eikolab as ek
from eikolab.errors import ResolutionError


def unit_grid(n=128):
    return ek.GridSpec((-0.5, -0.5), (1.0, 1.0), n)


# ---------------------------------------------------------------------------
# local Lipschitz estimate
# ---------------------------------------------------------------------------

def test_lipschitz_map_planar_zero():
    g = unit_grid(64)
    _, gu = ek.sample(ek.planar((0.0, 1.0)), g)
    lm = ek.lipschitz_map(gu, 4 * g.h)
    assert np.max(lm.values[lm.mask]) == 0.0


def test_lipschitz_map_vortex_inverse_distance():
    g = unit_grid(256)
    _, gu = ek.sample(ek.vortex((0.0, 0.0)), g)
    lm = ek.lipschitz_map(gu, 4 * g.h)
    X, Y = g.cell_centers()
    r = np.hypot(X, Y)
    sel = lm.mask & (r > 0.1) & (r < 0.4)
    rel_err = np.abs(lm.values[sel] * r[sel] - 1.0)
    assert np.max(rel_err) <= 0.2


def test_lipschitz_map_roof_jump_scale():
    g = unit_grid(128)  # even n: valid rows straddle the line at distance h
    _, gu = ek.sample(ek.roof(), g)
    lm = ek.lipschitz_map(gu, 4 * g.h)
    _, Y = g.cell_centers()
    adj = lm.mask & (np.abs(Y) < g.h)
    assert np.max(lm.values[adj]) == pytest.approx(2.0 / g.h, rel=1e-12)


def test_lipschitz_map_resolution_guard():
    g = unit_grid(64)
    _, gu = ek.sample(ek.planar((0.0, 1.0)), g)
    with pytest.raises(ResolutionError):
        ek.lipschitz_map(gu, g.h)


# ---------------------------------------------------------------------------
# detection
# ---------------------------------------------------------------------------

def test_detect_planar_empty_all_resolutions():
    for n in (64, 128, 256):
        g = unit_grid(n)
        _, gu = ek.sample(ek.planar((0.6, 0.8)), g)
        rep = ek.detect_singularities(gu)
        assert rep.candidate_count == 0 and not rep.line_like


def test_detect_vortex_single_candidate():
    zeta = (0.3, -0.1)
    for n in (256, 512):
        g = unit_grid(n)
        _, gu = ek.sample(ek.vortex(zeta), g)
        rep = ek.detect_singularities(gu)
        assert rep.candidate_count == 1
        cand = rep.candidates[0]
        assert np.hypot(cand[0] - zeta[0], cand[1] - zeta[1]) <= 2 * g.h


def test_detect_roof_line_like_only():
    g = unit_grid(256)
    _, gu = ek.sample(ek.roof(), g)
    rep = ek.detect_singularities(gu)
    assert rep.candidate_count == 0
    assert len(rep.line_like) >= 1
    assert rep.line_like[0].diameter > 0.1


def test_detect_multi_vortex_counts():
    pts = [(-0.22, -0.18), (0.2, 0.05), (-0.05, 0.25)]
    g = unit_grid(256)
    _, gu = ek.sample(ek.point_set_distance(pts), g)
    rep = ek.detect_singularities(gu)
    assert rep.candidate_count == len(pts)
    for c in rep.candidates:
        assert min(np.hypot(c[0] - p[0], c[1] - p[1]) for p in pts) <= 2 * g.h
    assert len(rep.line_like) >= 1  # the ridge set, intentionally flagged


# ---------------------------------------------------------------------------
# cone fit
# ---------------------------------------------------------------------------

def test_vortex_fit_exact_both_signs():
    g = unit_grid(256)
    for alpha in (1, -1):
        u, gu = ek.sample(ek.vortex((0.1, 0.2), alpha), g)
        fit = ek.vortex_fit(u, (0.1, 0.2), radius=0.15, grad_u=gu)
        assert fit.alpha == alpha
        assert fit.fit_residual <= 1e-12
        assert fit.grad_residual <= 1e-12
        assert fit.accepted


def test_vortex_fit_shift_invariance():
    g = unit_grid(128)
    u, _ = ek.sample(ek.vortex((0.0, 0.0)), g)
    shifted = ek.ScalarField2D(g, u.values + 17.3, u.mask)
    a = ek.vortex_fit(u, (0.0, 0.0), radius=0.2)
    b = ek.vortex_fit(shifted, (0.0, 0.0), radius=0.2)
    assert a.alpha == b.alpha
    assert a.fit_residual == pytest.approx(b.fit_residual, abs=1e-12)


def test_vortex_fit_perturbation_sweep():
    g = unit_grid(256)
    X, Y = g.cell_centers()
    u0, gu = ek.sample(ek.vortex((0.0, 0.0)), g)
    wave = np.sin(2 * np.pi * X) * np.sin(2 * np.pi * Y)  # full swing on the annulus
    small = ek.ScalarField2D(g, u0.values + 0.5 * g.h * wave, u0.mask)
    fit = ek.vortex_fit(small, (0.0, 0.0), radius=0.3)
    assert fit.accepted and fit.fit_residual <= 5 * g.h
    large = ek.ScalarField2D(g, u0.values + 10 * g.h * wave, u0.mask)
    fit = ek.vortex_fit(large, (0.0, 0.0), radius=0.3)
    assert not fit.accepted


def test_vortex_fit_rejects_roof_structure():
    g = unit_grid(128)
    u, gu = ek.sample(ek.roof(), g)
    fit = ek.vortex_fit(u, (0.0, 0.0), radius=0.2, grad_u=gu)
    assert not fit.accepted


def test_singular_point_record():
    g = unit_grid(128)
    u, gu = ek.sample(ek.vortex((0.0, 0.0)), g)
    fit = ek.vortex_fit(u, (0.0, 0.0), radius=0.2, grad_u=gu)
    rec = fit.to_record()
    assert set(rec) == {"zeta", "alpha", "residual", "accepted"}
