import numpy as np
import pytest

import eikolab as ek
from eikolab.errors import DomainError, PreconditionError


def unit_grid(n=128):
    return ek.GridSpec((-0.5, -0.5), (1.0, 1.0), n)


def sampled(sol, n=128):
    g = unit_grid(n)
    u, gu = ek.sample(sol, g)
    return g, u, gu


# ---------------------------------------------------------------------------
# fractional seminorm
# ---------------------------------------------------------------------------

def test_seminorm_constant_field_zero():
    g = unit_grid(64)
    v = ek.VectorField2D(g, np.tile([0.3, -0.4], (g.ny, g.nx, 1)))
    assert ek.gagliardo_seminorm(v, 0.3, R=0.1) == 0.0


def test_seminorm_monotone_in_sigma_and_R():
    g, _, gu = sampled(ek.roof(), 64)
    s1 = ek.gagliardo_seminorm(gu, 0.2, R=0.1)
    s2 = ek.gagliardo_seminorm(gu, 0.3, R=0.1)
    s3 = ek.gagliardo_seminorm(gu, 0.3, R=0.15)
    assert s2 >= s1  # offsets are below unit length, larger sigma weighs more
    assert s3 >= s2


def test_seminorm_domain_guard():
    g, _, gu = sampled(ek.roof(), 64)
    with pytest.raises(DomainError):
        ek.gagliardo_seminorm(gu, 0.3, R=0.3, region=ek.interior_region(g, 0.2))
    with pytest.raises(ValueError):
        ek.gagliardo_seminorm(gu, 1.2, R=0.1)


def test_seminorm_exact_scaling_self_similarity():
    # rescaling all lengths by lambda multiplies the discrete sum by
    # lambda^(2 - p sigma) exactly (same n, proportional offsets and h)
    sigma, lam = 0.3, 2.0
    base = ek.GridSpec((-0.5, -0.5), (1.0, 1.0), 96)
    big = ek.GridSpec((-lam / 2, -lam / 2), (lam, lam), 96)
    _, gu0 = ek.sample(ek.roof(), base)
    _, gu1 = ek.sample(ek.roof(), big)
    s0 = ek.gagliardo_seminorm(gu0, sigma, R=0.1, region=ek.interior_region(base, 0.2))
    s1 = ek.gagliardo_seminorm(gu1, sigma, R=lam * 0.1, region=ek.interior_region(big, 0.2))
    assert s1 / s0 == pytest.approx(lam ** (2 - 4 * sigma), rel=1e-12)


def test_seminorm_vortex_converges_roof_diverges():
    vort, roof = [], []
    for n in (64, 128):
        _, _, gu = sampled(ek.vortex((0.031, -0.017)), n)
        g = gu.grid
        vort.append(ek.gagliardo_seminorm(gu, 0.3, R=0.2,
                                          region=ek.interior_region(g, 0.2)))
        _, _, gu = sampled(ek.roof(), n)
        roof.append(ek.gagliardo_seminorm(gu, 0.3, R=0.05,
                                          region=ek.interior_region(g, 0.2)))
    assert vort[1] / vort[0] < 1.35  # approaching a finite limit
    assert roof[1] / roof[0] > 1.3   # diverging under refinement


def test_seminorm_smooth_field_cauchy():
    # for smooth fields the discrete seminorm settles under refinement
    vals = []
    for n in (64, 128, 256):
        g = unit_grid(n)
        X, Y = g.cell_centers()
        v = ek.VectorField2D(g, np.stack([np.sin(2 * X + Y), np.cos(X - Y)], -1))
        vals.append(ek.gagliardo_seminorm(v, 0.3, R=0.1,
                                          region=ek.interior_region(g, 0.2)))
    assert abs(vals[1] - vals[0]) / vals[0] <= 0.05
    assert abs(vals[2] - vals[1]) / vals[1] <= 0.05


def test_seminorm_stride_consistency():
    # strided offset sampling is meant for convergent (regular-field) sweeps
    # with R >> h, where the per-offset integrand varies slowly
    g, _, gu = sampled(ek.vortex((0.031, -0.017)), 128)
    exact = ek.gagliardo_seminorm(gu, 0.3, R=0.2)
    coarse = ek.gagliardo_seminorm(gu, 0.3, R=0.2, stride=2)
    assert coarse == pytest.approx(exact, rel=0.15)


# ---------------------------------------------------------------------------
# eps-scaled quotient
# ---------------------------------------------------------------------------

def test_quotient_constant_zero():
    g = unit_grid(64)
    v = ek.VectorField2D(g, np.tile([1.0, 0.0], (g.ny, g.nx, 1)))
    assert ek.eps_scaled_quotient(v, 0.1) == 0.0


def test_quotient_roof_grows_vortex_shrinks():
    g, _, gu_r = sampled(ek.roof(), 256)
    region = ek.interior_region(g, 0.2)
    qr = [ek.eps_scaled_quotient(gu_r, e, region=region) for e in (0.125, 0.0625)]
    assert qr[1] / qr[0] >= 1.2
    _, _, gu_v = sampled(ek.vortex((0.031, -0.017)), 256)
    qv = [ek.eps_scaled_quotient(gu_v, e, region=region) for e in (0.125, 0.0625)]
    assert qv[1] < qv[0]  # scaled quotient decays for the cone field
    assert max(qv) < 4.5


# ---------------------------------------------------------------------------
# the second-order energy
# ---------------------------------------------------------------------------

def test_energy_planar_zero():
    g, u, _ = sampled(ek.planar((0.0, 1.0)), 64)
    assert ek.aviles_giga_energy(u, 1 / 16) <= 1e-12


def test_energy_optimal_profile():
    # the 1D transition u = eps log cosh(y/eps) across a full gradient
    # reversal costs 8/3 per unit jump length in the eps -> 0 limit
    g = unit_grid(256)
    _, Y = g.cell_centers()
    eps = 1 / 32
    u = ek.ScalarField2D(g, eps * np.log(np.cosh(Y / eps)))
    X, _ = g.cell_centers()
    region = np.abs(X) < 0.3
    e = ek.aviles_giga_energy(u, eps, region=region) / 0.6
    assert e == pytest.approx(8 / 3, rel=0.03)


def test_energy_smoothed_cone_trend():
    vals = []
    for n, eps in ((64, 1 / 8), (128, 1 / 16), (256, 1 / 32)):
        g, u, _ = sampled(ek.vortex((0.0, 0.0)), n)
        ue = ek.mollify(u, ek.Mollifier(eps))
        vals.append(ek.aviles_giga_energy(ue, eps, region=ek.interior_region(g, 0.2)))
    assert vals[2] < vals[1] < vals[0]


# ---------------------------------------------------------------------------
# the smoothing-error estimate
# ---------------------------------------------------------------------------

def test_key_estimate_zero_f():
    g, u, _ = sampled(ek.vortex((0.0, 0.0)), 64)
    f = ek.ScalarField2D(g, np.zeros((g.ny, g.nx)))
    lhs, fnorm = ek.key_estimate_probe(u, 8 * g.h, f)
    assert lhs == 0.0 and fnorm == 0.0


def test_key_estimate_requires_r_at_least_4():
    g, u, _ = sampled(ek.vortex((0.0, 0.0)), 64)
    f = ek.bump_test_function(g, (0.0, 0.0), 0.2)
    with pytest.raises(ValueError):
        ek.key_estimate_probe(u, 8 * g.h, f, r=3.0)


def test_key_estimate_vortex_bounded_roof_grows():
    # the dual norm sup_f lhs / ||f||_r is the quantity bounded uniformly in
    # eps for regular fields; for the jump field it grows like eps^(-1/4)
    # (a fixed smooth f cannot see this: its lhs stays bounded)
    n = 256
    g = unit_grid(n)
    region = ek.interior_region(g, 0.2)
    u_v, _ = ek.sample(ek.vortex((0.031, -0.017)), g)
    u_r, _ = ek.sample(ek.roof(), g)
    eps_list = [2 ** -3, 2 ** -4, 2 ** -5]
    dn_v = [ek.key_estimate_dual_norm(u_v, e, m=1, n=2, region=region) for e in eps_list]
    dn_r = [ek.key_estimate_dual_norm(u_r, e, m=2, n=2, region=region) for e in eps_list]
    assert max(dn_v) / min(dn_v) <= 4.0
    assert dn_r[1] > dn_r[0] and dn_r[2] > dn_r[1]
    # fixed-bump probe: lhs itself and the ratio to ||f|| stay O(1) even for
    # the roof; the blow-up only shows against adapted test functions
    f = ek.bump_test_function(g, (0.0, 0.0), 0.25)
    ratios = []
    for e in eps_list:
        lhs, fnorm = ek.key_estimate_probe(u_r, e, f, m=2, n=2, region=region)
        ratios.append(lhs / fnorm)
    assert max(ratios) / min(ratios) <= 2.0


def test_key_estimate_extremal_f_attains_dual_norm():
    # plugging the L^r dual extremizer into the probe reproduces the dual norm
    g, u, _ = sampled(ek.roof(), 128)
    region = ek.interior_region(g, 0.2)
    eps = 8 * g.h
    dn = ek.key_estimate_dual_norm(u, eps, r=4.0, m=2, n=2, region=region)
    from eikolab.sobolev import _mollified_second
    grad, (f11, f12, f22), ok = _mollified_second(u, eps)
    dens = np.abs(1 - grad.magnitude() ** 2) * np.abs(f22)
    f = ek.ScalarField2D(g, np.where(ok & region, dens, 0.0) ** (1 / 3))
    lhs, fnorm = ek.key_estimate_probe(u, eps, f, r=4.0, m=2, n=2, region=region)
    assert lhs / fnorm == pytest.approx(dn, rel=1e-10)


# ---------------------------------------------------------------------------
# kernel smoothing bounds
# ---------------------------------------------------------------------------

def test_mollification_bounds_unit_fields():
    for sol in (ek.vortex((0.0, 0.0)), ek.roof()):
        g = unit_grid(128)
        _, gu = ek.sample(sol, g)
        w = ek.perp(gu)
        viol = ek.mollification_bounds_check(w, 8 * g.h)
        assert viol == (0, 0)


def test_mollification_bounds_constant_field():
    g = unit_grid(64)
    w = ek.VectorField2D(g, np.tile([0.6, 0.8], (g.ny, g.nx, 1)))
    assert ek.mollification_bounds_check(w, 8 * g.h) == (0, 0)


def test_mollification_bounds_requires_unit_field():
    g = unit_grid(64)
    w = ek.VectorField2D(g, np.tile([0.5, 0.0], (g.ny, g.nx, 1)))
    with pytest.raises(PreconditionError):
        ek.mollification_bounds_check(w, 8 * g.h)
