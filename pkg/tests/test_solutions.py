import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import eikolab as ek
from eikolab.errors import ConfigurationError


def unit_grid(n=64):
    return ek.GridSpec((-0.5, -0.5), (1.0, 1.0), n)


def test_vortex_point_values():
    g = ek.GridSpec((-1.5, -1.5), (3.0, 3.0), 96)
    sol = ek.vortex((0.0, 0.0), 1)
    X, Y = g.cell_centers()
    u, gu = ek.sample(sol, g)
    i = np.argmin(np.hypot(X - 1.0, Y))  # cell nearest (1, 0)
    iy, ix = np.unravel_index(i, X.shape)
    assert u.values[iy, ix] == pytest.approx(np.hypot(X[iy, ix], Y[iy, ix]))
    assert gu.values[iy, ix, 0] == pytest.approx(X[iy, ix] / np.hypot(X[iy, ix], Y[iy, ix]))


def test_vortex_masks_core_block():
    g = unit_grid(64)
    u, gu = ek.sample(ek.vortex((0.0, 0.0)), g)
    iy, ix = g.nearest_cell((0.0, 0.0))
    assert not gu.mask[iy - 1:iy + 2, ix - 1:ix + 2].any()
    assert u.mask.all()  # the scalar itself is defined everywhere


def test_planar_sample():
    g = unit_grid(32)
    u, gu = ek.sample(ek.planar((0.0, 1.0)), g)
    X, Y = g.cell_centers()
    assert np.allclose(u.values, Y)
    assert np.allclose(gu.values[..., 0], 0.0) and np.allclose(gu.values[..., 1], 1.0)
    assert gu.mask.all()


def test_roof_sample_and_masking():
    # odd n: one row of centers sits exactly on the line and is masked
    g = unit_grid(65)
    u, gu = ek.sample(ek.roof(), g)
    X, Y = g.cell_centers()
    assert np.allclose(u.values, np.abs(Y))
    on_line = np.isclose(Y, 0.0)
    assert on_line.any() and not gu.mask[on_line].any()
    # even n: no center on the line, nothing masked
    g2 = unit_grid(64)
    _, gu2 = ek.sample(ek.roof(), g2)
    assert gu2.mask.all()
    assert np.allclose(gu2.values[..., 1], np.sign(g2.cell_centers()[1]))


def test_roof_side_gradient_validation():
    ek.roof(grad_plus=(0.6, 0.8), grad_minus=(0.6, -0.8))  # tangentially continuous
    with pytest.raises(ConfigurationError):
        ek.roof(grad_plus=(0.6, 0.8), grad_minus=(0.8, -0.6))
    with pytest.raises(ConfigurationError):
        ek.roof(grad_plus=(1.0, 1.0))


def test_ball_distance_masks_outside():
    g = unit_grid(64)
    u, gu = ek.sample(ek.ball_distance((0.0, 0.0), 0.4), g)
    X, Y = g.cell_centers()
    assert not u.mask[np.hypot(X, Y) >= 0.4].any()
    assert ek.eikonal_residual(gu) < 1e-12


def test_eikonal_residual_examples():
    g = unit_grid(64)
    for sol in (ek.vortex((0.1, 0.0)), ek.planar(), ek.roof()):
        _, gu = ek.sample(sol, g)
        assert ek.eikonal_residual(gu) <= 1e-12
    two = ek.VectorField2D(g, np.tile([2.0, 0.0], (g.ny, g.nx, 1)))
    assert ek.eikonal_residual(two) == pytest.approx(1.0)


def test_mollified_vortex_residual_profile():
    g = unit_grid(128)
    _, gu = ek.sample(ek.vortex((0.0, 0.0)), g)
    ge = ek.mollify(gu, ek.Mollifier(8 * g.h))
    X, Y = g.cell_centers()
    r = np.hypot(X, Y)
    res = np.abs(ge.magnitude() - 1.0)
    near = ge.mask & (r < 0.12) & (r > 0.06)
    far = ge.mask & (r > 0.35)
    assert res[near].max() > 10 * res[far].max() > 0


def test_vortex_loops_are_curl_consistent():
    # circulation of grad u around square loops away from the center is O(h^2)
    circs = []
    for n in (64, 128):
        g = unit_grid(n)
        _, gu = ek.sample(ek.vortex((0.0, 0.0)), g)
        v = gu.values
        iy, ix = g.nearest_cell((0.21, 0.13))
        m = 6 if n == 64 else 12  # same physical loop at both resolutions
        h = g.h

        def edge(samples):  # trapezoid along one edge
            return (0.5 * samples[0] + samples[1:-1].sum() + 0.5 * samples[-1]) * h

        circ = (edge(v[iy - m, ix - m:ix + m + 1, 0])
                + edge(v[iy - m:iy + m + 1, ix + m, 1])
                - edge(v[iy + m, ix - m:ix + m + 1, 0])
                - edge(v[iy - m:iy + m + 1, ix - m, 1]))
        circs.append(abs(circ))
    assert circs[0] < 2e-4
    assert circs[1] < 0.3 * circs[0]  # O(h^2) shrinks by ~4 per halving


def test_point_set_distance_field():
    g = unit_grid(64)
    pts = [(-0.2, -0.2), (0.25, 0.1)]
    u, gu = ek.sample(ek.point_set_distance(pts), g)
    X, Y = g.cell_centers()
    d = np.minimum(np.hypot(X + 0.2, Y + 0.2), np.hypot(X - 0.25, Y - 0.1))
    assert np.allclose(u.values, d)
    assert ek.eikonal_residual(gu) < 1e-12


# ---------------------------------------------------------------------------
# half-space indicator and the characteristic test
# ---------------------------------------------------------------------------

def test_chi_examples():
    g = unit_grid(32)
    e1 = ek.VectorField2D(g, np.tile([1.0, 0.0], (g.ny, g.nx, 1)))
    assert np.all(ek.chi(e1, (1.0, 0.0)).values == 1.0)
    assert np.all(ek.chi(e1, (0.0, 1.0)).values == 0.0)  # ties go to 0
    with pytest.raises(ValueError):
        ek.chi(e1, (1.0, 1.0))


def test_chi_vortex_half_plane():
    g = unit_grid(128)
    zeta = (0.1, -0.05)
    _, gu = ek.sample(ek.vortex(zeta), g)
    w = ek.perp(gu)
    c = ek.chi(w, (1.0, 0.0))
    X, Y = g.cell_centers()
    # w . e1 = -(x - zeta) . e1_perp / r: indicator of the half plane below the
    # horizontal line through zeta (discontinuity parallel to xi)
    expected = ((Y - zeta[1]) < 0).astype(float)
    sel = c.mask & (np.abs(Y - zeta[1]) > g.h)
    assert np.array_equal(c.values[sel], expected[sel])


@given(st.floats(0.1, 50.0), st.integers(0, 2 ** 31 - 1))
@settings(max_examples=20, deadline=None)
def test_chi_positive_rescale_invariance(lam, seed):
    g = unit_grid(16)
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal((g.ny, g.nx, 2))
    m = ek.VectorField2D(g, vals)
    m2 = ek.VectorField2D(g, lam * vals)
    xi = (0.6, 0.8)
    assert np.array_equal(ek.chi(m, xi).values, ek.chi(m2, xi).values)


def test_half_space_indicator_wrapper():
    g = unit_grid(16)
    m = ek.VectorField2D(g, np.tile([0.0, 1.0], (g.ny, g.nx, 1)))
    ind = ek.HalfSpaceIndicator.of(m, (0.0, 1.0))
    assert ind.xi == (0.0, 1.0)
    assert set(np.unique(ind.indicator.values)) <= {0.0, 1.0}


def test_jop_residual_planar_zero():
    g = unit_grid(64)
    _, gu = ek.sample(ek.planar((0.0, 1.0)), g)
    z = ek.bump_test_function(g, (0.0, 0.0), 0.25)
    for ang in (0.3, 1.2, 2.5):
        xi = (np.cos(ang), np.sin(ang))
        assert abs(ek.jop_characteristic_residual(gu, xi, z)) < 1e-12


def test_jop_residual_vortex_decays():
    vals = []
    for n in (64, 128):
        g = unit_grid(n)
        _, gu = ek.sample(ek.vortex((0.0, 0.0)), g)
        w = ek.perp(gu)
        z = ek.bump_test_function(g, (0.0, 0.0), 0.25)
        vals.append(abs(ek.jop_characteristic_residual(w, (1.0, 0.0), z)))
    assert vals[1] < vals[0]
    assert vals[1] < 0.15 / 128


def test_jop_residual_roof_matches_line_oracle():
    from scipy.integrate import quad
    g = unit_grid(256)
    _, gu = ek.sample(ek.roof(), g)
    z = ek.bump_test_function(g, (0.0, 0.0), 0.25)
    xi = (1 / np.sqrt(2), 1 / np.sqrt(2))
    r = ek.jop_characteristic_residual(gu, xi, z)
    line, _ = quad(lambda x: np.exp(1 - 1 / (1 - (x / 0.25) ** 2)) if abs(x) < 0.25 else 0.0,
                   -0.25, 0.25, limit=200)
    oracle = -xi[1] * line
    assert r == pytest.approx(oracle, rel=0.05)
