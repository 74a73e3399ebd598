import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinorqi import epr_engine as ee
from spinorqi import photon_rep as ph
from spinorqi.errors import ZeroDenominator

seeds = st.integers(0, 2**32 - 1)


def _random_setup(rng, M=6):
    grid = ph.LightConeGrid.from_three(rng.normal(size=(M, 3)), rng.uniform(0.5, 2, M))
    a = rng.normal(size=(M, M)) + 1j * rng.normal(size=(M, M))
    ker = ph.EPRKernel(grid, values=a - a.T, symmetry="antisymmetric")
    O0 = ee.CutoffProfile.from_rule(grid, lambda k: 1 + rng.uniform(size=len(k)))
    return grid, ker, O0


def test_cutoff_profile_normalised():
    g = ph.LightConeGrid.cube(2.0, 4)
    O0 = ee.CutoffProfile.gaussian(g, 1.0)
    assert O0.norm() == pytest.approx(1.0)
    assert O0.chi.max() == pytest.approx(1.0)
    assert np.allclose(ee.RepChoice.irreducible().chi(g), 1.0)
    with pytest.raises(ValueError):
        ee.RepChoice("reducible", 0, O0)
    with pytest.raises(ValueError):
        ee.RepChoice("other")


def test_regions():
    g = ph.LightConeGrid.from_three([[1.0, 0, 0], [-1.0, 0, 0], [0, 2.0, 0]])
    assert list(ee.DetectorRegion.ball([1, 0, 0], 0.5).mask(g)) == [True, False, False]
    assert list(ee.DetectorRegion.halfspace([0, 1, 0], 1.0).mask(g)) == [False, False, True]
    assert list(ee.DetectorRegion.cells([1]).mask(g)) == [False, True, False]
    assert ee.DetectorRegion.everything().mask(g).all()


def test_disjoint_product_kernel_gives_p_one():
    g = ph.LightConeGrid.from_three([[1.0, 0, 0], [1.2, 0, 0], [-1.0, 0, 0], [-1.2, 0, 0]])

    def f(k):
        return np.where(k[..., 1] > 0, 1.0 + k[..., 1], 0.0)

    def h(k):
        return np.where(k[..., 1] < 0, 2.0 - k[..., 1], 0.0)

    ker = ph.product_antisym(g, f, h)
    rep = ee.RepChoice.reducible(2, ee.CutoffProfile.uniform(g))
    assert ee.probability_p(ee.DetectorRegion.halfspace([1, 0, 0]), ee.DetectorRegion.halfspace([-1, 0, 0]), ker, rep) == pytest.approx(
        1.0, abs=1e-12
    )


@given(seeds)
@settings(max_examples=30)
def test_full_overlap_average_vanishes(seed):
    rng = np.random.default_rng(seed)
    g, ker, O0 = _random_setup(rng)
    rep = ee.RepChoice.reducible(2, O0)
    everything = ee.DetectorRegion.everything()
    a, b = rng.uniform(0, np.pi, 2)
    assert abs(ee.epr_average(a, b, everything, everything, ker, rep)) < 1e-12


@given(seeds)
@settings(max_examples=40)
def test_overlap_formula_matches_point_detector_route(seed):
    rng = np.random.default_rng(seed)
    g, ker, O0 = _random_setup(rng)
    rep = ee.RepChoice.reducible(3, O0) if seed % 2 else ee.RepChoice.irreducible()
    om = rng.uniform(size=len(g)) < 0.6
    omp = rng.uniform(size=len(g)) < 0.6
    a, b = rng.uniform(0, np.pi, 2)
    assert ee.epr_average(a, b, om, omp, ker, rep) == pytest.approx(ee.epr_average_sharp(a, b, om, omp, ker, rep), abs=1e-12)


@given(seeds)
@settings(max_examples=30)
def test_disjoint_average_is_minus_p_cos(seed):
    rng = np.random.default_rng(seed)
    g, ker, O0 = _random_setup(rng)
    rep = ee.RepChoice.reducible(2, O0)
    om = np.arange(len(g)) < 3
    a, b = rng.uniform(0, np.pi, 2)
    p = ee.probability_p(om, ~om, ker, rep)
    assert 0 <= p <= 1 + 1e-12
    assert ee.epr_average(a, b, om, ~om, ker, rep) == pytest.approx(-np.cos(2 * (a - b)) * p, abs=1e-12)


def test_zero_kernel_raises():
    g = ph.LightConeGrid.from_three([[1.0, 0, 0], [0, 1.0, 0]])
    ker = ph.EPRKernel(g, values=np.zeros((2, 2)))
    with pytest.raises(ZeroDenominator):
        ee.probability_p([True, False], [False, True], ker, ee.RepChoice.irreducible())


def test_chsh_values():
    assert ee.chsh_of_p(1.0) == pytest.approx(2 * np.sqrt(2), abs=1e-12)
    assert ee.chsh_of_p(0.5) == pytest.approx(np.sqrt(2), abs=1e-12)
    # the literal all-plus-but-last combination cancels at these angles
    E = lambda a, b: -np.cos(2 * (a - b))  # noqa: E731
    lit = E(0, np.pi / 8) + E(0, 3 * np.pi / 8) + E(np.pi / 4, np.pi / 8) - E(np.pi / 4, 3 * np.pi / 8)
    assert abs(lit) < 1e-12


@given(st.floats(0, 1))
def test_violation_iff_p_above_threshold(p):
    s = ee.chsh_of_p(p)
    assert s == pytest.approx(2 * np.sqrt(2) * p, abs=1e-12)
    if abs(p - 1 / np.sqrt(2)) > 1e-12:
        assert (s > 2) == (p > 1 / np.sqrt(2))


def test_chsh_scan_rows():
    rows = ee.chsh_scan(np.linspace(0, 1, 11))
    assert [r[2] for r in rows] == [p > 1 / np.sqrt(2) for p, _, _ in rows]


def test_chsh_from_kernel():
    g = ph.LightConeGrid.from_three([[1.0, 0, 0], [-1.0, 0, 0]])
    ker = ph.EPRKernel(g, values=np.array([[0, 1.0], [-1.0, 0]]), symmetry="antisymmetric")
    res = ee.chsh(0, np.pi / 4, np.pi / 8, 3 * np.pi / 8, [True, False], [False, True], ker, ee.RepChoice.irreducible())
    assert res.S == pytest.approx(2 * np.sqrt(2), abs=1e-9)
    assert res.violation and res.p_condition


def test_norm_formulas():
    rng = np.random.default_rng(0)
    g, ker, O0 = _random_setup(rng)
    assert ee.two_photon_norm(ker, ee.RepChoice.reducible(1, O0)) == 0.0
    n2 = ee.two_photon_norm(ker, ee.RepChoice.reducible(2, O0))
    n3 = ee.two_photon_norm(ker, ee.RepChoice.reducible(3, O0))
    assert n3 / n2 == pytest.approx((2 / 3) / (1 / 2))
    assert ee.psi2_norm(1, O0) == 1.0
    assert ee.psi2_norm(2, O0) == pytest.approx(0.25 + 0.5 * O0.quartic())
    assert ee.scalar_norm_example(1, O0) == 0.0
    with pytest.raises(ValueError):
        ee.two_photon_norm(ker, ee.RepChoice.irreducible())


def test_p_with_error_converges():
    def kernel(cells):
        g = ph.LightConeGrid.cube(3.0, cells)
        return ph.product_antisym(g, ph.gaussian_bump([1, 0, 0], 0.5), ph.gaussian_bump([-1, 0, 0], 0.5))

    def rep(g):
        return ee.RepChoice.reducible(2, ee.CutoffProfile.gaussian(g, 2.0))

    p, err = ee.p_with_error(ee.DetectorRegion.halfspace([1, 0, 0]), ee.DetectorRegion.halfspace([-1, 0, 0]), kernel, rep, 6)
    assert 0.9 < p <= 1.0
    assert err < 0.05
