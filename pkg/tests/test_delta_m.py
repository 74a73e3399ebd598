import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from spinorqi import delta_m as dm
from spinorqi.errors import NonpositiveDensity

params = st.builds(dm.DeltaParams, st.floats(0.05, 20), st.floats(0.01, 5))


@given(params)
def test_unit_integral_and_origin_value(prm):
    assert dm.delta_integral(prm) == pytest.approx(1.0, abs=1e-12)
    assert dm.delta_eval(0.0, prm) == prm.a


@given(params, st.floats(-3, 3))
def test_even_and_compact(prm, k):
    assert dm.delta_eval(k, prm) == pytest.approx(dm.delta_eval(-k, prm), abs=1e-9 * (1 + prm.peak))
    if abs(k) >= prm.eps / 2:
        assert dm.delta_eval(k, prm) == 0.0


def test_quadrature_integral_and_shapes():
    prm = dm.DeltaParams(1.0, 0.5)
    kn = prm.knots()
    total = sum(integrate.quad(lambda k: dm.delta_eval(k, prm), lo, hi)[0] for lo, hi in zip(kn[:-1], kn[1:]))
    assert total == pytest.approx(1.0, abs=1e-10)
    assert dm.delta_eval(0.125, prm) == pytest.approx(4 - 0.5)
    tri = dm.DeltaParams.triangle(0.4)
    ks = np.linspace(-0.2, 0.2, 41)
    assert np.allclose(dm.delta_eval(ks, tri), np.maximum(0, 10 - 100 * np.abs(ks)))


def test_fourier_transform_against_quadrature():
    for prm in (dm.DeltaParams(1.0, 0.5), dm.DeltaParams(8.0, 0.5), dm.DeltaParams.m_shaped(0.1)):
        xs = np.concatenate([[0.0, 1e-7, 1e-4], np.linspace(-60, 60, 17)])
        assert np.max(np.abs(dm.delta_hat(xs, prm) - dm.fourier_numeric(xs, prm))) < 1e-8


def test_fourier_limits():
    assert dm.delta_hat(0.0, dm.DeltaParams(3.0, 0.2)) == pytest.approx(1 / (2 * np.pi))
    # series and closed form agree across the switch
    prm = dm.DeltaParams(1.0, 1.0)
    xs = np.array([0.99e-4, 1.01e-4])
    assert np.max(np.abs(dm.delta_hat(xs, prm) - dm.fourier_numeric(xs, prm))) < 1e-14
    vals = [dm.delta_hat(2.0, dm.DeltaParams.m_shaped(e)) for e in (1e-1, 1e-2, 1e-3)]
    assert abs(vals[-1] - 1 / (2 * np.pi)) < 1e-6


@given(params, params, st.floats(-6, 6))
@settings(max_examples=50)
def test_convolution_symmetric_and_matches_quadrature(n, m, k):
    a = dm.delta_convolve(k, n, m)
    assert a == pytest.approx(dm.delta_convolve(k, m, n), abs=1e-10 * (1 + abs(a)))
    pts = sorted(set(np.concatenate([m.knots(), k - n.knots()])))
    lo, hi = pts[0], pts[-1]
    inner = [p for p in pts if lo < p < hi]
    num = dm.convolve_numeric(k, lambda q: dm.delta_eval(q, n), lambda q: dm.delta_eval(q, m), (lo, hi), points=inner or None)
    assert a == pytest.approx(num, abs=1e-8 * (1 + abs(a)))


def test_convolution_integral_and_inner_limit():
    n, m = dm.DeltaParams.m_shaped(0.5), dm.DeltaParams.m_shaped(0.3)
    total = integrate.quad(lambda k: dm.delta_convolve(k, n, m), -0.4, 0.4, points=[-0.2, 0, 0.2], limit=200)[0]
    assert total == pytest.approx(1.0, abs=1e-9)
    ks = np.linspace(-0.3, 0.3, 13)
    near = dm.delta_convolve(ks, n, dm.DeltaParams.m_shaped(1e-5))
    assert np.max(np.abs(near - dm.delta_eval(ks, n))) < 1e-3


def test_product_identity():
    n, m = dm.DeltaParams(1.0, 0.5), dm.DeltaParams(8.0, 0.3)
    for x in (0.3, 1.7, 9.0):
        v = integrate.quad(lambda k: dm.delta_convolve(k, n, m) * np.cos(k * x), -0.4, 0.4, limit=400, points=[0])[0]
        assert v / (2 * np.pi) == pytest.approx(2 * np.pi * dm.delta_hat(x, n) * dm.delta_hat(x, m), abs=1e-8)


def test_square_diverges():
    vals = [dm.square_integral(dm.DeltaParams.m_shaped(e)) for e in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 1e4


def test_sifting_tables():
    const = dm.sifting_test(lambda k: 3.0 + 0 * k, [0.1, 0.01], target=3.0)
    assert all(r.gap < 1e-12 for r in const)
    step = dm.sifting_test(lambda k: np.where(k > 0, 1.0, 0.0), [1e-1, 1e-4], target=0.5)
    assert step[-1].gap < 1e-3
    quad = dm.sifting_test(lambda k: k * k, [0.1, 0.05, 0.025, 0.0125], target=0.0)
    assert dm.observed_order(quad) == pytest.approx(2.0, abs=0.05)
    lip = dm.sifting_test(lambda k: np.abs(k) + np.cos(k), [0.1, 0.05, 0.025])
    assert dm.observed_order(lip) == pytest.approx(1.0, abs=0.02)


@given(st.floats(-3, 3))
def test_measure_delta_diagonal(p):
    mu = dm.MeasureRule(lambda q: 1 + q * q)
    assert dm.measure_delta(p, p, dm.DeltaParams.m_shaped(0.1), mu) == pytest.approx(dm.A_M, rel=1e-12)


def test_measure_delta_unit_density_and_sifting():
    prm = dm.DeltaParams(2.0, 0.3)
    flat = dm.MeasureRule(lambda q: 1.0)
    assert dm.measure_delta(0.1, 0.05, prm, flat) == dm.delta_eval(0.05, prm)
    mu = dm.MeasureRule(lambda q: 1 + q * q)
    errs = [abs(dm.measure_sift(np.cos, 0.3, dm.DeltaParams.m_shaped(e), mu) - np.cos(0.3)) for e in (0.1, 0.01)]
    assert errs[1] < errs[0] and errs[1] < 1e-4
    with pytest.raises(NonpositiveDensity):
        dm.measure_delta(0.0, 0.1, prm, dm.MeasureRule(lambda q: q))


def test_extrapolation_exact_for_quadratics():
    h = [0.4, 0.2, 0.1]
    assert dm.extrapolate_zero(h, [2 + 3 * x - x * x for x in h]) == pytest.approx(2.0, abs=1e-13)


def test_plane_wave_norm():
    r = dm.plane_wave_norm(0.0, 0.3)
    assert r.diag == pytest.approx(1.0, abs=1e-6)
    assert r.offdiag == 0.0
    assert all(v == 0.0 for _, _, v in r.offdiag_table)
    # the outer schedule has to sit below the momentum gap
    sched = tuple(e / 20 for e in dm.DEFAULT_OUTER)
    near = dm.plane_wave_norm(0.0, 0.01, sched, sched)
    assert near.offdiag == pytest.approx(0.0, abs=1e-6)


def test_derivative_transport_rate():
    gaps = [dm.derivative_gap(0.7, 1.3, e) for e in (0.1, 0.05, 0.025)]
    assert gaps[0] > gaps[1] > gaps[2]
    # halving eps cuts the gap by about four
    assert gaps[1] / gaps[2] == pytest.approx(4.0, rel=0.05)


def test_figure_curves():
    ks, ys = dm.m_shape_curve(dm.DeltaParams(1.0, 0.5), 101)
    assert len(ks) == 101 and ys.max() == pytest.approx(3.5, abs=0.1)
    xs, yh = dm.m_shape_transform_curve(dm.DeltaParams(8.0, 0.5), 101)
    assert yh[50] == pytest.approx(1 / (2 * np.pi))
