import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinorqi import photon_rep as ph
from spinorqi import spinor_core as sc
from spinorqi.errors import GridNotClosed, HomogeneityViolated, NonTimelikeR, ZeroKernel

seeds = st.integers(0, 2**32 - 1)
dirs = st.tuples(*[st.floats(-3, 3, allow_nan=False)] * 3).map(np.array).filter(lambda v: np.linalg.norm(v) > 1e-2)


def test_null_momentum_validation():
    k = ph.NullMomentum.from_three([0, 3.0, 4.0])
    assert k.k[0] == 5.0
    with pytest.raises(ValueError):
        ph.NullMomentum([1.0, 1.0, 1.0, 0])


@given(dirs)
def test_pi_of_k_flagpole_and_partner(kv):
    k = ph.null_from_three(kv)
    pi = ph.pi_of_k(k)
    assert np.allclose(sc.flagpole(pi), k, atol=1e-12 * k[0])
    assert abs(sc.contract(ph.spin_partner(pi), pi) - 1) < 1e-12


def test_wigner_phase_rotation_about_k():
    psi = 0.8
    k = ph.null_from_three([0, 0, 1.0])
    # diag(exp(-i psi/2), exp(i psi/2)) = rotation by -psi about z
    L = sc.SL2C(np.diag([np.exp(-1j * psi / 2), np.exp(1j * psi / 2)]))
    assert ph.wigner_phase(L, k) == pytest.approx(psi / 2, abs=1e-12)
    assert ph.wigner_phase(sc.rotation([0, 0, 1], psi), k) == pytest.approx(-psi / 2, abs=1e-12)
    assert ph.wigner_phase(-sc.identity(), k) == pytest.approx(np.pi)
    assert ph.wigner_phase(sc.identity(), k) == 0.0


def test_boost_along_k_has_no_phase():
    k = ph.null_from_three([0, 0, 2.0])
    assert abs(ph.wigner_phase(sc.boost([0, 0, 1], 1.3), k)) < 1e-12


@given(seeds)
@settings(max_examples=30)
def test_wigner_phase_cocycle_and_scaling(seed):
    rng = np.random.default_rng(seed)
    a, b = sc.random_sl2c(rng), sc.random_sl2c(rng)
    k = ph.null_from_three(rng.normal(size=3))
    back = np.linalg.inv(sc.lorentz_of(a)) @ k
    d = ph.wigner_phase(a @ b, k) - ph.wigner_phase(a, k) - ph.wigner_phase(b, back)
    assert abs(np.angle(np.exp(1j * d))) < 1e-9
    assert abs(ph.wigner_phase(a, 3.7 * k) - ph.wigner_phase(a, k)) < 1e-9


def test_wigner_phase_vectorised_matches_scalar():
    rng = np.random.default_rng(1)
    L = sc.random_sl2c(rng)
    ks = ph.null_from_three(rng.normal(size=(5, 3)))
    many = ph.wigner_phase(L, ks)
    assert np.allclose(many, [ph.wigner_phase(L, k) for k in ks])


@given(seeds)
@settings(max_examples=30)
def test_twistor_omega(seed):
    rng = np.random.default_rng(seed)
    R = sc.lorentz_of(sc.random_sl2c(rng)) @ np.array([1.0, 0, 0, 0])
    k = ph.null_from_three(rng.normal(size=3))
    w = ph.twistor_omega(R, k)
    pi = ph.pi_of_k(k)
    assert abs(sc.contract(w, pi) - 1) < 1e-9
    L = sc.random_sl2c(rng)
    wl = ph.twistor_omega(sc.lorentz_of(L) @ R, sc.lorentz_of(L) @ k)
    lw = L.act(w)
    # equivariant up to the phase picked by pi_of_k at the image momentum
    assert abs(abs(np.vdot(wl, lw)) - np.linalg.norm(wl) * np.linalg.norm(lw)) < 1e-8 * (1 + np.linalg.norm(lw) ** 2)


def test_twistor_rejects_bad_R():
    with pytest.raises(NonTimelikeR):
        ph.twistor_omega([1.0, 1.0, 0, 0], ph.null_from_three([0, 0, 1.0]))


def test_polarization_conversion():
    a1, a2 = 0.3 + 0.1j, -0.7j
    ap, am = ph.pol_convert(a1, a2)
    assert np.allclose(ph.pol_unconvert(ap, am), (a1, a2))
    r = ph.rotate_linear(0.4)
    assert np.allclose(r @ r.T, np.eye(2))
    assert np.allclose(ph.rotate_linear(np.pi / 2), -np.eye(2))


def test_grid_and_index_lookup():
    g = ph.LightConeGrid.cube(1.0, 4)
    assert len(g) == 64
    assert np.all(np.abs(sc.mdot(g.momenta, g.momenta)) < 1e-12)
    idx = g.index_of(g.momenta[[3, 7]])
    assert list(idx) == [3, 7]
    rot = sc.lorentz_of(sc.rotation([0, 0, 1], np.pi / 2))
    assert sorted(g.index_of(g.momenta @ rot.T)) == list(range(64))
    with pytest.raises(GridNotClosed):
        g.index_of(g.momenta @ sc.lorentz_of(sc.boost([1, 0, 0], 0.3)).T)


def test_kernel_constructors():
    g = ph.LightConeGrid.cube(1.0, 2)
    ker = ph.product_antisym(g, ph.gaussian_bump([0.5, 0, 0], 0.3), ph.gaussian_bump([-0.5, 0, 0], 0.3))
    assert np.allclose(ker.values, -ker.values.T)
    assert ph.antisymmetry_defect(ker) == 0.0
    with pytest.raises(ValueError):
        ph.EPRKernel(g, values=np.ones((8, 8)), symmetry="antisymmetric")
    d = ph.same_momentum_psi2(g, 2.0)
    assert np.allclose(d.values, 2 * np.eye(8))
    with pytest.raises(ZeroKernel):
        ph.antisymmetry_defect(ph.EPRKernel(g, values=np.zeros((8, 8))))


def test_scalar_kernel_modulus():
    g = ph.LightConeGrid.from_three(np.random.default_rng(0).normal(size=(5, 3)))
    z2 = ph.scalar_F2(g).values
    k = g.momenta
    # |z|^2 = k.k' for the flagpole normalisation
    assert np.allclose(np.abs(z2), sc.mdot(k[:, None], k[None, :]), atol=1e-12)


def test_transform_rule_vs_grid_route():
    # rotation by a quarter turn maps the cube grid onto itself, so both routes apply
    g = ph.LightConeGrid.cube(1.0, 4)
    f, h = ph.gaussian_bump([0.4, 0.2, 0], 0.5), ph.gaussian_bump([-0.3, 0, 0.3], 0.5)
    rule_ker = ph.product_antisym(g, f, h)
    grid_ker = ph.EPRKernel(g, values=rule_ker.values, symmetry="antisymmetric")
    L = sc.rotation([0, 0, 1], np.pi / 2)
    a = ph.transform_kernel(rule_ker, L).values
    b = ph.transform_kernel(grid_ker, L).values
    assert np.allclose(a, b, atol=1e-12)


def test_generic_boost_breaks_antisymmetry_axis_does_not():
    g = ph.LightConeGrid.from_three([[1.0, 0, 0], [0, 1.0, 0], [1.0, 1.0, 0], [0.5, -1.0, 0]])
    ker = ph.product_antisym(g, ph.gaussian_bump([1, 0, 0], 0.6), ph.gaussian_bump([0, 1, 0], 0.6))
    assert ph.antisymmetry_defect(ph.transform_kernel(ker, sc.boost([1, 1, 0], 0.5))) > 1e-3
    axis = ph.LightConeGrid.from_three([[0, 0, z] for z in (0.5, 1.0, 2.0)])
    kz = ph.product_antisym(axis, ph.gaussian_bump([0, 0, 0.5], 0.6), ph.gaussian_bump([0, 0, 2], 0.6))
    assert ph.antisymmetry_defect(ph.transform_kernel(kz, sc.boost([0, 0, 1], 0.5))) <= 1e-12


def test_linear_epr_condition():
    def theta(k):
        return np.zeros(len(k))

    def quad(z):
        return z * z

    # momenta in the x-z half plane have real spinors, so z is real and z^2 = conj(z)^2
    plane = ph.null_from_three([[1.0, 0, 0.5], [0.3, 0, -1.0], [2.0, 0, 0.1]])
    assert ph.linear_epr_condition(quad, quad, theta, plane) <= 1e-12
    generic = ph.null_from_three(np.random.default_rng(2).normal(size=(4, 3)))
    assert ph.linear_epr_condition(quad, quad, theta, generic) > 1e-3

    def cubic(z):
        return z**3

    with pytest.raises(HomogeneityViolated):
        ph.linear_epr_condition(cubic, quad, theta, generic)
