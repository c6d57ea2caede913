import numpy as np
import pytest
from numpy.testing import assert_allclose

from micz_lab import ks
from micz_lab.brackets import Curvature, DomainError, PhasePoint4C, SingularityError, SystemParams
from micz_lab.dynamics import IntegratorConfig
from micz_lab.suites import REFERENCE_RUNS, ks_suite, ks_trajectory_check

from conftest import states_4c

FLAT = SystemParams(omega=1.2, delta_omega_sq=0.3, eps_el=-0.2)
CURVED = SystemParams(omega=0.9, delta_omega_sq=0.25, eps_el=0.1, R0=1.3)


def _rotate(x, a):
    ph = np.exp(1j * a)
    return PhasePoint4C(tuple(c * ph for c in x.z), tuple(c / ph for c in x.pi))


def test_basis_state_image():
    img = ks.ks_map(PhasePoint4C((1.0, 0.0), (0.0, 0.0)))
    assert_allclose(img.reduced.q, (0.0, 0.0, 1.0))
    assert_allclose(img.reduced.p, (0.0, 0.0, 0.0))
    assert img.s == 0.0


def test_image_radius_is_zzbar(rng):
    for x in states_4c(rng, 1000, for_ks=True):
        assert_allclose(ks.ks_map(x).reduced.qnorm(), x.zz(), rtol=1e-12)


def test_image_is_u1_invariant(rng):
    for x, a in zip(states_4c(rng, 50, for_ks=True), rng.uniform(0, 2 * np.pi, 50)):
        y0, y1 = ks.ks_map(x).reduced, ks.ks_map(_rotate(x, a)).reduced
        assert_allclose(y1.components(), y0.components(), atol=1e-12)
        assert_allclose(y1.s, y0.s, atol=1e-12)


def test_origin_is_singular():
    with pytest.raises(SingularityError):
        ks.ks_map(PhasePoint4C((0.0, 0.0), (1.0, 0.0)))


def test_position_images_commute(rng):
    for x in states_4c(rng, 20, for_ks=True):
        b = ks.image_brackets(x)
        assert_allclose(b[:3, :3], 0.0, atol=1e-10)


def test_bracket_image_all_pairs(rng):
    worst = max(ks.ks_bracket_residual(x) for x in states_4c(rng, 100, for_ks=True))
    assert worst <= 1e-9


def test_bracket_image_per_index(rng):
    x = states_4c(rng, 1, for_ks=True)[0]
    for i in range(3):
        for j in range(3):
            assert ks.ks_bracket_residual(x, i, j) <= 1e-9
    with pytest.raises(IndexError):
        ks.ks_bracket_residual(x, 3, 0)


def test_uncharged_states_have_commuting_momenta(rng):
    for x in states_4c(rng, 20, for_ks=True):
        # pi proportional to zbar gives J = 0
        c = rng.uniform(-1, 1)
        y = PhasePoint4C(x.z, tuple(c * np.conj(a) for a in x.z))
        assert abs(ks.ks_map(y).s) <= 1e-15
        assert_allclose(ks.image_brackets(y)[3:, 3:], 0.0, atol=1e-10)


def test_level_example():
    x = PhasePoint4C((1.0, 0.0), (0.0, 0.0))
    pr = SystemParams(omega=1.0)
    img = ks.ks_map(x, pr)
    assert_allclose(img.source_energy, 1.0)
    tp = ks.target_params(pr, "flat", img.source_energy)
    assert_allclose(tp.gamma, 0.5)
    assert_allclose(ks.target_hamiltonian(img.reduced, tp, "flat"), -0.5)
    assert ks.ks_level_check(x, pr, "flat") <= 1e-12


@pytest.mark.parametrize("source,params", [("flat", FLAT), ("sphere", CURVED), ("pseudosphere", CURVED)])
def test_energy_surface_correspondence(rng, source, params):
    curv = Curvature.FLAT if source == "flat" else Curvature(source)
    states = states_4c(rng, 100, curv, for_ks=True)
    assert max(ks.ks_level_check(x, params, source) for x in states) <= 1e-9


def test_image_outside_target_chart_is_rejected():
    x = PhasePoint4C((1.1, 0.0), (0.1, 0.0))
    with pytest.raises(DomainError):
        ks.ks_level_check(x, CURVED, "sphere")


@pytest.mark.parametrize("source,params", [("flat", FLAT), ("sphere", CURVED), ("pseudosphere", CURVED)])
def test_suite_passes_and_fit_matches_closed_form(rng, source, params):
    curv = Curvature.FLAT if source == "flat" else Curvature(source)
    results = ks_suite(params, source, states_4c(rng, 100, curv, for_ks=True))
    for res in results:
        assert res.passed, (res.claim, res.value)
    fit = results[-1].detail["fit"]
    sc, mix = ks.expected_reduction(params, source)
    assert_allclose([fit["scale"], fit["mix"], fit["offset"]], [sc, mix, 0.0], atol=1e-8)


def test_reduction_holds_without_deformations(rng):
    pr = FLAT.with_(delta_omega_sq=0.0, eps_el=0.0)
    for x in states_4c(rng, 20, for_ks=True):
        j3, a = ks.ks_observable_check(x, pr, "flat")
        assert j3 <= 1e-10 and a <= 1e-8


@pytest.mark.parametrize("source", ["flat", "sphere", "pseudosphere"])
def test_trajectory_image_stays_on_level_set(source):
    # a bound motion; the inharmonic term lets larger states escape the chart
    v, _, params = REFERENCE_RUNS["higgs-aniso"]
    x0 = PhasePoint4C.from_real(v)
    res = ks_trajectory_check(params, source, x0, IntegratorConfig(t_end=50.0, rtol=1e-10, atol=1e-12))
    assert res.passed, (res.value, res.errors)
