import pytest
from numpy.testing import assert_allclose

from micz_lab.brackets import PhasePoint4C, ReducedPoint3, SingularityError, SystemParams
from micz_lab.flat import (
    A_hidden_flat,
    flat_oscillator_observables,
    h_flat,
    h_micz_flat,
    micz_flat_observables,
)
from micz_lab.suites import involution_suite

from conftest import states_3, states_4c


def test_iso_energy_at_rest_is_zero():
    x = PhasePoint4C((0.0, 0.0), (0.0, 0.0))
    assert h_flat(x, SystemParams(omega=1.0), "iso") == 0.0


def test_iso_energy_direct_evaluation():
    x = PhasePoint4C((1.0, 0.0), (0.0, 0.0))
    assert_allclose(h_flat(x, SystemParams(omega=2.0), "iso"), 4.0)


def test_aniso_energy_direct_evaluation():
    x = PhasePoint4C((1.0, 0.0), (0.0, 0.0))
    pr = SystemParams(omega=1.0, delta_omega_sq=0.5, eps_el=0.25)
    assert_allclose(h_flat(x, pr, "aniso"), 2.0)


def test_unknown_oscillator_is_rejected():
    with pytest.raises(ValueError):
        h_flat(PhasePoint4C((1.0, 0.0), (0.0, 0.0)), SystemParams(), "quartic")


def test_observables_vanish_at_rest():
    obs = flat_oscillator_observables(PhasePoint4C((0.0, 0.0), (0.0, 0.0)), SystemParams(omega=1.0))
    assert obs["J"] == 0.0
    assert_allclose(obs["J_vec"], 0.0)
    assert_allclose(obs["A_vec"], 0.0)
    assert obs["A_hidden"] == 0.0


def test_hidden_generator_reduces_to_A3():
    x = PhasePoint4C((1.0, 0.0), (0.0, 0.0))
    obs = flat_oscillator_observables(x, SystemParams(omega=1.0))
    assert_allclose(obs["A_hidden"], 0.5)
    assert_allclose(obs["A_vec"][2], 0.5)


def test_u1_generator_direct_evaluation():
    x = PhasePoint4C((1.0, 0.0), (1j, 0.0))
    assert_allclose(flat_oscillator_observables(x, SystemParams())["J"], -1.0)


def test_micz_energy_examples():
    at = ReducedPoint3((0.0, 0.0, 1.0), (0.0, 0.0, 0.0), 0.0)
    assert_allclose(h_micz_flat(at, SystemParams(gamma=1.0)), -1.0)
    charged = ReducedPoint3((0.0, 0.0, 1.0), (0.0, 0.0, 0.0), 1.0)
    assert_allclose(h_micz_flat(charged, SystemParams()), 0.5)
    assert h_micz_flat(at, SystemParams()) == 0.0


def test_micz_origin_is_singular():
    with pytest.raises(SingularityError):
        h_micz_flat(ReducedPoint3((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), 0.0), SystemParams())


def test_micz_observables_on_axis():
    x = ReducedPoint3((0.0, 0.0, 1.0), (0.0, 0.0, 0.0), 0.0)
    obs = micz_flat_observables(x, SystemParams(gamma=1.0, delta_omega_sq=0.3, eps_el=0.2))
    assert_allclose(obs["J_vec"], 0.0)
    assert_allclose(obs["RungeLenz_vec"], [0.0, 0.0, 1.0])
    assert_allclose(obs["A_hidden"], 1.0)


def test_runge_lenz_vanishes_for_radial_momentum():
    x = ReducedPoint3((0.3, -0.2, 0.5), (0.6, -0.4, 1.0), 0.0)
    assert_allclose(micz_flat_observables(x, SystemParams())["RungeLenz_vec"], 0.0, atol=1e-15)


def test_hidden_generator_is_real_for_complex_state(rng):
    for x in states_4c(rng, 5):
        assert isinstance(A_hidden_flat(x, SystemParams(omega=1.3, delta_omega_sq=0.2, eps_el=0.1)), float)


@pytest.mark.parametrize("sid,params", [
    ("osc-iso", SystemParams(omega=1.0)),
    ("osc-aniso", SystemParams(omega=1.3, delta_omega_sq=-0.4, eps_el=0.35)),
])
def test_oscillator_integrability(rng, sid, params):
    for res in involution_suite(sid, params, states_4c(rng, 100)):
        assert res.passed, res
        assert res.value <= 1e-9


@pytest.mark.parametrize("params", [
    SystemParams(gamma=1.0),
    SystemParams(gamma=0.7, delta_omega_sq=0.3, eps_el=-0.25),
])
def test_micz_flat_integrability(rng, params):
    results = involution_suite("micz-flat", params, states_3(rng, 100))
    assert results
    for res in results:
        assert res.passed, res


def test_undeformed_micz_keeps_full_vectors(rng):
    names = {r.claim for r in involution_suite("micz-flat", SystemParams(gamma=1.0), states_3(rng, 5))}
    assert any("runge" in n.lower() for n in names)
    assert any("j_vec" in n.lower() or "angular" in n.lower() for n in names)
