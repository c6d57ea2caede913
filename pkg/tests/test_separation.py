import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from micz_lab import separation
from micz_lab.brackets import ContractError, Curvature, DomainError, ReducedPoint3, SystemParams, poisson_bracket
from micz_lab.curved import h_micz_curved
from micz_lab.dynamics import IntegratorConfig
from micz_lab.separation import ParabolicState
from micz_lab.suites import REFERENCE_RUNS, beta_drift_check, separation_suite

from conftest import states_3

PSEUDO = SystemParams(gamma=0.8, delta_omega_sq=0.3, eps_el=0.15, R0=1.2, curvature=Curvature.PSEUDOSPHERE)


def _chart_points(rng, n):
    return [x.q for x in states_3(rng, n, pseudo=True, off_axis=True)]


def test_parabolic_origin():
    assert_allclose(separation.from_parabolic(0.0, 0.0, 0.3, 1.0), (0.0, 0.0, 0.0))
    assert separation.to_parabolic((0.0, 0.0, 0.0), 1.0).degenerate


def test_parabolic_round_trip(rng):
    for q in _chart_points(rng, 500):
        pp = separation.to_parabolic(q, 1.3)
        assert_allclose(separation.from_parabolic(pp.xi, pp.eta, pp.phi, 1.3), q, atol=1e-10)


def test_parabolic_angle_is_azimuth(rng):
    for q in _chart_points(rng, 50):
        assert_allclose(separation.to_parabolic(q, 0.7).phi, math.atan2(q[1], q[0]), atol=1e-12)


def test_axis_point_is_flagged():
    pp = separation.to_parabolic((0.0, 0.0, 0.4), 1.0)
    assert pp.degenerate and pp.phi == 0.0
    with pytest.raises(separation.DegeneracyError):
        separation.parabolic_momenta(ReducedPoint3((0.0, 0.0, 0.4), (0.1, 0.0, 0.0), 0.0), 1.0)


def test_outside_chart_is_rejected():
    with pytest.raises(DomainError):
        separation.to_parabolic((0.0, 0.6, 0.9), 1.0)


def test_zero_momentum_gives_zero_parabolic_momenta():
    ps = separation.parabolic_momenta(ReducedPoint3((0.2, -0.1, 0.3), (0.0, 0.0, 0.0), 0.0), 1.0)
    assert_allclose([ps.p_xi, ps.p_eta, ps.p_phi], 0.0)


def test_hyperbolic_parameters():
    ps = ParabolicState(0.7, 1.9, 0.0, r0=1.4)
    assert_allclose([ps.chi, ps.zeta], [math.asinh(0.5), math.asinh(1.9 / 1.4)], rtol=1e-12)


def test_axial_momentum_is_conserved_angular_momentum(rng):
    for x in states_3(rng, 20, pseudo=True, off_axis=True):
        ps = separation.parabolic_momenta(x, 1.0)
        assert_allclose(ps.p_phi, np.cross(x.q, x.p)[2] + x.s * x.q[2] / x.qnorm() - x.s, atol=1e-10)


def test_chart_pairing_is_canonical(rng):
    pr = PSEUDO
    names = ("xi", "eta", "phi")
    for x in states_3(rng, 5, pseudo=True, s=0.0, off_axis=True):
        for i, a in enumerate(names):
            for j, b in enumerate(names):
                pb = poisson_bracket(separation.parabolic_coordinate("p_" + a),
                                     separation.parabolic_coordinate(b), x, params=pr)
                assert abs(pb - float(i == j)) <= 1e-9


def test_parabolic_energy_at_rest_is_zero():
    ps = ParabolicState(0.4, 0.9, 1.0)
    assert separation.h_micz_parabolic(ps, SystemParams(R0=1.0, curvature=Curvature.PSEUDOSPHERE)) == 0.0


@pytest.mark.parametrize("source_sign", [1, -1])
@pytest.mark.parametrize("s", [0.0, None])
def test_chart_equivalence(rng, source_sign, s):
    pr = PSEUDO.with_(source_sign=source_sign)
    for x in states_3(rng, 200, pseudo=True, s=s, off_axis=True):
        ps = separation.parabolic_momenta(x, pr.r0)
        assert_allclose(separation.h_micz_parabolic(ps, pr), h_micz_curved(x, pr, "micz-pseudo"),
                        rtol=1e-9, atol=1e-9)


def test_separation_constant_example():
    pr = SystemParams(R0=1.0, curvature=Curvature.PSEUDOSPHERE)
    rec = separation.separation_constant(ParabolicState(1.0, 1.0, 0.0), pr, 0.0)
    assert rec.beta_xi == 0.0 and rec.mismatch == 0.0


def test_separation_constant_needs_on_shell_energy():
    pr = PSEUDO
    ps = ParabolicState(0.5, 0.8, 0.0, 0.2, -0.1, 0.3, 0.4, pr.r0)
    with pytest.raises(ContractError):
        separation.separation_constant(ps, pr, float(separation.h_micz_parabolic(ps, pr)) + 1e-3)


def test_hyperbolic_form_at_rest():
    pr = SystemParams(R0=1.0, curvature=Curvature.PSEUDOSPHERE)
    assert separation.hj_residual_chi_zeta(ParabolicState(0.3, 0.6, 0.0), pr, 0.0, 0.0) == (0.0, 0.0)


def test_hyperbolic_form_at_zero_chi():
    with pytest.raises(DomainError):
        separation.hj_residual_chi_zeta(ParabolicState(0.0, 0.6, 0.0), PSEUDO, 0.0, 0.0)


@pytest.mark.parametrize("source_sign", [1, -1])
def test_separation_suite(rng, source_sign):
    pr = PSEUDO.with_(source_sign=source_sign)
    for res in separation_suite(pr, states_3(rng, 200, pseudo=True, off_axis=True)):
        assert res.passed, (res.claim, res.value, res.errors)


def test_beta_is_conserved_along_motion():
    v, s, pr = REFERENCE_RUNS["micz-pseudo"]
    x0 = ReducedPoint3.from_real(v, s)
    res = beta_drift_check(pr, x0, IntegratorConfig(t_end=50.0, rtol=1e-10, atol=1e-12))
    assert res.passed, (res.value, res.errors)
