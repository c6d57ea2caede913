"""Verification suites: each returns one :class:`CheckResult` per registered claim."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import curved, dynamics, ks, separation
from .brackets import (
    Curvature,
    DomainError,
    Observable,
    PhasePoint4C,
    ReducedPoint3,
    SystemParams,
    evaluate,
    poisson_bracket,
)
from .claims import claim, involution_family

MAX_ERRORS_LISTED = 5


@dataclass
class CheckResult:
    claim: str
    value: float
    passed: bool
    cases: int = 0
    errors: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        c = claim(self.claim)
        return {
            "claim": self.claim,
            "system": c.system,
            "anchor": c.anchor,
            "value": self.value,
            "band": c.band(),
            "passed": self.passed,
            "cases": self.cases,
            "errors": self.errors[:MAX_ERRORS_LISTED],
            "error_count": len(self.errors),
            "adjusted": list(c.adjusted),
            "detail": self.detail,
        }


def _result(claim_id: str, value: float, cases: int = 0, errors: list | None = None, **detail) -> CheckResult:
    errors = errors or []
    ok = claim(claim_id).accepts(value) and not errors
    return CheckResult(claim_id, float(value), ok, cases, errors, detail)


def scaled_bracket(H: Observable, C: Observable, x, params: SystemParams) -> float:
    """``|{H, C}| / max(|H|, |C|, 1)``."""
    scale = max(abs(evaluate(H, x, params)), abs(evaluate(C, x, params)), 1.0)
    return abs(poisson_bracket(H, C, x, params=params)) / scale


def involution_suite(sid: str, params: SystemParams, states: Sequence) -> list[CheckResult]:
    spec = dynamics.system(sid)
    spec.check_params(params)
    H = spec.hamiltonian
    worst: dict[str, float] = {}
    errors: dict[str, list] = {}
    for C in spec.constants(params):
        fam = involution_family(C.name)
        worst.setdefault(fam, 0.0)
        errors.setdefault(fam, [])
        for i, x in enumerate(states):
            try:
                worst[fam] = max(worst[fam], scaled_bracket(H, C, x, params))
            except (DomainError, ArithmeticError) as exc:
                errors[fam].append(f"state {i}: {exc}")
    return [_result(f"involution:{spec.id.value}:{fam}", worst[fam], len(states), errors[fam]) for fam in worst]


def ks_suite(params: SystemParams, source: str, states: Sequence[PhasePoint4C],
             fit_count: int = 10) -> list[CheckResult]:
    source = ks.Source(source)
    n = len(states)
    br = max(ks.ks_bracket_residual(x) for x in states)
    lv = max(ks.ks_level_check(x, params, source) for x in states)
    fit = ks.fit_reduction(states[:fit_count], params, source)
    pairs = [ks.ks_observable_check(x, params, source, fit) for x in states]
    sc, mix = ks.expected_reduction(params, source)
    return [
        _result("ks:bracket-image", br, n),
        _result(f"ks:level:{source.value}", lv, n),
        _result("ks:J3-image", max(p[0] for p in pairs), n),
        _result("ks:A-image", max(p[1] for p in pairs), n, source=source.value,
                fit={"scale": fit.scale, "mix": fit.mix, "offset": fit.offset},
                expected={"scale": sc, "mix": mix, "offset": 0.0}),
    ]


def ks_trajectory_check(params: SystemParams, source: str, x0: PhasePoint4C,
                        cfg: dynamics.IntegratorConfig) -> CheckResult:
    """Integrate the 4D source and track the KS image on the target level set."""
    source = ks.Source(source)
    sid = dynamics.SystemId.OSC_ANISO if source is ks.Source.FLAT else dynamics.SystemId.HIGGS_ANISO
    sp = ks.source_params(params, source)
    tr = dynamics.integrate(sid, x0, sp, cfg)
    E0 = float(ks.source_hamiltonian(x0, params, source))
    tp = ks.target_params(params, source, E0)
    e_target = ks.target_energy(params, source, E0)
    worst = 0.0
    for i in range(len(tr.times)):
        y = ks.ks_map(tr.state(i)).reduced
        worst = max(worst, abs(float(ks.target_hamiltonian(y, tp, source)) - e_target))
    errors = [] if tr.event is dynamics.Event.COMPLETED else [f"{tr.event.value}: {tr.message}"]
    return _result("ks:level-trajectory", worst, len(tr.times), errors, source=source.value,
                   t_end=float(tr.times[-1]))


def separation_suite(params: SystemParams, states: Sequence[ReducedPoint3],
                     involution_states: int = 20) -> list[CheckResult]:
    r0 = params.r0
    rt = eq = cons = hj = 0.0
    errors: list = []
    for i, x in enumerate(states):
        try:
            pp = separation.to_parabolic(x.q, r0)
            back = separation.from_parabolic(pp.xi, pp.eta, pp.phi, r0)
            rt = max(rt, float(np.max(np.abs(np.array(back) - np.array(x.q)))))
            ps = separation.parabolic_momenta(x, r0)
            E = float(curved.h_micz_curved(x, params, curved.CurvedSystemId.MICZ_PSEUDO))
            eq = max(eq, abs(E - float(separation.h_micz_parabolic(ps, params))))
            rec = separation.separation_constant(ps, params, E)
            cons = max(cons, rec.mismatch)
            hj = max(hj, max(separation.hj_residual_chi_zeta(ps, params, E, rec.beta_xi)))
        except DomainError as exc:
            errors.append(f"state {i}: {exc}")
    H = dynamics.system("micz-pseudo").hamiltonian
    B, P = separation.beta_observable(), separation.p_phi_observable()
    inv = 0.0
    for x in states[:involution_states]:
        for f, g in ((H, B), (H, P), (B, P)):
            inv = max(inv, scaled_bracket(f, g, x, params))
    n = len(states)
    return [
        _result("separation:round-trip", rt, n, errors),
        _result("separation:chart-equivalence", eq, n, errors),
        _result("separation:beta-consistency", cons, n, errors),
        _result("separation:chi-zeta", hj, n, errors),
        _result("separation:involution", inv, min(n, involution_states)),
    ]


def beta_drift_check(params: SystemParams, x0: ReducedPoint3, cfg: dynamics.IntegratorConfig) -> CheckResult:
    tr = dynamics.integrate("micz-pseudo", x0, params, cfg, [separation.beta_observable()])
    d = dynamics.drift_report(tr)["beta"]
    errors = [] if tr.event is dynamics.Event.COMPLETED else [f"{tr.event.value}: {tr.message}"]
    return _result("separation:beta-drift", d.max_rel, len(tr.times), errors, max_abs=d.max_abs,
                   t_end=float(tr.times[-1]))


def reflection_checks(params: SystemParams, states: Sequence[ReducedPoint3]) -> list[CheckResult]:
    """Relations between the two source-curvature variants of the pseudospherical system.

    The sign-flip form (``q3 -> -q3`` with ``dw2 -> -dw2``) is evaluated with
    the linear potential switched off, so that only the anisotropy terms are
    compared.  It does not hold.  The shift form moves the difference into the
    linear potential and holds exactly.
    """
    which = curved.CurvedSystemId.MICZ_PSEUDO
    plus = params.with_(source_sign=1)
    minus = params.with_(source_sign=-1, eps_el=0.0)
    flipped = shifted = 0.0
    for x in states:
        xr = ReducedPoint3((x.q[0], x.q[1], -x.q[2]), x.p, x.s)
        h_plus = float(curved.h_micz_curved(x, plus, which))
        h_plus0 = float(curved.h_micz_curved(x, plus.with_(eps_el=0.0), which))
        h_minus_refl = float(curved.h_micz_curved(xr, minus.with_(delta_omega_sq=-params.delta_omega_sq), which))
        flipped = max(flipped, abs(h_plus0 - h_minus_refl) / max(abs(h_plus0), 1.0))
        h_shift = float(curved.h_micz_curved(x, curved.reflection_partner(plus), which))
        shifted = max(shifted, abs(h_plus - h_shift) / max(abs(h_plus), 1.0))
    return [_result("curved:reflection-sign-flip", flipped, len(states)),
            _result("curved:reflection-shift", shifted, len(states))]


def ambient_checks(params: SystemParams, states: Sequence[PhasePoint4C]) -> list[CheckResult]:
    cons = aniso = 0.0
    for x in states:
        a = curved.to_ambient(x.z, params)
        cons = max(cons, abs(a.constraint(params.eps) - params.R0**2) / params.R0**2)
        chart = curved.chart_anisotropy(x.z, params)
        aniso = max(aniso, abs(curved.ambient_anisotropy(a, params) - chart) / max(abs(chart), 1.0))
    return [_result("curved:ambient-constraint", cons, len(states)),
            _result("curved:ambient-anisotropy", aniso, len(states))]


def flat_limit_checks(params: SystemParams, pairs: Sequence[tuple], radii: Sequence[float]) -> list[CheckResult]:
    """Convergence of the curved/flat energy ratio as ``R0`` grows.

    The limit ``c`` is extrapolated from the two largest radii; the shrink
    factor of ``|r(R0) - c|`` is measured on the two smallest, which are not
    used for the extrapolation when at least four radii are given.
    """
    radii = sorted(radii)
    limits, shrinks, rows_out = [], [], []
    for u, w in pairs:
        rows = curved.flat_limit_ratio(u, w, params, radii)
        good = [r for r in rows if r.ratio is not None]
        c = curved.richardson_limit(rows)
        a, b = good[0], good[1]
        shrinks.append(abs(a.ratio - c) / abs(b.ratio - c))
        limits.append(c)
        rows_out.append([[r.R0, r.ratio, r.flag] for r in rows])
    spread = max(abs(c - limits[0]) for c in limits)
    worst = max(shrinks, key=lambda f: abs(math.log(f / 100.0)))
    return [
        _result("flat-limit:shrink-factor", worst, len(pairs), shrink_factors=shrinks, radii=list(radii)),
        _result("flat-limit:constant", spread, len(pairs), limits=limits),
    ]


def laplace_checks(r0: float, points: Sequence[Sequence[float]], h: float = 1e-2,
                   gamma: float = 1.0, eps_el: float = 1.0) -> list[CheckResult]:
    V = curved.kepler_potential_chart(gamma, r0)
    kep = max(abs(curved.laplace_beltrami_residual(V, q, r0, h).extrapolated) for q in points)
    lin = curved.laplace_beltrami_residual(curved.linear_potential_chart(eps_el, r0), (0.0, 0.0, 0.3), r0, h)
    return [
        _result("laplace:kepler-harmonic", kep, len(points)),
        _result("laplace:linear-nonharmonic", abs(lin.extrapolated), 1, observed_order=lin.observed_order),
    ]


def rk4_order(x0: PhasePoint4C, omega: float = 1.0, steps: Sequence[float] = (0.1, 0.05)) -> float:
    """Observed order from end-state errors at ``t = 2 pi`` against the closed form."""
    pr = SystemParams(omega=omega)
    errs = []
    for h in steps:
        tr = dynamics.integrate("osc-iso", x0, pr, dynamics.IntegratorConfig(
            method="rk4-fixed", t_end=2 * math.pi / omega, step=h))
        errs.append(float(np.max(np.abs(tr.states[-1] - harmonic_solution(x0, omega, tr.times[-1])))))
    return math.log(errs[0] / errs[1]) / math.log(steps[0] / steps[1])


def harmonic_solution(x0: PhasePoint4C, omega: float, t: float) -> np.ndarray:
    """Closed-form flow of ``pi.pibar + w^2 z.zbar`` under the package bracket.

    Hamilton's equations give ``dz/dt = pibar`` and ``dpi/dt = -w^2 zbar``,
    so ``z(t) = z0 cos(w t) + pibar0 sin(w t) / w``.
    """
    c, s = math.cos(omega * t), math.sin(omega * t)
    z = [x0.z[a] * c + x0.pi[a].conjugate() * s / omega for a in range(2)]
    pi = [x0.pi[a] * c - omega * x0.z[a].conjugate() * s for a in range(2)]
    return PhasePoint4C(tuple(z), tuple(pi)).real_view()


def dynamics_checks(x0: PhasePoint4C, omega: float = 1.0) -> list[CheckResult]:
    pr = SystemParams(omega=omega)
    period = 2 * math.pi / omega
    tr = dynamics.integrate("osc-iso", x0, pr, dynamics.IntegratorConfig(t_end=period, rtol=1e-10, atol=1e-12))
    closure = float(np.max(np.abs(tr.states[-1] - tr.states[0])))
    fwd = dynamics.integrate("osc-iso", x0, pr, dynamics.IntegratorConfig(method="rk4-fixed", t_end=5.0, step=1e-3))
    back = dynamics.integrate("osc-iso", fwd.state(-1), pr,
                              dynamics.IntegratorConfig(method="rk4-fixed", t_end=-5.0, step=1e-3))
    rev = float(np.max(np.abs(back.states[-1] - fwd.states[0])))
    return [
        _result("dynamics:rk4-order", rk4_order(x0, omega), 2),
        _result("dynamics:period-closure", closure, len(tr.times), period=period),
        _result("dynamics:time-reversal", rev, len(fwd.times)),
    ]


def drift_check(sid: str, x0, params: SystemParams, cfg: dynamics.IntegratorConfig) -> tuple[CheckResult, dynamics.Trajectory]:
    spec = dynamics.system(sid)
    watch = [spec.hamiltonian] + spec.constants(params)
    tr = dynamics.integrate(sid, x0, params, cfg, watch)
    rep = dynamics.drift_report(tr)
    worst = max(d.max_rel for d in rep.values())
    errors = [] if tr.event is dynamics.Event.COMPLETED else [f"{tr.event.value}: {tr.message}"]
    res = _result("dynamics:drift", worst, len(tr.times), errors, system=spec.id.value,
                  per_observable={k: v.max_rel for k, v in rep.items()}, t_end=float(tr.times[-1]))
    return res, tr


# Bound reference motions for the conservation runs.  States with an escape
# route to the chart boundary (the linear potential is unbounded below there)
# are avoided; an escape would end the run with a boundary event.
_Z_REF = (0.3, 0.1, -0.2, 0.25, 0.4, -0.3, 0.2, 0.1)
_Z_REF_SMALL = (0.18, 0.06, -0.12, 0.15, 0.4, -0.3, 0.2, 0.1)
_Q_REF = (0.2, -0.1, 0.15, 0.1, 0.2, -0.1)

REFERENCE_RUNS = {
    "osc-iso": (_Z_REF, 0.0, SystemParams(omega=1.0)),
    "osc-aniso": (_Z_REF, 0.0, SystemParams(omega=1.2, delta_omega_sq=0.3, eps_el=0.2)),
    "higgs": (_Z_REF, 0.0, SystemParams(omega=1.0, R0=1.5, curvature=Curvature.SPHERE)),
    "higgs-aniso": (_Z_REF_SMALL, 0.0, SystemParams(omega=1.0, delta_omega_sq=0.2, eps_el=0.05, R0=1.5,
                                                    curvature=Curvature.PSEUDOSPHERE)),
    "micz-flat": ((1.0, 0.2, 0.3, 0.1, 0.8, -0.2), 0.5, SystemParams(gamma=1.0, delta_omega_sq=0.2, eps_el=0.02)),
    "micz-pseudo": (_Q_REF, 0.5, SystemParams(gamma=1.0, delta_omega_sq=0.2, eps_el=0.02, R0=1.2,
                                              curvature=Curvature.PSEUDOSPHERE)),
    "micz-sphere": ((0.3, -0.2, 0.4, 0.2, 0.3, -0.1), 0.5,
                    SystemParams(gamma=1.0, delta_omega_sq=0.2, eps_el=0.05, R0=1.2, curvature=Curvature.SPHERE)),
}


def reference_drift(sid: str, t_end: float = 100.0, rtol: float = 1e-10) -> tuple[CheckResult, dynamics.Trajectory]:
    v, s, params = REFERENCE_RUNS[sid]
    x0 = dynamics.system(sid).make_state(v, s)
    return drift_check(sid, x0, params, dynamics.IntegratorConfig(t_end=t_end, rtol=rtol, atol=rtol * 1e-2))
