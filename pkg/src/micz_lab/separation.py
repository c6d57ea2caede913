"""Generalized parabolic coordinates on the pseudosphere and Hamilton-Jacobi
separation of the pseudospherical MICZ-Kepler-like system.

Coordinates ``(xi, eta, phi)`` are defined through the ambient hyperboloid
``x0^2 - x^2 = r0^2``:

    xi  = (|x| sqrt(r0^2 + x3^2) + x0 x3) / r0
    eta = (|x| sqrt(r0^2 + x3^2) - x0 x3) / r0

with ``xi = r0 sinh(chi)``, ``eta = r0 sinh(zeta)`` and
``chi, zeta = asinh(|x|/r0) +- asinh(x3/r0)``.  The stereographic chart is
``q = x / (r0 + x0)``.  Every formula here is checked against the chart
Hamiltonian, which is the ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dual
from .brackets import (
    SINGULAR_EPS,
    ContractError,
    DomainError,
    Observable,
    ReducedPoint3,
    SystemParams,
)
from .curved import CurvedSystemId, h_micz_curved
from .flat import angular_momentum

ON_SHELL_TOL = 1e-9


class DegeneracyError(DomainError):
    """The parabolic chart is degenerate (axis point or xi, eta at zero)."""


@dataclass(frozen=True)
class ParabolicState:
    """Parabolic coordinates and conjugate momenta on the charge-``s`` leaf.

    ``p_phi`` is conjugate to ``phi`` in the gauge where it equals ``J3 - s``.
    """

    xi: float
    eta: float
    phi: float
    p_xi: float = 0.0
    p_eta: float = 0.0
    p_phi: float = 0.0
    s: float = 0.0
    r0: float = 1.0

    DIM = 6

    @property
    def chi(self):
        return dual.asinh(self.xi / self.r0)

    @property
    def zeta(self):
        return dual.asinh(self.eta / self.r0)

    def components(self) -> list:
        return [self.xi, self.eta, self.phi, self.p_xi, self.p_eta, self.p_phi]

    def rebuild(self, comps) -> "ParabolicState":
        return ParabolicState(*comps, s=self.s, r0=self.r0)

    def real_view(self) -> np.ndarray:
        return np.array([dual.base_value(c) for c in self.components()], dtype=float)


@dataclass(frozen=True)
class SeparationRecord:
    beta_xi: float
    beta_eta: float
    energy: float

    @property
    def mismatch(self) -> float:
        return abs(self.beta_xi - self.beta_eta)


@dataclass(frozen=True)
class ParabolicPoint:
    xi: float
    eta: float
    phi: float
    degenerate: bool = False


def _ambient(q, r0):
    q1, q2, q3 = q
    qq = q1 * q1 + q2 * q2 + q3 * q3
    den = 1 - qq
    perp2 = 4 * r0 * r0 * (q1 * q1 + q2 * q2) / (den * den)
    return dual.sqrt(qq) * 2 * r0 / den, r0 * (1 + qq) / den, 2 * r0 * q3 / den, perp2


def to_parabolic(q, r0: float) -> ParabolicPoint:
    """Chart point to ``(xi, eta, phi)``; axis points get ``phi = 0`` and a flag."""
    qq = q[0] * q[0] + q[1] * q[1] + q[2] * q[2]
    if not dual.base_value(qq) < 1.0 - SINGULAR_EPS:
        raise DomainError("pseudosphere chart requires q.q < 1")
    if dual.base_value(qq) == 0:
        return ParabolicPoint(0.0, 0.0, 0.0, True)
    xn, x0, x3, perp2 = _ambient(q, r0)
    S = xn * dual.sqrt(r0 * r0 + x3 * x3)
    # the larger of S +- x0 x3 is formed directly, the other through their product
    if dual.base_value(x3) >= 0:
        big = S + x0 * x3
        xi, eta = big / r0, r0 * perp2 / big
    else:
        big = S - x0 * x3
        xi, eta = r0 * perp2 / big, big / r0
    axis = dual.base_value(q[0]) == 0 and dual.base_value(q[1]) == 0
    phi = 0.0 if axis else dual.atan2(q[1], q[0])
    return ParabolicPoint(xi, eta, phi, axis)


def from_parabolic(xi, eta, phi, r0: float) -> tuple:
    if dual.base_value(xi) < 0 or dual.base_value(eta) < 0:
        raise DomainError("xi and eta must be non-negative")
    A = dual.sqrt((r0 * r0 + xi * xi) * (r0 * r0 + eta * eta))
    B = dual.sqrt((A + xi * eta + r0 * r0) / 2)  # equals x0
    w = dual.sqrt(xi * eta) / (r0 + B) if dual.base_value(xi * eta) > 0 else 0.0 * xi
    q3 = r0 * (xi - eta) / (2 * B * (r0 + B))
    return (w * dual.cos(phi), w * dual.sin(phi), q3)


def parabolic_momenta(x: ReducedPoint3, r0: float) -> ParabolicState:
    """Momenta ``p_a = (dq/da) . p`` through the exact chart Jacobian."""
    pp = to_parabolic(x.q, r0)
    perp2 = x.q[0] * x.q[0] + x.q[1] * x.q[1]
    if (pp.degenerate or dual.base_value(pp.xi) <= 1e-10 or dual.base_value(pp.eta) <= 1e-10
            or dual.base_value(perp2) <= 1e-20):
        raise DegeneracyError("parabolic momenta are undefined on the axis and at xi, eta = 0")
    v = dual.seed([pp.xi, pp.eta, pp.phi])
    qs = from_parabolic(v[0], v[1], v[2], r0)
    cols = [dual.derivative(c, 3) for c in qs]
    p_xi = sum(cols[k][0] * x.p[k] for k in range(3))
    p_eta = sum(cols[k][1] * x.p[k] for k in range(3))
    p_phi = angular_momentum(x)[2] - x.s
    return ParabolicState(pp.xi, pp.eta, pp.phi, p_xi, p_eta, p_phi, x.s, r0)


def _linear_strength(params: SystemParams) -> float:
    """Linear-potential strength after absorbing the sphere-source anisotropy shift."""
    if params.source_sign > 0:
        return params.eps_el - 2 * params.delta_omega_sq / params.r0
    return params.eps_el


def _check_coords(ps: ParabolicState):
    if not (dual.base_value(ps.xi) > 1e-10 and dual.base_value(ps.eta) > 1e-10):
        raise DegeneracyError("parabolic coordinates need xi, eta > 0")


def _side(u, p_u, ps: ParabolicState, params: SystemParams, sign: int):
    """One separated side; ``sign = +1`` for ``xi``, ``-1`` for ``eta``."""
    r0, s = params.r0, ps.s
    su = dual.sqrt(r0 * r0 + u * u)
    return (
        2 * u * (r0 * r0 + u * u) / (r0 * r0) * p_u * p_u
        + ps.p_phi * ps.p_phi / (2 * u)
        + (s * ps.p_phi + s * s) * (r0 + sign * su) / (r0 * u)
        + sign * params.delta_omega_sq / (2 * r0) * (u * su + u * u)
        - params.gamma / r0 * su
        + sign * _linear_strength(params) * u * u / 2
    )


def h_micz_parabolic(ps: ParabolicState, params: SystemParams):
    """Pseudospherical MICZ-Kepler-like energy in parabolic coordinates."""
    _check_coords(ps)
    return (_side(ps.xi, ps.p_xi, ps, params, 1) + _side(ps.eta, ps.p_eta, ps, params, -1)) / (ps.xi + ps.eta)


def separation_constant(ps: ParabolicState, params: SystemParams, E: float) -> SeparationRecord:
    """``beta`` from the xi-equation and from the (sign-flipped) eta-equation."""
    _check_coords(ps)
    h = float(h_micz_parabolic(ps, params))
    if abs(E - h) > ON_SHELL_TOL * max(1.0, abs(h)):
        raise ContractError(f"energy {E!r} is off shell (H = {h!r})")
    bx = _side(ps.xi, ps.p_xi, ps, params, 1) - E * ps.xi
    be = -(_side(ps.eta, ps.p_eta, ps, params, -1) - E * ps.eta)
    return SeparationRecord(float(bx), float(be), float(E))


def hj_residual_chi_zeta(ps: ParabolicState, params: SystemParams, E: float, beta: float) -> tuple:
    """Residuals of the separated equations written in ``chi`` and ``zeta``.

    With ``xi = r0 sinh(chi)`` the momentum is ``p_chi = r0 cosh(chi) p_xi`` and
    the xi-equation becomes
    ``(2 sinh(chi)/r0) p_chi^2 + V(r0 sinh chi) - E r0 sinh(chi) = beta``.
    """
    _check_coords(ps)
    h = float(h_micz_parabolic(ps, params))
    if abs(E - h) > ON_SHELL_TOL * max(1.0, abs(h)):
        raise ContractError(f"energy {E!r} is off shell (H = {h!r})")
    r0 = params.r0
    out = []
    for ang, p_u, sign, rhs in ((ps.chi, ps.p_xi, 1, beta), (ps.zeta, ps.p_eta, -1, -beta)):
        sh = dual.sinh(ang)
        if abs(dual.base_value(sh)) < SINGULAR_EPS:
            raise DegeneracyError("chi/zeta = 0 is a coordinate singularity")
        p_ang = r0 * dual.cosh(ang) * p_u
        u = r0 * sh
        static = _side(u, 0.0, ps, params, sign)
        out.append(abs(float(2 * sh / r0 * p_ang * p_ang + static - E * u - rhs)))
    return tuple(out)


def beta_observable() -> Observable:
    """Separation constant as a function of a chart state."""

    def fn(x, pr):
        ps = parabolic_momenta(x, pr.r0)
        E = h_micz_curved(x, pr, CurvedSystemId.MICZ_PSEUDO)
        return _side(ps.xi, ps.p_xi, ps, pr, 1) - E * ps.xi

    return Observable("beta", fn)


def p_phi_observable() -> Observable:
    return Observable("p_phi", lambda x, pr: angular_momentum(x)[2] - x.s)


def parabolic_coordinate(name: str) -> Observable:
    idx = {"xi": 0, "eta": 1, "phi": 2, "p_xi": 3, "p_eta": 4, "p_phi": 5}[name]

    def fn(x, pr):
        return parabolic_momenta(x, pr.r0).components()[idx]

    return Observable(name, fn)
