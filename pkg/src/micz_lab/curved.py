"""Systems on the 4D (pseudo)sphere and their 3D Kepler-like reductions.

Four-dimensional oscillators live in the projective chart ``z`` with metric
``4 R0^2 dz dzbar / (1 + eps z zbar)^2``; the reduced systems live in the
stereographic chart ``q`` of the 3D pseudosphere (or sphere) of radius
``r0 = R0^2``.  Ambient coordinates are provided only as a derived view.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import dual
from .brackets import (
    SINGULAR_EPS,
    DomainError,
    PhasePoint4C,
    ReducedPoint3,
    SingularityError,
    SystemParams,
    require_off_origin,
)
from .flat import J_u1, J_vec, angular_momentum, h_flat
from .vec import add, conj2, cross, dot, pair_dot, real_part, scale, sigma3_form, sigma_form, sq


class CurvedSystemId(str, enum.Enum):
    HIGGS = "higgs"
    HIGGS_ANISO = "higgs-aniso"
    MICZ_PSEUDO = "micz-pseudo"
    MICZ_SPHERE = "micz-sphere"


def _away(v, what: str):
    if abs(dual.base_value(v)) < SINGULAR_EPS:
        raise SingularityError(f"{what} vanishes (within 1e-12)")
    return v


def _check_chart(zz, eps: int):
    if eps < 0 and not dual.base_value(zz) < 1.0 - SINGULAR_EPS:
        raise DomainError("pseudosphere chart requires z.zbar < 1")


@dataclass(frozen=True)
class AmbientPoint:
    """Ambient Cartesian point: complex pair ``x`` and real ``x0``."""

    x: tuple
    x0: float

    def constraint(self, eps: int) -> float:
        x1, x2 = self.x
        return eps * (abs(x1) ** 2 + abs(x2) ** 2) + self.x0**2


def to_ambient(z: Sequence[complex], params: SystemParams) -> AmbientPoint:
    params.curved()
    eps, R0 = params.eps, params.R0
    zz = abs(z[0]) ** 2 + abs(z[1]) ** 2
    _check_chart(zz, eps)
    den = _away(1 + eps * zz, "1 + eps z.zbar")
    return AmbientPoint((2 * R0 * z[0] / den, 2 * R0 * z[1] / den), R0 * (1 - eps * zz) / den)


def from_ambient(a: AmbientPoint, params: SystemParams) -> tuple:
    """Inverse of :func:`to_ambient` on the ``x0 > 0`` sheet."""
    params.curved()
    R0 = params.R0
    if abs(a.constraint(params.eps) - R0 * R0) > 1e-10 * R0 * R0:
        raise DomainError("ambient point is off the (pseudo)sphere")
    if not a.x0 > -R0 + SINGULAR_EPS:
        raise SingularityError("chart boundary: x0 = -R0 has no chart image")
    if params.eps < 0 and a.x0 <= 0:
        raise DomainError("pseudosphere chart covers only the x0 > 0 sheet")
    den = R0 + a.x0
    return (a.x[0] / den, a.x[1] / den)


def _osc_parts(x: PhasePoint4C, params: SystemParams):
    params.curved()
    eps = params.eps
    z, pi = x.z, x.pi
    zb, pib = conj2(z), conj2(pi)
    zz = real_part(pair_dot(z, zb), "z.zbar")
    _check_chart(zz, eps)
    ppb = real_part(pair_dot(pi, pib), "pi.pibar")
    z3 = real_part(sigma3_form(z, zb), "z sigma3 zbar")
    return eps, zz, ppb, z3


def anisotropy_profile(zz, params: SystemParams):
    """Radial factor multiplying ``z sigma3 zbar`` in the deformed Higgs potential."""
    eps, R0 = params.eps, params.R0
    one_p = _away(1 + eps * zz, "1 + eps z.zbar")
    one_m = _away(1 - eps * zz, "1 - eps z.zbar")
    one_m2 = _away(1 - zz * zz, "1 - (z.zbar)^2")
    return (
        2 * R0**2 * params.delta_omega_sq / one_p**2
        + 8 * params.eps_el * R0**4 * (1 + zz * zz) * zz / (one_m2**2 * one_m**2)
    )


def h_higgs_aniso(x: PhasePoint4C, params: SystemParams, which: str = "higgs-aniso"):
    eps, zz, ppb, z3 = _osc_parts(x, params)
    R0 = params.R0
    one_m = _away(1 - eps * zz, "1 - eps z.zbar")
    h = (1 + eps * zz) ** 2 * ppb / (2 * R0**2) + 2 * params.omega**2 * R0**2 * zz / one_m**2
    if which == CurvedSystemId.HIGGS:
        return h
    if which != CurvedSystemId.HIGGS_ANISO:
        raise ValueError(f"unknown curved oscillator {which!r}")
    if params.delta_omega_sq == 0 and params.eps_el == 0:
        return h
    return h + z3 * anisotropy_profile(zz, params)


def translations(x: PhasePoint4C, params: SystemParams):
    """``J_a = (1 - eps z.zbar) pi_a + eps (pi z + pibar zbar) zbar^a``."""
    eps = params.curved().eps
    z, pi = x.z, x.pi
    zb, pib = conj2(z), conj2(pi)
    zz = real_part(pair_dot(z, zb))
    c = pair_dot(pi, z) + pair_dot(pib, zb)
    return tuple((1 - eps * zz) * pi[a] + eps * c * zb[a] for a in range(2))


def A_vec_higgs(x: PhasePoint4C, params: SystemParams):
    eps, zz, _, _ = _osc_parts(x, params)
    R0 = params.R0
    J = translations(x, params)
    a = sigma_form(J, conj2(J))
    b = sigma_form(conj2(x.z), x.z)
    w = 2 * params.omega**2 * R0**2 / _away(1 - eps * zz, "1 - eps z.zbar") ** 2
    return tuple(real_part(a[k] / (2 * R0**2) + w * b[k], f"A{k + 1}") for k in range(3))


def A_hidden_higgs(x: PhasePoint4C, params: SystemParams):
    eps, zz, _, z3 = _osc_parts(x, params)
    R0 = params.R0
    one_p = _away(1 + eps * zz, "1 + eps z.zbar")
    one_m = _away(1 - eps * zz, "1 - eps z.zbar")
    one_m2 = _away(1 - zz * zz, "1 - (z.zbar)^2")
    return (
        A_vec_higgs(x, params)[2]
        + 2 * R0**2 * params.delta_omega_sq * zz / one_p**2
        + 4 * params.eps_el * R0**4 * (zz * zz / one_m2**2 + z3 * z3 / one_m**4)
    )


def curved_oscillator_observables(x: PhasePoint4C, params: SystemParams) -> dict:
    return {
        "J": J_u1(x),
        "J3": J_vec(x)[2],
        "J_alpha": translations(x, params),
        "A_vec": A_vec_higgs(x, params),
        "A_hidden": A_hidden_higgs(x, params),
    }


def ambient_anisotropy(a: AmbientPoint, params: SystemParams) -> float:
    """Anisotropy potential written through ambient coordinates.

    ``(dw2/2 + eps eps_el R0^2 (R0^4 - x0^4) / (4 x0^4)) * (x sigma3 xbar)``.
    The quarter in the inharmonic term is what makes this agree with the
    chart form.
    """
    R0, eps = params.R0, params.eps
    x1, x2 = a.x
    x3form = abs(x1) ** 2 - abs(x2) ** 2
    x0_4 = a.x0**4
    if abs(x0_4) < SINGULAR_EPS:
        raise SingularityError("x0 = 0: anisotropy potential diverges")
    coef = params.delta_omega_sq / 2 + eps * params.eps_el * R0**2 * (R0**4 - x0_4) / (4 * x0_4)
    return coef * x3form


def chart_anisotropy(z: Sequence[complex], params: SystemParams) -> float:
    zz = abs(z[0]) ** 2 + abs(z[1]) ** 2
    return (abs(z[0]) ** 2 - abs(z[1]) ** 2) * anisotropy_profile(zz, params)


def higgs_potential_ambient(a: AmbientPoint, params: SystemParams) -> float:
    """Isotropic Higgs potential ``(w^2 R0^2 / 2)(R0^2 - x0^2)/x0^2``."""
    R0 = params.R0
    return params.omega**2 * R0**2 / 2 * (R0**2 - a.x0**2) / a.x0**2


# --- reduced Kepler-like systems -------------------------------------------

def _reduced_parts(x: ReducedPoint3, which: str):
    require_off_origin(x)
    q2 = x.q2()
    if which == CurvedSystemId.MICZ_PSEUDO and not dual.base_value(q2) < 1.0 - SINGULAR_EPS:
        raise DomainError("pseudosphere chart requires q.q < 1")
    return q2, dual.sqrt(q2)


def h_micz_curved(x: ReducedPoint3, params: SystemParams, which: str = "micz-pseudo"):
    """Energy of the pseudospherical (or spherical) MICZ-Kepler-like system.

    The anisotropy term of the pseudospherical system depends on the
    curvature sign of the 4D source, ``params.source_sign``.
    """
    q2, q = _reduced_parts(x, which)
    r0, s, q3 = params.r0, x.s, x.q[2]
    kin = sq(x.p) + s * s / q2
    if which == CurvedSystemId.MICZ_PSEUDO:
        e = params.source_sign
        return (
            (1 - q2) ** 2 / (8 * r0**2) * kin
            - params.gamma / (2 * r0) * (1 + q2) / q
            + params.delta_omega_sq / 2 * ((1 - e * q) / (1 + e * q)) ** 2 * q3 / q
            + 2 * params.eps_el * r0 * (1 + q2) * q3 / (1 - q2) ** 2
        )
    if which == CurvedSystemId.MICZ_SPHERE:
        return (
            h0_micz_sphere(x, params)
            + params.delta_omega_sq / 2 * (1 - 6 * q2 + q2 * q2) / (1 + q2) ** 2 * q3 / q
            + 2 * params.eps_el * (1 - q2) * q3 / (1 + q2) ** 2
        )
    raise ValueError(f"unknown curved Kepler-like system {which!r}")


def h0_micz_sphere(x: ReducedPoint3, params: SystemParams):
    q2, q = _reduced_parts(x, CurvedSystemId.MICZ_SPHERE)
    r0 = params.r0
    return (1 + q2) ** 2 / (8 * r0**2) * (sq(x.p) + x.s**2 / q2) - params.gamma * (1 - q2) / (2 * r0 * q)


def translation_generator(x: ReducedPoint3, which: str):
    qp = dot(x.q, x.p)
    if which == CurvedSystemId.MICZ_PSEUDO:
        return add(scale(1 + x.q2(), x.p), scale(-2 * qp, x.q))
    return add(scale(1 - x.q2(), x.p), scale(2 * qp, x.q))


def runge_lenz_curved(x: ReducedPoint3, params: SystemParams, which: str):
    """``(J x T)/(2 r0) + gamma q/|q|`` for both curvatures."""
    _, q = _reduced_parts(x, which)
    J = angular_momentum(x)
    T = translation_generator(x, which)
    return add(scale(1 / (2 * params.r0), cross(J, T)), scale(params.gamma / q, x.q))


def A_hidden_micz_curved(x: ReducedPoint3, params: SystemParams, which: str):
    q2, q = _reduced_parts(x, which)
    r0 = params.r0
    rho2 = q2 - x.q[2] ** 2
    a = runge_lenz_curved(x, params, which)[2]
    if which == CurvedSystemId.MICZ_PSEUDO:
        e = params.source_sign
        return (
            a
            + r0 * params.delta_omega_sq / (1 + e * q) ** 2 * rho2 / q
            + 2 * params.eps_el * r0**2 * rho2 / (1 - q2) ** 2
        )
    return a + (params.delta_omega_sq * r0 * (1 - q2) / q + 2 * params.eps_el * r0) * rho2 / (1 + q2) ** 2


def micz_curved_observables(x: ReducedPoint3, params: SystemParams, which: str) -> dict:
    return {
        "J_vec": angular_momentum(x),
        "T_vec": translation_generator(x, which),
        "RungeLenz_vec": runge_lenz_curved(x, params, which),
        "A_hidden": A_hidden_micz_curved(x, params, which),
    }


# --- flat limit --------------------------------------------------------------

@dataclass(frozen=True)
class FlatLimitRow:
    R0: float
    ratio: float | None
    flag: str = ""


def scaled_state(u: Sequence[complex], w: Sequence[complex], R0: float) -> PhasePoint4C:
    """Curved chart state approaching the flat state ``(u, w)`` as ``R0 -> inf``.

    ``z = u / (sqrt(2) R0)`` and ``pi = sqrt(2) R0 w``: the chart coordinate
    is ``x / (2 R0)`` to leading order while the flat complex coordinate is
    ``x / sqrt(2)``.
    """
    c = math.sqrt(2.0) * R0
    return PhasePoint4C((u[0] / c, u[1] / c), (w[0] * c, w[1] * c))


def flat_limit_ratio(u: Sequence[complex], w: Sequence[complex], params: SystemParams,
                     R0_sequence: Sequence[float]) -> list[FlatLimitRow]:
    """``H_curved(z(R0), pi(R0)) / H_flat(u, w)`` for each radius."""
    params.curved()
    ref = h_flat(PhasePoint4C(tuple(u), tuple(w)), params, "aniso")
    rows = []
    for R0 in R0_sequence:
        if abs(ref) < 1e-300:
            rows.append(FlatLimitRow(R0, None, "indeterminate"))
            continue
        try:
            h = h_higgs_aniso(scaled_state(u, w, R0), params.with_(R0=R0), CurvedSystemId.HIGGS_ANISO)
        except DomainError as exc:
            rows.append(FlatLimitRow(R0, None, f"domain: {exc}"))
            continue
        rows.append(FlatLimitRow(R0, float(h) / ref))
    return rows


def richardson_limit(rows: Sequence[FlatLimitRow], order: int = 2) -> float:
    """Extrapolate ``ratio(R0) = c + a / R0^order`` from the two largest radii."""
    good = sorted((r for r in rows if r.ratio is not None), key=lambda r: r.R0)
    if len(good) < 2:
        raise ValueError("need two determinate rows")
    (Ra, ra), (Rb, rb) = (good[-2].R0, good[-2].ratio), (good[-1].R0, good[-1].ratio)
    wa, wb = Ra**order, Rb**order
    return (rb * wb - ra * wa) / (wb - wa)


# --- Laplace-Beltrami on the pseudosphere chart -----------------------------

def laplace_beltrami(V: Callable, q: Sequence[float], r0: float, h: float) -> float:
    """Central-difference Laplace-Beltrami of ``V`` for ``ds^2 = 4 r0^2 dq^2 / (1 - q^2)^2``.

    Uses the flux form ``lambda^-3 div(lambda grad V)`` with conformal factor
    ``lambda = 2 r0 / (1 - q^2)``; second order in ``h``.
    """
    q = np.asarray(q, dtype=float)
    nq = float(np.linalg.norm(q))
    if not (q @ q < 1 - 10 * h and nq > 10 * h):
        raise DomainError("stencil crosses the chart boundary or the origin")

    def lam(y):
        return 2 * r0 / (1 - y @ y)

    v0 = V(q)
    acc = 0.0
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        acc += lam(q + e / 2) * (V(q + e) - v0) - lam(q - e / 2) * (v0 - V(q - e))
    return acc / (h * h * lam(q) ** 3)


@dataclass(frozen=True)
class LaplaceResidual:
    steps: tuple
    residuals: tuple
    extrapolated: float
    observed_order: float | None


def laplace_beltrami_residual(V: Callable, q: Sequence[float], r0: float,
                              h: float = 1e-2) -> LaplaceResidual:
    """Laplace-Beltrami residual at ``h, h/2, h/4`` with Richardson extrapolation.

    The three-level extrapolation removes the ``h^2`` and ``h^4`` error terms.
    """
    hs = (h, h / 2, h / 4)
    rs = tuple(laplace_beltrami(V, q, r0, hh) for hh in hs)
    ext = (64 * rs[2] - 20 * rs[1] + rs[0]) / 45
    d1, d2 = rs[0] - rs[1], rs[1] - rs[2]
    order = math.log2(abs(d1 / d2)) if d1 != 0 and d2 != 0 else None
    return LaplaceResidual(hs, rs, ext, order)


def kepler_potential_chart(gamma: float, r0: float) -> Callable:
    def V(q):
        n = float(np.linalg.norm(q))
        return -gamma * (1 + n * n) / (2 * r0 * n)

    return V


def linear_potential_chart(eps_el: float, r0: float) -> Callable:
    """``eps_el * x0 * x3`` through the stereographic chart."""

    def V(q):
        q2 = float(q @ q)
        x0 = r0 * (1 + q2) / (1 - q2)
        x3 = 2 * r0 * q[2] / (1 - q2)
        return eps_el * x0 * x3

    return V


def reflection_partner(params: SystemParams) -> SystemParams:
    """Parameters under which the other source-curvature variant gives the same Hamiltonian.

    The two anisotropy variants differ by ``-4 dw2 (1+q^2) q3 / (1-q^2)^2``,
    which is absorbed by a shift of the linear-potential strength:
    ``H(e=+1; dw2, eps_el) = H(e=-1; dw2, eps_el - 2 dw2 / r0)``.
    """
    shift = 2 * params.delta_omega_sq / params.r0
    e = params.source_sign
    return params.with_(source_sign=-e, eps_el=params.eps_el - e * shift)
