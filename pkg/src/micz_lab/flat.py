"""Euclidean systems: the 4D (anisotropic inharmonic) oscillator and the flat
MICZ-Kepler system with linear and cos(theta) potentials."""

from __future__ import annotations

import enum

from .brackets import PhasePoint4C, ReducedPoint3, SystemParams, require_off_origin
from .vec import N3, add, conj2, cross, dot, pair_dot, real_part, scale, sigma3_form, sigma_form, sq


class FlatSystemId(str, enum.Enum):
    OSC_ISO = "osc-iso"
    OSC_ANISO = "osc-aniso"
    MICZ_FLAT = "micz-flat"


def _bilinears(x: PhasePoint4C):
    z, pi = x.z, x.pi
    zb, pib = conj2(z), conj2(pi)
    zz = real_part(pair_dot(z, zb), "z.zbar")
    ppb = real_part(pair_dot(pi, pib), "pi.pibar")
    z3 = real_part(sigma3_form(z, zb), "z sigma3 zbar")
    return z, pi, zb, pib, zz, ppb, z3


def h_flat(x: PhasePoint4C, params: SystemParams, which: str = "aniso"):
    """Oscillator energy; ``which`` is ``"iso"`` or ``"aniso"``."""
    _, _, _, _, zz, ppb, z3 = _bilinears(x)
    h = ppb + params.omega**2 * zz
    if which == "iso":
        return h
    if which != "aniso":
        raise ValueError(f"unknown flat oscillator {which!r}")
    return h + (params.delta_omega_sq + 2 * params.eps_el * zz) * z3


def J_u1(x: PhasePoint4C):
    """U(1) generator ``(i/2)(pi z - zbar pibar)``; its value is the monopole charge."""
    z, pi, zb, pib = x.z, x.pi, conj2(x.z), conj2(x.pi)
    return real_part(0.5j * (pair_dot(pi, z) - pair_dot(zb, pib)), "J")


def J_vec(x: PhasePoint4C):
    z, pi, zb, pib = x.z, x.pi, conj2(x.z), conj2(x.pi)
    a = sigma_form(pi, z)
    b = sigma_form(zb, pib)
    return tuple(real_part(0.5j * (a[k] - b[k]), f"J{k + 1}") for k in range(3))


def A_vec(x: PhasePoint4C, params: SystemParams):
    z, pi, zb, pib = x.z, x.pi, conj2(x.z), conj2(x.pi)
    a = sigma_form(pi, pib)
    b = sigma_form(zb, z)
    w2 = params.omega**2
    return tuple(real_part(0.5 * (a[k] + w2 * b[k]), f"A{k + 1}") for k in range(3))


def A_hidden_flat(x: PhasePoint4C, params: SystemParams):
    _, _, _, _, zz, _, z3 = _bilinears(x)
    return (
        A_vec(x, params)[2]
        + 0.5 * params.delta_omega_sq * zz
        + 0.5 * params.eps_el * (zz * zz + z3 * z3)
    )


def flat_oscillator_observables(x: PhasePoint4C, params: SystemParams) -> dict:
    return {
        "J": J_u1(x),
        "J_vec": J_vec(x),
        "A_vec": A_vec(x, params),
        "A_hidden": A_hidden_flat(x, params),
    }


def h_micz_flat(x: ReducedPoint3, params: SystemParams):
    require_off_origin(x)
    q, p, s = x.q, x.p, x.s
    r = x.qnorm()
    return (
        0.5 * sq(p)
        + s * s / (2 * x.q2())
        - params.gamma / r
        + 0.5 * params.delta_omega_sq * q[2] / r
        + params.eps_el * q[2]
    )


def angular_momentum(x: ReducedPoint3):
    """``J = q x p + s q/|q|``.

    This orientation is the one whose third component is the image of the
    oscillator's ``J_3`` under the KS map with ``{p_i, q_j} = delta_ij``.
    """
    r = x.qnorm()
    return add(cross(x.q, x.p), scale(x.s / r, x.q))


def runge_lenz_flat(x: ReducedPoint3, params: SystemParams):
    r = x.qnorm()
    return add(cross(angular_momentum(x), x.p), scale(params.gamma / r, x.q))


def A_hidden_micz_flat(x: ReducedPoint3, params: SystemParams):
    rho2 = sq(cross(N3, x.q))
    return (
        dot(N3, runge_lenz_flat(x, params))
        + 0.5 * params.eps_el * rho2
        + 0.5 * params.delta_omega_sq * rho2 / x.qnorm()
    )


def micz_flat_observables(x: ReducedPoint3, params: SystemParams) -> dict:
    require_off_origin(x)
    return {
        "J_vec": angular_momentum(x),
        "RungeLenz_vec": runge_lenz_flat(x, params),
        "A_hidden": A_hidden_micz_flat(x, params),
    }
