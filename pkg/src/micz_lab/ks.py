"""Kustaanheimo-Stiefel reduction of the 4D oscillators to Kepler-like systems.

The U(1)-invariant map ``q = z sigma zbar``, ``p = (z sigma pi + pibar sigma zbar)
/ (2 z.zbar)`` carries the canonical brackets of ``(z, pi)`` to the monopole
bracket on ``(q, p)`` with charge ``s = J``.  The same map serves flat and
curved sources; only the Hamiltonians and the energy relation change.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import curved, flat
from .brackets import (
    CANONICAL_4D,
    SINGULAR_EPS,
    Curvature,
    DomainError,
    Observable,
    PhasePoint4C,
    ReducedPoint3,
    SingularityError,
    SystemParams,
    TWISTED,
    bracket_value,
)
from .vec import conj2, real_part, sigma_form
from . import dual


class Source(str, enum.Enum):
    FLAT = "flat"
    SPHERE = "sphere"
    PSEUDOSPHERE = "pseudosphere"

    @property
    def sign(self) -> int:
        return Curvature(self.value).sign


@dataclass(frozen=True)
class KSImage:
    reduced: ReducedPoint3
    s: float
    source_energy: float | None = None


def reduce_point(x: PhasePoint4C) -> ReducedPoint3:
    """Image ``(q, p, s)``; works on lifted (Dual) states as well."""
    z, pi = x.z, x.pi
    zb, pib = conj2(z), conj2(pi)
    zz = real_part(z[0] * zb[0] + z[1] * zb[1], "z.zbar")
    if not dual.base_value(zz) > SINGULAR_EPS:
        raise SingularityError("KS map needs z.zbar > 1e-12")
    q = sigma_form(z, zb)
    a = sigma_form(z, pi)
    b = sigma_form(pib, zb)
    qr = tuple(real_part(q[k], f"q{k + 1}") for k in range(3))
    pr = tuple(real_part((a[k] + b[k]) / (2 * zz), f"p{k + 1}") for k in range(3))
    return ReducedPoint3(qr, pr, flat.J_u1(x))


def source_hamiltonian(x: PhasePoint4C, params: SystemParams, source: Source | str):
    source = Source(source)
    if source is Source.FLAT:
        return flat.h_flat(x, params, "aniso")
    return curved.h_higgs_aniso(x, source_params(params, source), curved.CurvedSystemId.HIGGS_ANISO)


def source_params(params: SystemParams, source: Source | str) -> SystemParams:
    return params.with_(curvature=Curvature(Source(source).value))


def target_params(params: SystemParams, source: Source | str, energy: float) -> SystemParams:
    """Target couplings on the energy surface: ``gamma = E / 2``."""
    source = Source(source)
    if source is Source.FLAT:
        return params.with_(curvature=Curvature.FLAT, gamma=energy / 2)
    return params.with_(curvature=Curvature.PSEUDOSPHERE, gamma=energy / 2, source_sign=source.sign)


def target_hamiltonian(y: ReducedPoint3, tparams: SystemParams, source: Source | str):
    if Source(source) is Source.FLAT:
        return flat.h_micz_flat(y, tparams)
    return curved.h_micz_curved(y, tparams, curved.CurvedSystemId.MICZ_PSEUDO)


def target_energy(params: SystemParams, source: Source | str, energy: float) -> float:
    """``-w^2/2`` for flat sources, ``-w^2/2 - eps E / (2 r0)`` for curved ones."""
    source = Source(source)
    e = -params.omega**2 / 2
    if source is not Source.FLAT:
        e -= source.sign * energy / (2 * params.r0)
    return e


def ks_map(x: PhasePoint4C, params: SystemParams | None = None,
           source: Source | str = Source.FLAT) -> KSImage:
    x.check_finite()
    y = reduce_point(x)
    y = ReducedPoint3(tuple(float(c) for c in y.q), tuple(float(c) for c in y.p), float(y.s))
    energy = None if params is None else float(source_hamiltonian(x, params, source))
    return KSImage(y, y.s, energy)


def _image_coordinate(i: int) -> Observable:
    def fn(x, pr):
        return reduce_point(x).components()[i]

    return Observable(f"ks[{i}]", fn)


def image_brackets(x: PhasePoint4C) -> np.ndarray:
    """6x6 table of canonical brackets between the image coordinates ``(q, p)``."""
    obs = [_image_coordinate(i) for i in range(6)]
    out = np.zeros((6, 6))
    for a in range(6):
        for b in range(a + 1, 6):
            v = float(bracket_value(obs[a], obs[b], x, CANONICAL_4D))
            out[a, b], out[b, a] = v, -v
    return out


def ks_bracket_residual(x: PhasePoint4C, i: int | None = None, j: int | None = None) -> float:
    """Deviation of the pulled-back brackets from the monopole bracket at the image.

    For indices ``i, j`` in ``0..2`` the three brackets ``{q_i, q_j}``,
    ``{p_i, q_j}`` and ``{p_i, p_j}`` are compared; with no indices, all pairs.
    """
    img = ks_map(x).reduced
    got = image_brackets(x)
    want = TWISTED.matrix(img)
    if i is None and j is None:
        return float(np.max(np.abs(got - want)))
    if not (0 <= i < 3 and 0 <= j < 3):
        raise IndexError("indices must be in 0..2")
    cells = [(i, j), (3 + i, j), (3 + i, 3 + j)]
    return max(abs(got[a, b] - want[a, b]) for a, b in cells)


def _require_target_chart(y: ReducedPoint3, source: Source):
    if source is not Source.FLAT and not y.q2() < 1.0 - SINGULAR_EPS:
        raise DomainError("image lies outside the pseudosphere chart (q.q >= 1)")


def ks_level_check(x: PhasePoint4C, params: SystemParams, source: Source | str = Source.FLAT) -> float:
    """``|H_target(ks(x)) - E_target|`` with ``gamma = E/2`` and ``s = J(x)``."""
    source = Source(source)
    img = ks_map(x, params, source)
    _require_target_chart(img.reduced, source)
    E = img.source_energy
    tp = target_params(params, source, E)
    return abs(float(target_hamiltonian(img.reduced, tp, source)) - target_energy(params, source, E))


def source_A(x: PhasePoint4C, params: SystemParams, source: Source):
    if source is Source.FLAT:
        return flat.A_hidden_flat(x, params)
    return curved.A_hidden_higgs(x, source_params(params, source))


def target_A(y: ReducedPoint3, tparams: SystemParams, source: Source):
    if source is Source.FLAT:
        return flat.A_hidden_micz_flat(y, tparams)
    return curved.A_hidden_micz_curved(y, tparams, curved.CurvedSystemId.MICZ_PSEUDO)


@dataclass(frozen=True)
class ReductionFit:
    """``A_source = scale * A_target + mix * s * J3 + offset`` fitted over states."""

    scale: float
    mix: float
    offset: float
    max_residual: float

    def predict(self, a_target: float, s: float, j3: float) -> float:
        return self.scale * a_target + self.mix * s * j3 + self.offset


def _A_pair(x: PhasePoint4C, params: SystemParams, source: Source):
    img = ks_map(x, params, source)
    _require_target_chart(img.reduced, source)
    tp = target_params(params, source, img.source_energy)
    a_src = float(source_A(x, params, source))
    a_tgt = float(target_A(img.reduced, tp, source))
    return a_src, a_tgt, img.s, float(flat.J_vec(x)[2])


def fit_reduction(states: Sequence[PhasePoint4C], params: SystemParams,
                  source: Source | str = Source.FLAT) -> ReductionFit:
    """Least-squares fit of the hidden-symmetry correspondence.

    On curved space the reduced generator is a combination of the image of
    the source generator and ``s J3``; both are conserved, so the fitted
    coefficients must come out state independent.
    """
    source = Source(source)
    rows, rhs = [], []
    for x in states:
        a_src, a_tgt, s, j3 = _A_pair(x, params, source)
        rows.append([a_tgt, s * j3, 1.0])
        rhs.append(a_src)
    M, b = np.array(rows), np.array(rhs)
    coef, *_ = np.linalg.lstsq(M, b, rcond=None)
    return ReductionFit(float(coef[0]), float(coef[1]), float(coef[2]), float(np.max(np.abs(M @ coef - b))))


def expected_reduction(params: SystemParams, source: Source | str) -> tuple[float, float]:
    """Closed-form ``(scale, mix)`` of the correspondence."""
    source = Source(source)
    if source is Source.FLAT:
        return 1.0, 0.0
    return 2.0, -2.0 * source.sign / params.r0


def ks_observable_check(x: PhasePoint4C, params: SystemParams, source: Source | str = Source.FLAT,
                        fit: ReductionFit | None = None) -> tuple[float, float]:
    """``(|J3_source - J3_target|, |A_source - fitted image of A_target|)``.

    Without a fit the closed-form coefficients are used with zero offset.
    """
    source = Source(source)
    a_src, a_tgt, s, j3 = _A_pair(x, params, source)
    img = ks_map(x).reduced
    j3_res = abs(j3 - float(flat.angular_momentum(img)[2]))
    if fit is None:
        sc, mix = expected_reduction(params, source)
        fit = ReductionFit(sc, mix, 0.0, 0.0)
    return j3_res, abs(a_src - fit.predict(a_tgt, s, j3))
