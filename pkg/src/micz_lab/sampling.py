"""Seeded random sampling of admissible states, kept away from guarded loci."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .brackets import Curvature, PhasePoint4C, ReducedPoint3


@dataclass(frozen=True)
class Bounds4C:
    z_box: float = 0.6
    pi_box: float = 1.0
    zz_min: float = 0.0
    zz_max: float = float("inf")
    sphere_gap: float = 0.2  # minimum |1 - z.zbar| on the sphere

    def as_dict(self) -> dict:
        return {k: (v if np.isfinite(v) else None) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class Bounds3:
    q_box: float = 1.0
    p_box: float = 1.0
    q_min: float = 0.1
    q2_max: float = float("inf")
    perp2_min: float = 0.0
    s_box: float = 1.0

    def as_dict(self) -> dict:
        return {k: (v if np.isfinite(v) else None) for k, v in asdict(self).items()}


def bounds_4c(curvature: Curvature, for_ks: bool = False) -> Bounds4C:
    zz_min = 0.1 if for_ks else 0.0
    if curvature is Curvature.PSEUDOSPHERE or for_ks and curvature is not Curvature.FLAT:
        return Bounds4C(zz_min=zz_min, zz_max=0.8)
    return Bounds4C(zz_min=zz_min)


def bounds_3(pseudo: bool, off_axis: bool = False) -> Bounds3:
    if pseudo:
        return Bounds3(q_box=0.9, q2_max=0.8, perp2_min=1e-2 if off_axis else 0.0)
    return Bounds3(q_box=1.5, perp2_min=1e-2 if off_axis else 0.0)


def sample_4c(rng: np.random.Generator, n: int, b: Bounds4C, curvature: Curvature) -> list[PhasePoint4C]:
    out = []
    while len(out) < n:
        v = rng.uniform(-1, 1, 8) * np.r_[[b.z_box] * 4, [b.pi_box] * 4]
        x = PhasePoint4C.from_real(v)
        zz = float(x.zz())
        if not b.zz_min <= zz <= b.zz_max:
            continue
        if curvature is Curvature.SPHERE and abs(1 - zz) < b.sphere_gap:
            continue
        out.append(x)
    return out


def sample_3(rng: np.random.Generator, n: int, b: Bounds3, s: float | None = None) -> list[ReducedPoint3]:
    """Reduced states; ``s=None`` draws the charge uniformly in ``[-s_box, s_box]``."""
    out = []
    while len(out) < n:
        q = rng.uniform(-b.q_box, b.q_box, 3)
        q2 = float(q @ q)
        if q2 < b.q_min**2 or q2 > b.q2_max or q[0] ** 2 + q[1] ** 2 < b.perp2_min:
            continue
        p = rng.uniform(-b.p_box, b.p_box, 3)
        charge = float(rng.uniform(-b.s_box, b.s_box)) if s is None else float(s)
        out.append(ReducedPoint3.from_real(np.r_[q, p], charge))
    return out
