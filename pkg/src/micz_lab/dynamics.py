"""Integration of Hamiltonian flows under the canonical or monopole bracket,
with conservation-drift accounting."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import RK45

from . import curved, flat
from .brackets import (
    Curvature,
    DomainError,
    Observable,
    PhasePoint4C,
    ReducedPoint3,
    SystemParams,
    evaluate,
    hamiltonian_vector_field,
    structure_for,
)


class SystemId(str, enum.Enum):
    OSC_ISO = "osc-iso"
    OSC_ANISO = "osc-aniso"
    HIGGS = "higgs"
    HIGGS_ANISO = "higgs-aniso"
    MICZ_FLAT = "micz-flat"
    MICZ_PSEUDO = "micz-pseudo"
    MICZ_SPHERE = "micz-sphere"


def _obs(name: str, fn: Callable) -> Observable:
    return Observable(name, fn)


def _component(name: str, vec_fn: Callable, k: int) -> Observable:
    return Observable(f"{name}{k + 1}", lambda x, pr: vec_fn(x, pr)[k])


def _osc_guard(x: PhasePoint4C, params: SystemParams) -> float:
    """Distance to the nearest singular locus of a 4D system (inf when none)."""
    if params.curvature is Curvature.FLAT:
        return math.inf
    return abs(1.0 - float(x.zz()))


def _reduced_guard(x: ReducedPoint3, params: SystemParams, pseudo: bool) -> float:
    d = float(x.qnorm())
    if pseudo:
        d = min(d, 1.0 - float(x.q2()))
    return d


@dataclass(frozen=True)
class SystemSpec:
    """Hamiltonian, state type, certified constants and boundary distance of one system."""

    id: SystemId
    state_type: type
    hamiltonian: Observable
    constants: Callable[[SystemParams], list]
    guard: Callable
    curvatures: tuple

    def check_params(self, params: SystemParams):
        if params.curvature not in self.curvatures:
            allowed = ", ".join(c.value for c in self.curvatures)
            raise DomainError(f"{self.id.value} needs curvature in {{{allowed}}}, got {params.curvature.value}")

    def make_state(self, v: Sequence[float], s: float = 0.0):
        if self.state_type is ReducedPoint3:
            return ReducedPoint3.from_real(v, s)
        return PhasePoint4C.from_real(v)


def _osc_iso_constants(pr):
    out = [_obs("J", lambda x, p: flat.J_u1(x))]
    out += [_component("J_vec", lambda x, p: flat.J_vec(x), k) for k in range(3)]
    out += [_component("A_vec", flat.A_vec, k) for k in range(3)]
    return out


def _osc_aniso_constants(pr):
    return [
        _obs("J", lambda x, p: flat.J_u1(x)),
        _obs("J3", lambda x, p: flat.J_vec(x)[2]),
        _obs("A_hidden", flat.A_hidden_flat),
    ]


def _higgs_constants(pr):
    out = [_obs("J", lambda x, p: flat.J_u1(x))]
    out += [_component("J_vec", lambda x, p: flat.J_vec(x), k) for k in range(3)]
    out += [_component("A_vec", curved.A_vec_higgs, k) for k in range(3)]
    return out


def _higgs_aniso_constants(pr):
    return [
        _obs("J", lambda x, p: flat.J_u1(x)),
        _obs("J3", lambda x, p: flat.J_vec(x)[2]),
        _obs("A_hidden", curved.A_hidden_higgs),
    ]


def _micz_flat_constants(pr):
    out = [_obs("J3", lambda x, p: flat.angular_momentum(x)[2]),
           _obs("A_hidden", flat.A_hidden_micz_flat)]
    if pr.delta_omega_sq == 0 and pr.eps_el == 0:
        out += [_component("J_vec", lambda x, p: flat.angular_momentum(x), k) for k in range(3)]
        out += [_component("RungeLenz", flat.runge_lenz_flat, k) for k in range(3)]
    return out


def _micz_curved_constants(which):
    def build(pr):
        out = [_obs("J3", lambda x, p: flat.angular_momentum(x)[2]),
               _obs("A_hidden", lambda x, p: curved.A_hidden_micz_curved(x, p, which))]
        if pr.delta_omega_sq == 0 and pr.eps_el == 0:
            out += [_component("J_vec", lambda x, p: flat.angular_momentum(x), k) for k in range(3)]
            out += [_component("RungeLenz", lambda x, p: curved.runge_lenz_curved(x, p, which), k)
                    for k in range(3)]
        return out

    return build


_CURVED = (Curvature.SPHERE, Curvature.PSEUDOSPHERE)

SYSTEMS: dict[SystemId, SystemSpec] = {
    SystemId.OSC_ISO: SystemSpec(
        SystemId.OSC_ISO, PhasePoint4C, _obs("H", lambda x, p: flat.h_flat(x, p, "iso")),
        _osc_iso_constants, _osc_guard, (Curvature.FLAT,)),
    SystemId.OSC_ANISO: SystemSpec(
        SystemId.OSC_ANISO, PhasePoint4C, _obs("H", lambda x, p: flat.h_flat(x, p, "aniso")),
        _osc_aniso_constants, _osc_guard, (Curvature.FLAT,)),
    SystemId.HIGGS: SystemSpec(
        SystemId.HIGGS, PhasePoint4C,
        _obs("H", lambda x, p: curved.h_higgs_aniso(x, p, curved.CurvedSystemId.HIGGS)),
        _higgs_constants, _osc_guard, _CURVED),
    SystemId.HIGGS_ANISO: SystemSpec(
        SystemId.HIGGS_ANISO, PhasePoint4C,
        _obs("H", lambda x, p: curved.h_higgs_aniso(x, p, curved.CurvedSystemId.HIGGS_ANISO)),
        _higgs_aniso_constants, _osc_guard, _CURVED),
    SystemId.MICZ_FLAT: SystemSpec(
        SystemId.MICZ_FLAT, ReducedPoint3, _obs("H", flat.h_micz_flat),
        _micz_flat_constants, lambda x, p: _reduced_guard(x, p, False), (Curvature.FLAT,)),
    SystemId.MICZ_PSEUDO: SystemSpec(
        SystemId.MICZ_PSEUDO, ReducedPoint3,
        _obs("H", lambda x, p: curved.h_micz_curved(x, p, curved.CurvedSystemId.MICZ_PSEUDO)),
        _micz_curved_constants(curved.CurvedSystemId.MICZ_PSEUDO),
        lambda x, p: _reduced_guard(x, p, True), (Curvature.PSEUDOSPHERE,)),
    SystemId.MICZ_SPHERE: SystemSpec(
        SystemId.MICZ_SPHERE, ReducedPoint3,
        _obs("H", lambda x, p: curved.h_micz_curved(x, p, curved.CurvedSystemId.MICZ_SPHERE)),
        _micz_curved_constants(curved.CurvedSystemId.MICZ_SPHERE),
        lambda x, p: _reduced_guard(x, p, False), (Curvature.SPHERE,)),
}


def system(sid: SystemId | str) -> SystemSpec:
    try:
        return SYSTEMS[SystemId(sid)]
    except ValueError:
        raise ValueError(f"unknown system {sid!r}; expected one of {[s.value for s in SystemId]}") from None


class Method(str, enum.Enum):
    RK4 = "rk4-fixed"
    RK45 = "rk45-adaptive"


@dataclass(frozen=True)
class IntegratorConfig:
    """Integrator settings; a negative ``t_end`` integrates backward in time."""

    method: Method = Method.RK45
    t_end: float = 1.0
    step: float = 1e-2
    rtol: float = 1e-10
    atol: float = 1e-12
    max_steps: int = 1_000_000
    guard_margin: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not self.guard_margin > 0:
            raise ValueError("guard_margin must be positive")
        if self.method is Method.RK4 and not self.step > 0:
            raise ValueError("step must be positive")
        if self.method is Method.RK45 and not (self.rtol > 0 and self.atol > 0):
            raise ValueError("rtol and atol must be positive")
        if not self.max_steps > 0:
            raise ValueError("max_steps must be positive")


class Event(str, enum.Enum):
    COMPLETED = "completed"
    BOUNDARY = "boundary"
    TRUNCATED = "truncated"


@dataclass
class Trajectory:
    """Time-stamped real-view states with observable tables.

    ``times`` is strictly monotone in the direction of integration.
    """

    system: SystemId
    times: np.ndarray
    states: np.ndarray
    s: float
    observables: dict = field(default_factory=dict)
    event: Event = Event.COMPLETED
    message: str = ""

    @property
    def drift(self) -> dict:
        return drift_report(self)

    def state(self, i: int):
        return system(self.system).make_state(self.states[i], self.s)


def _field(spec: SystemSpec, H: Observable, params: SystemParams, s: float, direction: float):
    def f(t, y):
        x = spec.make_state(y, s)
        return direction * hamiltonian_vector_field(H, x, structure_for(x), params)

    return f


def _rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + h / 2, y + h / 2 * k1)
    k3 = f(t + h / 2, y + h / 2 * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate(sid: SystemId | str, x0, params: SystemParams, cfg: IntegratorConfig,
              watch: Sequence[Observable] = ()) -> Trajectory:
    """Solve ``dx/dt = {H, x}`` for one system from ``x0``.

    Boundary approach within ``cfg.guard_margin`` (or a domain error inside
    the field) ends the run with a boundary event; the partial trajectory is
    kept.  Exceeding ``max_steps`` ends it with a truncation event.
    """
    spec = system(sid)
    spec.check_params(params)
    if not isinstance(x0, spec.state_type):
        raise TypeError(f"{spec.id.value} expects a {spec.state_type.__name__}")
    s = float(getattr(x0, "s", 0.0))
    if spec.guard(x0, params) <= cfg.guard_margin:
        raise DomainError("initial state is within guard_margin of a boundary")
    for w in watch:
        evaluate(w, x0, params)

    direction = 1.0 if cfg.t_end >= 0 else -1.0
    span = abs(cfg.t_end)
    f = _field(spec, spec.hamiltonian, params, s, direction)
    y = np.asarray(x0.real_view(), dtype=float)
    taus, ys = [0.0], [y]
    event, message = Event.COMPLETED, ""

    def admissible(v):
        try:
            return spec.guard(spec.make_state(v, s), params) > cfg.guard_margin
        except DomainError:
            return False

    try:
        if cfg.method is Method.RK4:
            n = max(1, int(math.ceil(span / cfg.step - 1e-9)))
            h = span / n
            if n > cfg.max_steps:
                n, event, message = cfg.max_steps, Event.TRUNCATED, "max_steps exceeded"
            for i in range(n):
                y_new = _rk4_step(f, taus[-1], ys[-1], h)
                if not (np.all(np.isfinite(y_new)) and admissible(y_new)):
                    event, message = Event.BOUNDARY, f"boundary approached at t={direction * taus[-1]:.6g}"
                    break
                taus.append((i + 1) * h)
                ys.append(y_new)
        else:
            solver = RK45(f, 0.0, y, span, rtol=cfg.rtol, atol=cfg.atol)
            steps = 0
            while solver.status == "running":
                if steps >= cfg.max_steps:
                    event, message = Event.TRUNCATED, "max_steps exceeded"
                    break
                msg = solver.step()
                steps += 1
                if solver.status == "failed":
                    event, message = Event.BOUNDARY, f"step failure: {msg}"
                    break
                if not (np.all(np.isfinite(solver.y)) and admissible(solver.y)):
                    event, message = Event.BOUNDARY, f"boundary approached at t={direction * solver.t:.6g}"
                    break
                taus.append(solver.t)
                ys.append(solver.y.copy())
    except DomainError as exc:
        event, message = Event.BOUNDARY, str(exc)

    times = direction * np.array(taus)
    states = np.array(ys)
    table = {}
    for w in watch:
        table[w.name] = np.array([evaluate(w, spec.make_state(v, s), params) for v in states])
    return Trajectory(spec.id, times, states, s, table, event, message)


@dataclass(frozen=True)
class DriftStats:
    max_abs: float
    mean_abs: float
    max_rel: float
    mean_rel: float


def drift_report(tr: Trajectory) -> dict:
    """Per-observable drift ``|O(t) - O(0)|``; relative values divide by ``max(|O(0)|, 1)``."""
    if len(tr.times) == 0:
        raise ValueError("empty trajectory")
    out = {}
    for name, vals in tr.observables.items():
        d = np.abs(vals - vals[0])
        scale = max(abs(vals[0]), 1.0)
        out[name] = DriftStats(float(d.max()), float(d.mean()), float(d.max() / scale), float(d.mean() / scale))
    return out
