"""Phase-space types, Poisson structures and the bracket engine.

Sign convention follows ``{p, q} = 1``: for canonical pairs the bracket is
``{f, g} = df/dp dg/dq - df/dq dg/dp``.  Hamilton's equations then read
``dx/dt = {H, x}``.

Two state types are used throughout the package:

* :class:`PhasePoint4C` - complex coordinates ``z^a`` and momenta ``pi_a``
  (``a = 1, 2``) of the four-dimensional oscillators.  Its real view is
  ``(Re z1, Im z1, Re z2, Im z2, Re pi1, Im pi1, Re pi2, Im pi2)``.
* :class:`ReducedPoint3` - position ``q``, momentum ``p`` and monopole
  charge ``s`` of the Kepler-like systems.  Its real view is ``(q, p)``; the
  charge is a label of the symplectic leaf, not a phase variable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import dual
from .dual import Dual

SINGULAR_EPS = 1e-12


class DomainError(ValueError):
    """A state or parameter violates the domain of an operation."""


class SingularityError(DomainError):
    """Evaluation too close to a singular point (origin, chart boundary)."""


class ContractError(ValueError):
    """A precondition linking several arguments does not hold."""


class Curvature(str, enum.Enum):
    FLAT = "flat"
    SPHERE = "sphere"
    PSEUDOSPHERE = "pseudosphere"

    @property
    def sign(self) -> int:
        return {"flat": 0, "sphere": 1, "pseudosphere": -1}[self.value]


@dataclass(frozen=True)
class SystemParams:
    """Couplings shared by all systems.

    ``R0`` is the curvature radius; ``r0 = R0**2`` is the length scale of the
    reduced three-dimensional systems.  ``source_sign`` is the curvature sign
    of the four-dimensional system a reduced Hamiltonian was obtained from; it
    only enters the anisotropy term of the pseudospherical Kepler-like system.
    """

    omega: float = 1.0
    delta_omega_sq: float = 0.0
    eps_el: float = 0.0
    R0: float = 1.0
    curvature: Curvature = Curvature.FLAT
    gamma: float = 0.0
    s: float = 0.0
    source_sign: int = -1

    def __post_init__(self):
        object.__setattr__(self, "curvature", Curvature(self.curvature))
        if self.omega < 0:
            raise DomainError("omega must be non-negative")
        if not self.R0 > 0:
            raise DomainError("R0 must be positive")
        if self.source_sign not in (-1, 1):
            raise DomainError("source_sign must be +1 or -1")

    @property
    def r0(self) -> float:
        return self.R0 * self.R0

    @property
    def eps(self) -> int:
        return self.curvature.sign

    def curved(self) -> "SystemParams":
        """Return self, refusing flat curvature (R0 is meaningless there)."""
        if self.curvature is Curvature.FLAT:
            raise DomainError("operation needs curvature sphere or pseudosphere")
        return self

    def with_(self, **kw) -> "SystemParams":
        return replace(self, **kw)


@dataclass(frozen=True)
class PhasePoint4C:
    z: tuple
    pi: tuple

    DIM = 8

    def real_view(self) -> np.ndarray:
        (z1, z2), (p1, p2) = self.z, self.pi
        return np.array(
            [z1.real, z1.imag, z2.real, z2.imag, p1.real, p1.imag, p2.real, p2.imag],
            dtype=float,
        )

    @classmethod
    def from_real(cls, v) -> "PhasePoint4C":
        v = list(v)
        if len(v) != 8:
            raise ValueError("PhasePoint4C real view has 8 components")
        return cls((v[0] + 1j * v[1], v[2] + 1j * v[3]), (v[4] + 1j * v[5], v[6] + 1j * v[7]))

    @classmethod
    def from_duals(cls, d) -> "PhasePoint4C":
        return cls((d[0] + 1j * d[1], d[2] + 1j * d[3]), (d[4] + 1j * d[5], d[6] + 1j * d[7]))

    def components(self) -> list:
        (z1, z2), (p1, p2) = self.z, self.pi
        return [dual.real(z1), dual.imag(z1), dual.real(z2), dual.imag(z2),
                dual.real(p1), dual.imag(p1), dual.real(p2), dual.imag(p2)]

    def rebuild(self, comps) -> "PhasePoint4C":
        return PhasePoint4C.from_duals(comps)

    def zz(self):
        """Squared norm ``z . zbar``."""
        z1, z2 = self.z
        return dual.real(z1 * dual.conj(z1) + z2 * dual.conj(z2))

    def check_finite(self):
        if not np.all(np.isfinite(self.real_view())):
            raise DomainError("state has non-finite components")


@dataclass(frozen=True)
class ReducedPoint3:
    q: tuple
    p: tuple
    s: float = 0.0

    DIM = 6

    def real_view(self) -> np.ndarray:
        return np.array([*map(float, self.q), *map(float, self.p)], dtype=float)

    @classmethod
    def from_real(cls, v, s: float = 0.0) -> "ReducedPoint3":
        v = [float(c) for c in v]
        if len(v) != 6:
            raise ValueError("ReducedPoint3 real view has 6 components")
        return cls(tuple(v[:3]), tuple(v[3:]), s)

    @classmethod
    def from_duals(cls, d, s: float = 0.0) -> "ReducedPoint3":
        return cls(tuple(d[:3]), tuple(d[3:]), s)

    def components(self) -> list:
        return list(self.q) + list(self.p)

    def rebuild(self, comps) -> "ReducedPoint3":
        return ReducedPoint3(tuple(comps[:3]), tuple(comps[3:]), self.s)

    def qnorm(self):
        q1, q2, q3 = self.q
        return dual.sqrt(q1 * q1 + q2 * q2 + q3 * q3)

    def q2(self):
        q1, q2, q3 = self.q
        return q1 * q1 + q2 * q2 + q3 * q3


def require_off_origin(x: ReducedPoint3):
    r = dual.value(x.q2())
    if not r > SINGULAR_EPS**2:
        raise SingularityError("|q| must exceed 1e-12 (monopole/Coulomb singularity at origin)")


@dataclass(frozen=True)
class Observable:
    """Named scalar function of a phase point and the system parameters."""

    name: str
    fn: Callable = field(repr=False)

    def __call__(self, x, params: SystemParams | None = None):
        return self.fn(x, params)

    def __mul__(self, other: "Observable") -> "Observable":
        return Observable(f"({self.name})*({other.name})", lambda x, pr: self(x, pr) * other(x, pr))

    def __add__(self, other: "Observable") -> "Observable":
        return Observable(f"({self.name})+({other.name})", lambda x, pr: self(x, pr) + other(x, pr))


def constant(c: float) -> Observable:
    return Observable(f"const({c})", lambda x, pr: c)


def coordinate(i: int, label: str | None = None) -> Observable:
    """The ``i``-th component of the real view."""

    def fn(x, pr):
        return x.components()[i]

    return Observable(label or f"x{i}", fn)


REDUCED_LABELS = ("q1", "q2", "q3", "p1", "p2", "p3")
COMPLEX_LABELS = ("Re z1", "Im z1", "Re z2", "Im z2", "Re pi1", "Im pi1", "Re pi2", "Im pi2")


def q_coord(i: int) -> Observable:
    return coordinate(i, REDUCED_LABELS[i])


def p_coord(i: int) -> Observable:
    return coordinate(3 + i, REDUCED_LABELS[3 + i])


def _check_point(x):
    if not np.all(np.isfinite(x.real_view())):
        raise DomainError("state has non-finite components")


def _lift(x):
    """Seed every real component of ``x``; nests if they are already Duals."""
    return x.rebuild(dual.seed(x.components()))


def _as_real_scalar(val, name: str = "observable"):
    if isinstance(val, complex) or np.iscomplexobj(val):
        if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
            raise ValueError(f"{name} has imaginary part {val.imag:.3e}")
        return float(val.real)
    return float(val)


def evaluate(f: Observable, x, params: SystemParams | None = None) -> float:
    return _as_real_scalar(f(x, params), f.name)


def _grad_any(f: Observable, x, params):
    """Gradient whose entries are floats, or Duals when ``x`` is itself lifted."""
    g = dual.derivative(f(_lift(x), params), x.DIM)
    if g.dtype == object:
        return np.array([dual.real(c) for c in g], dtype=object)
    if np.iscomplexobj(g):
        scale = max(1.0, float(np.max(np.abs(g.real), initial=0.0)))
        if np.max(np.abs(g.imag), initial=0.0) > 1e-12 * scale:
            raise ValueError(f"{f.name}: gradient has a non-negligible imaginary part")
        g = g.real
    return np.asarray(g, dtype=float)


def grad(f: Observable, x, params: SystemParams | None = None) -> np.ndarray:
    """Exact gradient of ``f`` with respect to the real view of ``x``."""
    _check_point(x)
    return _grad_any(f, x, params)


def value_and_grad(f: Observable, x, params: SystemParams | None = None):
    _check_point(x)
    out = f(_lift(x), params)
    return _as_real_scalar(dual.value(out), f.name), _grad_any(f, x, params)


class StructureKind(str, enum.Enum):
    CANONICAL_COMPLEX = "canonical-complex"
    CANONICAL_REAL = "canonical-real"
    TWISTED = "monopole-twisted"


# Constant bracket matrix on the real view of PhasePoint4C.  With
# z = a + i b and pi = c + i d the relations {pi, z} = 1, {pibar, zbar} = 1
# (all others zero) give {c, a} = 1/2 and {d, b} = -1/2 for each pair.
_P4 = np.zeros((8, 8))
for _k in (0, 2):
    _a, _b, _c, _d = _k, _k + 1, _k + 4, _k + 5
    _P4[_c, _a], _P4[_a, _c] = 0.5, -0.5
    _P4[_d, _b], _P4[_b, _d] = -0.5, 0.5

_LEVI = np.zeros((3, 3, 3))
for (_i, _j, _k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _LEVI[_i, _j, _k], _LEVI[_j, _i, _k] = 1.0, -1.0


def _darboux(n: int) -> np.ndarray:
    m = np.zeros((2 * n, 2 * n))
    m[n:, :n] = np.eye(n)
    m[:n, n:] = -np.eye(n)
    return m


def twisted_matrix(q, s: float) -> list:
    """Bracket matrix on ``(q, p)`` for monopole charge ``s``.

    Entries are built with the arithmetic of ``q`` so that Dual components
    yield derivatives of the structure itself.
    """
    q1, q2, q3 = q
    r2 = q1 * q1 + q2 * q2 + q3 * q3
    r3 = r2 * dual.sqrt(r2)
    m = [[0.0] * 6 for _ in range(6)]
    for i in range(3):
        m[3 + i][i] = 1.0
        m[i][3 + i] = -1.0
    qs = (q1, q2, q3)
    for i in range(3):
        for j in range(3):
            if i != j:
                k = 3 - i - j
                m[3 + i][3 + j] = s * _LEVI[i, j, k] * qs[k] / r3
    return m


@dataclass(frozen=True)
class PoissonStructure:
    kind: StructureKind
    dim: int = 8

    @classmethod
    def canonical_complex(cls) -> "PoissonStructure":
        return cls(StructureKind.CANONICAL_COMPLEX, 8)

    @classmethod
    def canonical_real(cls, n: int) -> "PoissonStructure":
        """Darboux structure on ``(coords, momenta)`` with ``n`` pairs."""
        return cls(StructureKind.CANONICAL_REAL, 2 * n)

    @classmethod
    def twisted(cls) -> "PoissonStructure":
        return cls(StructureKind.TWISTED, 6)

    def matrix(self, x):
        """Structure tensor at ``x``; Dual-valued entries if ``x`` is lifted."""
        if self.kind is StructureKind.CANONICAL_COMPLEX:
            return _P4
        if self.kind is StructureKind.CANONICAL_REAL:
            return _darboux(self.dim // 2)
        require_off_origin(x)
        m = twisted_matrix(x.q, x.s)
        if any(isinstance(c, Dual) for c in x.q):
            return m
        return np.array(m, dtype=float)

    def check_admissible(self, x):
        if x.DIM != self.dim:
            raise DomainError(f"{self.kind.value} structure acts on {self.dim}-dim states, got {x.DIM}")
        if self.kind is StructureKind.TWISTED:
            require_off_origin(x)


CANONICAL_4D = PoissonStructure.canonical_complex()
TWISTED = PoissonStructure.twisted()


def structure_for(x) -> PoissonStructure:
    if isinstance(x, ReducedPoint3):
        return TWISTED
    if isinstance(x, PhasePoint4C):
        return CANONICAL_4D
    return PoissonStructure.canonical_real(x.DIM // 2)


def _contract(ga, m, gb):
    if ga.dtype != object and gb.dtype != object and not isinstance(m, list):
        return float(ga @ m @ gb)
    total = 0.0
    n = len(ga)
    for i in range(n):
        if not isinstance(ga[i], Dual) and ga[i] == 0:
            continue
        for j in range(n):
            mij = m[i][j]
            if not isinstance(mij, Dual) and mij == 0:
                continue
            total = total + ga[i] * mij * gb[j]
    return total


def bracket_value(f: Observable, g: Observable, x, P: PoissonStructure, params=None):
    """``{f, g}`` at ``x``; a Dual when ``x`` carries outer derivatives."""
    P.check_admissible(x)
    return _contract(_grad_any(f, x, params), P.matrix(x), _grad_any(g, x, params))


def bracket_observable(f: Observable, g: Observable, P: PoissonStructure | None = None) -> Observable:
    """``{f, g}`` as an observable that can itself be differentiated."""

    def fn(y, pr):
        return bracket_value(f, g, y, P or structure_for(y), pr)

    return Observable(f"{{{f.name},{g.name}}}", fn)


def poisson_bracket(f: Observable, g: Observable, x, P: PoissonStructure | None = None,
                    params: SystemParams | None = None) -> float:
    _check_point(x)
    return float(bracket_value(f, g, x, P or structure_for(x), params))


def hamiltonian_vector_field(H: Observable, x, P: PoissonStructure | None = None,
                             params: SystemParams | None = None) -> np.ndarray:
    """Time derivative of the real view, ``dx_i/dt = {H, x_i}``."""
    P = P or structure_for(x)
    P.check_admissible(x)
    return grad(H, x, params) @ P.matrix(x)


def check_jacobi(P: PoissonStructure, x, f: Observable, g: Observable, h: Observable,
                 params: SystemParams | None = None) -> float:
    """Jacobi residual ``|{f,{g,h}} + {g,{h,f}} + {h,{f,g}}|``.

    Inner brackets are differentiated exactly through nested Duals, so any
    observables may be passed, not only coordinate functions.
    """
    total = (
        poisson_bracket(f, bracket_observable(g, h, P), x, P, params)
        + poisson_bracket(g, bracket_observable(h, f, P), x, P, params)
        + poisson_bracket(h, bracket_observable(f, g, P), x, P, params)
    )
    return abs(total)


def finite_difference_grad(f: Observable, x, params: SystemParams | None = None,
                           h: float = 1e-5) -> np.ndarray:
    """Central differences; kept only as an independent test oracle."""
    v = np.asarray(x.components(), dtype=float)
    out = np.zeros_like(v)
    for i in range(v.size):
        e = np.zeros_like(v)
        e[i] = h
        out[i] = (evaluate(f, x.rebuild(list(v + e)), params)
                  - evaluate(f, x.rebuild(list(v - e)), params)) / (2 * h)
    return out
