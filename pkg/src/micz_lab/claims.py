"""Registry of verified claims: one anchor and one acceptance band per claim.

Anchors are descriptive formula identifiers.  ``adjusted`` lists the keys of
coefficient or sign adjustments that the claim depends on.  Summaries carry
these keys so that a reader can trace which corrected formulas a verdict used.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Claim:
    id: str
    system: str
    anchor: str
    lo: float | None = None
    hi: float | None = None
    adjusted: tuple = ()

    def accepts(self, value: float) -> bool:
        if value != value:  # NaN never passes
            return False
        if self.lo is not None and value < self.lo:
            return False
        if self.hi is not None and value > self.hi:
            return False
        return True

    def band(self) -> str:
        if self.lo is not None and self.hi is not None:
            return f"[{self.lo:g}, {self.hi:g}]"
        if self.hi is not None:
            return f"<= {self.hi:g}"
        return f">= {self.lo:g}"


def _inv(system: str, family: str, anchor: str, adjusted: tuple = ()) -> Claim:
    return Claim(f"involution:{system}:{family}", system, anchor, None, 1e-9, adjusted)


_CLAIMS = [
    _inv("osc-iso", "J", "flat-oscillator.u1-generator"),
    _inv("osc-iso", "J_vec", "flat-oscillator.rotation-generators"),
    _inv("osc-iso", "A_vec", "flat-oscillator.hidden-vector"),
    _inv("osc-aniso", "J", "flat-aniso-oscillator.u1-generator"),
    _inv("osc-aniso", "J3", "flat-aniso-oscillator.axial-rotation"),
    _inv("osc-aniso", "A_hidden", "flat-aniso-oscillator.hidden-generator"),
    _inv("higgs", "J", "higgs.u1-generator"),
    _inv("higgs", "J_vec", "higgs.rotation-generators"),
    _inv("higgs", "A_vec", "higgs.hidden-vector", ("curved-A-vec-bilinear-order",)),
    _inv("higgs-aniso", "J", "aniso-higgs.u1-generator"),
    _inv("higgs-aniso", "J3", "aniso-higgs.axial-rotation"),
    _inv("higgs-aniso", "A_hidden", "aniso-higgs.hidden-generator", ("curved-A-vec-bilinear-order",)),
    _inv("micz-flat", "J3", "flat-micz.axial-angular-momentum", ("reduced-angular-momentum-orientation",)),
    _inv("micz-flat", "A_hidden", "flat-micz.hidden-generator",
         ("reduced-angular-momentum-orientation", "flat-reduced-A-anisotropy-coefficient")),
    _inv("micz-flat", "J_vec", "flat-micz.angular-momentum", ("reduced-angular-momentum-orientation",)),
    _inv("micz-flat", "RungeLenz", "flat-micz.runge-lenz", ("flat-runge-lenz-orientation",)),
    _inv("micz-pseudo", "J3", "pseudo-micz.axial-angular-momentum", ("reduced-angular-momentum-orientation",)),
    _inv("micz-pseudo", "A_hidden", "pseudo-micz.hidden-generator", ("curved-runge-lenz-orientation",)),
    _inv("micz-pseudo", "J_vec", "pseudo-micz.angular-momentum", ("reduced-angular-momentum-orientation",)),
    _inv("micz-pseudo", "RungeLenz", "pseudo-micz.runge-lenz", ("curved-runge-lenz-orientation",)),
    _inv("micz-sphere", "J3", "sphere-micz.axial-angular-momentum", ("reduced-angular-momentum-orientation",)),
    _inv("micz-sphere", "A_hidden", "sphere-micz.hidden-generator",
         ("sphere-kinetic-term", "sphere-anisotropy-denominator", "sphere-A-coefficients")),
    _inv("micz-sphere", "J_vec", "sphere-micz.angular-momentum", ("sphere-kinetic-term",)),
    _inv("micz-sphere", "RungeLenz", "sphere-micz.runge-lenz", ("sphere-kinetic-term", "curved-runge-lenz-orientation")),
    Claim("ks:bracket-image", "ks", "ks.monopole-bracket", None, 1e-9),
    Claim("ks:level:flat", "ks", "ks.energy-surface.flat", None, 1e-9),
    Claim("ks:level:sphere", "ks", "ks.energy-surface.curved", None, 1e-9, ("curved-energy-relation-sign",)),
    Claim("ks:level:pseudosphere", "ks", "ks.energy-surface.curved", None, 1e-9, ("curved-energy-relation-sign",)),
    Claim("ks:level-trajectory", "ks", "ks.energy-surface.trajectory", None, 1e-6, ("curved-energy-relation-sign",)),
    Claim("ks:J3-image", "ks", "ks.axial-angular-momentum", None, 1e-10, ("reduced-angular-momentum-orientation",)),
    Claim("ks:A-image", "ks", "ks.hidden-generator", None, 1e-8, ("curved-A-reduction-combination",)),
    Claim("separation:round-trip", "micz-pseudo", "parabolic.chart", None, 1e-10, ("parabolic-chart-form",)),
    Claim("separation:chart-equivalence", "micz-pseudo", "parabolic.hamiltonian", None, 1e-9,
          ("parabolic-chart-form", "parabolic-anisotropy-coefficient")),
    Claim("separation:beta-consistency", "micz-pseudo", "parabolic.separated-equations", None, 1e-8,
          ("separated-equations-rederived",)),
    Claim("separation:chi-zeta", "micz-pseudo", "parabolic.hyperbolic-form", None, 1e-8,
          ("separated-equations-rederived",)),
    Claim("separation:involution", "micz-pseudo", "parabolic.involution", None, 1e-9,
          ("separated-equations-rederived",)),
    Claim("separation:beta-drift", "micz-pseudo", "parabolic.beta-conservation", None, 1e-6),
    Claim("curved:reflection-sign-flip", "micz-pseudo", "pseudo-micz.source-reflection", None, 1e-9),
    Claim("curved:reflection-shift", "micz-pseudo", "pseudo-micz.source-linear-shift", None, 1e-9,
          ("source-reflection-relation",)),
    Claim("curved:ambient-constraint", "higgs", "ambient.hyperboloid", None, 1e-10),
    Claim("curved:ambient-anisotropy", "higgs-aniso", "ambient.anisotropy-potential", None, 1e-9,
          ("ambient-inharmonic-coefficient",)),
    Claim("flat-limit:shrink-factor", "higgs-aniso", "flat-limit.second-order", 80.0, 120.0, ("flat-limit-scaling",)),
    Claim("flat-limit:constant", "higgs-aniso", "flat-limit.state-independent", None, 1e-6, ("flat-limit-scaling",)),
    Claim("laplace:kepler-harmonic", "micz-pseudo", "laplace.kepler-potential", None, 1e-6),
    Claim("laplace:linear-nonharmonic", "micz-pseudo", "laplace.linear-potential", 1e-2, None),
    Claim("dynamics:rk4-order", "osc-iso", "integrator.rk4-order", 3.8, None),
    Claim("dynamics:period-closure", "osc-iso", "integrator.period", None, 1e-6),
    Claim("dynamics:time-reversal", "osc-iso", "integrator.reversal", None, 1e-6),
    Claim("dynamics:drift", "*", "integrator.conservation", None, 1e-6, ("vector-field-orientation",)),
]

REGISTRY: dict[str, Claim] = {c.id: c for c in _CLAIMS}


def claim(claim_id: str) -> Claim:
    try:
        return REGISTRY[claim_id]
    except KeyError:
        raise KeyError(f"claim {claim_id!r} is not registered") from None


def involution_family(name: str) -> str:
    """``J_vec2`` -> ``J_vec``; scalar names are returned unchanged."""
    return name.rstrip("0123456789") if name[-1:].isdigit() and name.rstrip("0123456789") in {
        "J_vec", "A_vec", "RungeLenz"} else name
