"""Forward-mode dual numbers carrying a full gradient vector.

A :class:`Dual` holds a value and the vector of its partial derivatives with
respect to a fixed set of seed variables.  Values may be real or complex; the
seed variables themselves are always real, so ``conj`` commutes with
differentiation.

Duals nest: the value and gradient entries of a Dual may themselves be Duals
over an outer set of seeds.  This is how brackets of brackets are
differentiated exactly (the Jacobi residual, involution of quantities defined
through a coordinate Jacobian).  The elementary functions below accept plain
numbers as well, so observables can be written once and evaluated at any
nesting depth.
"""

from __future__ import annotations

import cmath
import math
from typing import Sequence

import numpy as np


def _gscale(grad, d):
    """``grad * d`` that stays elementwise when ``d`` is itself a Dual."""
    if isinstance(d, Dual):
        out = np.empty(len(grad), dtype=object)
        for i, g in enumerate(grad):
            out[i] = d * g
        return out
    return grad * d


class Dual:
    """Number ``val + grad . eps`` with ``eps_i eps_j = 0``."""

    __slots__ = ("val", "grad")
    __array_ufunc__ = None  # make numpy scalars defer to our reflected ops

    def __init__(self, val, grad):
        self.val = val
        self.grad = grad

    def __repr__(self) -> str:
        return f"Dual({self.val!r}, {self.grad!r})"

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.grad + other.grad)
        return Dual(self.val + other, self.grad)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val - other.val, self.grad - other.grad)
        return Dual(self.val - other, self.grad)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.grad)

    def __neg__(self):
        return Dual(-self.val, -self.grad)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(
                self.val * other.val,
                _gscale(self.grad, other.val) + _gscale(other.grad, self.val),
            )
        return Dual(self.val * other, _gscale(self.grad, other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            inv = 1.0 / other.val
            val = self.val * inv
            return Dual(val, _gscale(self.grad - _gscale(other.grad, val), inv))
        inv = 1.0 / other
        return Dual(self.val * inv, _gscale(self.grad, inv))

    def __rtruediv__(self, other):
        inv = 1.0 / self.val
        val = other * inv
        return Dual(val, _gscale(self.grad, -val * inv))

    def __pow__(self, n):
        if isinstance(n, Dual):
            return exp(n * log(self))
        if n == 2:
            return self * self
        if n == 1:
            return self
        return Dual(self.val**n, _gscale(self.grad, n * self.val ** (n - 1)))

    def __rpow__(self, base):
        return exp(self * (cmath.log(base) if isinstance(base, complex) else math.log(base)))

    # comparisons act on the value so that guards and branches work unchanged
    def __lt__(self, other):
        return self.val < value(other)

    def __le__(self, other):
        return self.val <= value(other)

    def __gt__(self, other):
        return self.val > value(other)

    def __ge__(self, other):
        return self.val >= value(other)

    def __abs__(self):
        if _is_complex(self.val):
            raise TypeError("abs() of a complex Dual is not differentiable in general")
        return -self if self.val < 0 else self

    def __float__(self):
        return float(self.val)

    def conjugate(self):
        return Dual(conj(self.val), _map(conj, self.grad))

    @property
    def real(self):
        return Dual(real(self.val), _map(real, self.grad))

    @property
    def imag(self):
        return Dual(imag(self.val), _map(imag, self.grad))


def _map(f, grad):
    if grad.dtype == object:
        out = np.empty(len(grad), dtype=object)
        for i, g in enumerate(grad):
            out[i] = f(g)
        return out
    if f is conj:
        return np.conj(grad)
    if f is real:
        return np.real(grad)
    return np.imag(grad)


def value(x):
    """Strip one level of derivative information, if any."""
    return x.val if isinstance(x, Dual) else x


def base_value(x):
    """Strip every nesting level, returning a plain number."""
    while isinstance(x, Dual):
        x = x.val
    return x


def derivative(x, n: int) -> np.ndarray:
    """Gradient of ``x`` as a length-``n`` array (zeros for plain numbers)."""
    if isinstance(x, Dual):
        return x.grad
    return np.zeros(n, dtype=complex if isinstance(x, complex) else float)


def seed(values: Sequence) -> list[Dual]:
    """One independent Dual variable per entry of ``values``.

    Entries may be plain numbers or Duals over an outer seed set; in the
    latter case the result is a nested Dual.
    """
    n = len(values)
    eye = np.eye(n)
    return [Dual(v if isinstance(v, Dual) else float(v), eye[i]) for i, v in enumerate(values)]


def _is_complex(v) -> bool:
    return isinstance(base_value(v), complex)


def conj(x):
    if isinstance(x, Dual):
        return x.conjugate()
    return x.conjugate() if isinstance(x, complex) else x


def real(x):
    if isinstance(x, Dual):
        return x.real
    return x.real if isinstance(x, complex) else x


def imag(x):
    if isinstance(x, Dual):
        return x.imag
    return x.imag if isinstance(x, complex) else 0.0


def sqrt(x):
    if isinstance(x, Dual):
        r = sqrt(x.val)
        return Dual(r, _gscale(x.grad, 0.5 / r))
    return cmath.sqrt(x) if isinstance(x, complex) else math.sqrt(x)


def exp(x):
    if isinstance(x, Dual):
        e = exp(x.val)
        return Dual(e, _gscale(x.grad, e))
    return cmath.exp(x) if isinstance(x, complex) else math.exp(x)


def log(x):
    if isinstance(x, Dual):
        return Dual(log(x.val), _gscale(x.grad, 1.0 / x.val))
    return cmath.log(x) if isinstance(x, complex) else math.log(x)


def sin(x):
    if isinstance(x, Dual):
        return Dual(sin(x.val), _gscale(x.grad, cos(x.val)))
    return math.sin(x)


def cos(x):
    if isinstance(x, Dual):
        return Dual(cos(x.val), _gscale(x.grad, -sin(x.val)))
    return math.cos(x)


def sinh(x):
    if isinstance(x, Dual):
        return Dual(sinh(x.val), _gscale(x.grad, cosh(x.val)))
    return math.sinh(x)


def cosh(x):
    if isinstance(x, Dual):
        return Dual(cosh(x.val), _gscale(x.grad, sinh(x.val)))
    return math.cosh(x)


def asinh(x):
    if isinstance(x, Dual):
        return Dual(asinh(x.val), _gscale(x.grad, 1.0 / sqrt(1.0 + x.val * x.val)))
    return math.asinh(x)


def atan2(y, x):
    """Real two-argument arctangent with derivatives in both arguments."""
    if not isinstance(y, Dual) and not isinstance(x, Dual):
        return math.atan2(y, x)
    yv, xv = value(y), value(x)
    r2 = xv * xv + yv * yv
    grad = 0.0
    if isinstance(y, Dual):
        grad = grad + _gscale(y.grad, xv / r2)
    if isinstance(x, Dual):
        grad = grad - _gscale(x.grad, yv / r2)
    return Dual(atan2(yv, xv), grad)
