"""Small vector and Pauli-bilinear helpers that work on Dual components."""

from __future__ import annotations

from . import dual

N3 = (0.0, 0.0, 1.0)


def dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def scale(c, a):
    return tuple(c * x for x in a)


def sq(a):
    return dot(a, a)


def sigma_form(u, v):
    """``(u sigma v)_k = sum_ab u^a (sigma_k)_ab v^b`` with standard Pauli matrices.

    sigma_1 = [[0, 1], [1, 0]], sigma_2 = [[0, -i], [i, 0]], sigma_3 = diag(1, -1).
    """
    u1, u2 = u
    v1, v2 = v
    return (
        u1 * v2 + u2 * v1,
        -1j * (u1 * v2) + 1j * (u2 * v1),
        u1 * v1 - u2 * v2,
    )


def sigma3_form(u, v):
    return u[0] * v[0] - u[1] * v[1]


def pair_dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def conj2(u):
    return (dual.conj(u[0]), dual.conj(u[1]))


def real_part(x, name: str = "value", tol: float = 1e-12):
    """Real part of a complex bilinear, refusing a sizeable imaginary residue."""
    im = dual.value(dual.imag(x))
    re = dual.value(dual.real(x))
    if abs(im) > tol * max(1.0, abs(re)):
        raise ArithmeticError(f"{name}: imaginary residue {im:.3e} exceeds {tol:g}")
    return dual.real(x)
