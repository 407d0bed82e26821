"""q-numbers, first-order jets and limits at odd roots of unity.

Every q-dependent quantity in the package is evaluated either at a generic
point on the unit circle, at a primitive l-th root of unity ``zeta``, or on
the ray ``q = zeta * exp(eps)`` approaching it.  At the root itself we carry
first-order jets in ``eps`` so that ratios of vanishing quantities can be
resolved in closed form.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

__all__ = [
    "DEFAULT_ANGLE",
    "QParam",
    "Jet",
    "branch_sqrt",
    "q_int",
    "q_pow",
    "q_int_ratio",
    "jet_sqrt",
    "d_limit",
    "richardson_limit",
]

DEFAULT_ANGLE = 1.0 / (2.0 * math.e)

# generic angles are rejected when this close to p/k with small k
_RATIONAL_GUARD = 1e-9

Number = Union[int, float, complex]


def branch_sqrt(z: Number) -> complex:
    """Square root with the cut on the negative imaginary axis.

    Agrees with the principal root off the third quadrant and maps a
    negative real ``-r`` to ``+i sqrt(r)``, continuously in a neighbourhood
    of the negative real axis.  All radicands met here are real at the
    evaluation point or close to it, so the cut is never approached.
    """
    z = complex(z)
    if z.real < 0.0:
        return 1j * cmath.sqrt(-z)
    return cmath.sqrt(z)


@dataclass(frozen=True)
class QParam:
    """Deformation parameter.

    ``kind`` is one of ``"generic"`` (``q = exp(2 pi i t)``), ``"root"``
    (``q = zeta = exp(2 pi i m / l)``) or ``"near_root"``
    (``q = zeta * exp(eps)``).  Use the classmethod constructors.
    """

    kind: str
    t: float = DEFAULT_ANGLE
    l: int | None = None
    m: int = 1
    eps: float = 0.0

    @classmethod
    def generic(cls, t: float = DEFAULT_ANGLE, l_max: int = 7) -> "QParam":
        for k in range(1, 2 * l_max + 1):
            frac = t * k
            if abs(frac - round(frac)) < _RATIONAL_GUARD * k:
                raise ValueError(
                    f"angle {t!r} is within {_RATIONAL_GUARD} of a rational "
                    f"with denominator {k} <= {2 * l_max}"
                )
        return cls("generic", t=float(t))

    @classmethod
    def root(cls, l: int, m: int = 1) -> "QParam":
        _check_root(l, m)
        return cls("root", l=int(l), m=int(m))

    @classmethod
    def near_root(cls, l: int, m: int, eps: float) -> "QParam":
        _check_root(l, m)
        if eps == 0:
            raise ValueError("near_root needs eps != 0; use QParam.root")
        return cls("near_root", l=int(l), m=int(m), eps=float(eps))

    @property
    def zeta(self) -> complex:
        if self.l is None:
            raise AttributeError("generic QParam has no root")
        return cmath.exp(2j * math.pi * self.m / self.l)

    @property
    def angle(self) -> float:
        """Argument of q divided by 2 pi (root and generic only)."""
        if self.kind == "generic":
            return self.t
        return self.m / self.l

    @property
    def value(self) -> complex:
        if self.kind == "generic":
            return cmath.exp(2j * math.pi * self.t)
        if self.kind == "root":
            return self.zeta
        return self.zeta * cmath.exp(self.eps)

    def on_unit_circle(self) -> bool:
        return self.kind != "near_root"


def _check_root(l, m):
    if l % 2 == 0 or l <= 2:
        raise ValueError(f"root order must be an odd integer > 2, got {l}")
    if math.gcd(m, l) != 1:
        raise ValueError(f"m={m} is not coprime to l={l}")


@dataclass(frozen=True)
class Jet:
    """``value + deriv * eps`` truncated at first order.

    The expansion variable is the ``eps`` of ``q = zeta * exp(eps)``.
    A quotient of two jets with vanishing values is resolved to its limit
    ``da/db``; the resulting derivative is unknown and set to NaN with
    ``resolved`` flagged.
    """

    value: complex
    deriv: complex = 0j
    resolved: bool = False

    @staticmethod
    def lift(x: "Jet | Number") -> "Jet":
        return x if isinstance(x, Jet) else Jet(complex(x), 0j)

    def __add__(self, other):
        o = Jet.lift(other)
        return Jet(self.value + o.value, self.deriv + o.deriv)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.value, -self.deriv)

    def __sub__(self, other):
        return self + (-Jet.lift(other))

    def __rsub__(self, other):
        return Jet.lift(other) - self

    def __mul__(self, other):
        o = Jet.lift(other)
        return Jet(self.value * o.value, self.value * o.deriv + o.value * self.deriv)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Jet.lift(other)
        if o.value == 0:
            if self.value != 0:
                raise ZeroDivisionError("jet division by a vanishing value")
            if o.deriv == 0:
                raise ZeroDivisionError("0/0 jet division without first-order data")
            return Jet(self.deriv / o.deriv, complex("nan"), resolved=True)
        v = self.value / o.value
        return Jet(v, (self.deriv - v * o.deriv) / o.value)

    def __rtruediv__(self, other):
        return Jet.lift(other) / self

    def isclose(self, other, tol: float = 1e-12) -> bool:
        o = Jet.lift(other)
        return abs(self.value - o.value) <= tol and abs(self.deriv - o.deriv) <= tol


def _qint_generic(n: int, q: complex) -> complex:
    if n == 0:
        return 0j
    return (q**n - q ** (-n)) / (q - 1 / q)


def q_int(n: int, q: QParam) -> Jet:
    """The q-integer ``[n] = (q^n - q^-n) / (q - q^-1)``.

    On the unit circle the value is the real number ``sin(2 pi n a)/sin(2 pi a)``
    (computed that way so no rounding imaginary part appears).  At a root
    the derivative with respect to ``eps`` is attached; elsewhere it is 0.
    """
    n = int(n)
    if q.kind == "near_root":
        return Jet(_qint_generic(n, q.value))
    theta = 2 * math.pi * q.angle
    if q.kind == "generic":
        return Jet(complex(math.sin(n * theta) / math.sin(theta)))
    s, c = math.sin(theta), math.cos(theta)
    if n % q.l == 0:
        return Jet(0j, -1j * n / s)
    # d/d eps of [n] at q = zeta
    deriv = -1j * (n * math.cos(n * theta) * s - math.sin(n * theta) * c) / (s * s)
    return Jet(complex(math.sin(n * theta) / s), deriv)


def q_int_ratio(k: int, q: QParam) -> Jet:
    """``[k l] / [l]`` as a jet at a root: ``sinh(k l eps)/sinh(l eps) = k + O(eps^2)``."""
    if q.kind == "root":
        return Jet(complex(k), 0j)
    return Jet(_qint_generic(k * q.l, q.value) / _qint_generic(q.l, q.value))


def q_pow(n: Number, q: QParam) -> complex:
    return q.value**n


def jet_sqrt(x: "Jet | Number", allow_zero: bool = False) -> Jet:
    """Square root of a jet on the ``branch_sqrt`` branch.

    A vanishing value has no first-order square root; it is rejected unless
    ``allow_zero`` is set and the derivative vanishes as well.
    """
    x = Jet.lift(x)
    if x.value == 0:
        if allow_zero and x.deriv == 0:
            return Jet(0j, 0j)
        raise ValueError("square root of a jet with zero value is a half-order term")
    r = branch_sqrt(x.value)
    return Jet(r, x.deriv / (2 * r))


def d_limit(f_at_a: Jet, f_at_b: Jet, l: int, zeta: complex, tol: float = 1e-9) -> complex:
    """``lim (f(a) - f(b)) / [l]`` as ``q -> zeta`` along ``q = zeta * exp(eps)``.

    Both jets must agree in value at the root; only their first-order parts
    survive the division by ``[l] = 2 l eps / (zeta - 1/zeta) + O(eps^2)``.
    """
    scale = max(1.0, abs(f_at_a.value), abs(f_at_b.value))
    if abs(f_at_a.value - f_at_b.value) > tol * scale:
        raise ValueError(
            f"d_limit needs coinciding values, got {f_at_a.value} and {f_at_b.value}"
        )
    return (f_at_a.deriv - f_at_b.deriv) / (2 * l / (zeta - 1 / zeta))


def richardson_limit(
    hs: Sequence[float], values: Sequence[np.ndarray | complex]
) -> np.ndarray | complex:
    """Extrapolate ``values[k] = F(hs[k])`` polynomially to ``h = 0``.

    Neville's scheme, i.e. Richardson extrapolation for arbitrary step
    ratios.  Works entrywise on arrays.
    """
    hs = [float(h) for h in hs]
    if len(hs) != len(values) or not hs:
        raise ValueError("need one value per step")
    if any(h <= 0 for h in hs) or any(b >= a for a, b in zip(hs, hs[1:])):
        raise ValueError("steps must be positive and strictly decreasing")
    table = [np.asarray(v, dtype=complex) for v in values]
    n = len(hs)
    for k in range(1, n):
        table = [
            (hs[i] * table[i + 1] - hs[i + k] * table[i]) / (hs[i] - hs[i + k])
            for i in range(n - k)
        ]
    out = table[0]
    return complex(out) if out.ndim == 0 else out
