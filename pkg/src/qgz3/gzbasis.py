"""Gelfand-Zetlin patterns of U_q(sl(3)) representations.

A representation is labelled by the top row ``(p13, p23, p33)``; a basis
state by the remaining entries ``(p12, p22, p11)`` subject to the
interlacing inequalities

    p13 >= p12 > p23 >= p22 > p33,    p12 >= p11 > p22.

Patterns are ordered lexicographically on ``(p12, p22, p11)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

__all__ = [
    "RepLabel",
    "GZPattern",
    "BasisState",
    "dimension",
    "enumerate_basis",
    "coordinates",
    "s1_transform",
    "in_teepee",
    "s2_source_label",
    "teepee_states",
    "s1_pairs",
]


@dataclass(frozen=True, order=True)
class RepLabel:
    p13: int
    p23: int
    p33: int
    l: int | None = None

    def __post_init__(self):
        if not self.p13 > self.p23 > self.p33:
            raise ValueError(f"need p13 > p23 > p33, got {self.top}")
        if self.l is not None:
            if self.l % 2 == 0 or self.l <= 2:
                raise ValueError(f"l must be an odd integer > 2, got {self.l}")
            if self.p13 - self.p23 > self.l or self.p23 - self.p33 > self.l:
                raise ValueError(
                    f"highest weight {self.highest_weight} has a component >= l={self.l}"
                )

    @classmethod
    def parse(cls, text: str, l: int | None = None) -> "RepLabel":
        parts = [int(x) for x in text.replace(" ", "").split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated integers, got {text!r}")
        return cls(*parts, l=l)

    @property
    def top(self) -> tuple[int, int, int]:
        return (self.p13, self.p23, self.p33)

    @property
    def highest_weight(self) -> tuple[int, int]:
        return (self.p13 - self.p23 - 1, self.p23 - self.p33 - 1)

    @property
    def theta_pairing(self) -> int:
        """<lambda, theta^vee> = lambda1 + lambda2."""
        return self.p13 - self.p33 - 2

    @property
    def rho_theta_pairing(self) -> int:
        """<lambda + rho, theta^vee> = lambda1 + lambda2 + 2."""
        return self.p13 - self.p33

    def normalized(self) -> "RepLabel":
        """The same representation with ``p33 = 0``."""
        c = self.p33
        return RepLabel(self.p13 - c, self.p23 - c, 0, self.l)

    def with_l(self, l: int | None) -> "RepLabel":
        return RepLabel(self.p13, self.p23, self.p33, l)

    def __str__(self):
        s = f"({self.p13},{self.p23},{self.p33})"
        return s if self.l is None else f"{s} l={self.l}"


class GZPattern(NamedTuple):
    """One basis state; ``label`` travels with it (it is not part of the order)."""

    p12: int
    p22: int
    p11: int
    label: RepLabel | None = None

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.p12, self.p22, self.p11)

    @property
    def sl2_dim(self) -> int:
        return self.p12 - self.p22

    def is_valid(self, label: RepLabel | None = None) -> bool:
        lab = label or self.label
        return _valid(lab.p13, lab.p23, lab.p33, self.p12, self.p22, self.p11)

    def moved(self, d12: int = 0, d22: int = 0, d11: int = 0) -> "GZPattern":
        return GZPattern(self.p12 + d12, self.p22 + d22, self.p11 + d11, self.label)

    def __repr__(self):
        return f"|{self.p12},{self.p22},{self.p11}>"


@dataclass(frozen=True)
class BasisState:
    pattern: GZPattern
    primed: bool = False


def _valid(p13, p23, p33, p12, p22, p11) -> bool:
    return p13 >= p12 > p23 >= p22 > p33 and p12 >= p11 > p22


def dimension(label: RepLabel) -> int:
    a, b, c = label.top
    return (a - b) * (b - c) * (a - c) // 2


def _iter_patterns(label: RepLabel) -> Iterator[GZPattern]:
    a, b, c = label.top
    for p12 in range(b + 1, a + 1):
        for p22 in range(c + 1, b + 1):
            for p11 in range(p22 + 1, p12 + 1):
                yield GZPattern(p12, p22, p11, label)


def enumerate_basis(label: RepLabel) -> list[GZPattern]:
    return list(_iter_patterns(label))


def coordinates(pattern: GZPattern) -> tuple[int, int, int]:
    """Pyramid coordinates: x is the h1 eigenvalue, y tracks h1 + 2 h2, z the layer."""
    a, b, c = pattern.label.top
    p12, p22, p11 = pattern.key
    x = 2 * p11 - (p12 + p22) - 1
    y = 3 * (p12 + p22) - 2 * (a + b + c) - 1
    z = min(a - p12, b - c - 1)
    return x, y, z


def s1_transform(pattern: GZPattern, l: int) -> GZPattern:
    return GZPattern(pattern.p22 + l, pattern.p12 - l, pattern.p11, pattern.label)


def in_teepee(pattern: GZPattern, l: int) -> bool:
    """True when both the pattern and its S1 image satisfy the interlacing rules."""
    if not pattern.is_valid():
        return False
    return s1_transform(pattern, l).is_valid()


def s2_source_label(label: RepLabel, l: int) -> RepLabel | None:
    a, b, c = label.top
    if c + l > b > a - l:
        return RepLabel(c + l, b, a - l)
    return None


def teepee_states(label: RepLabel, l: int) -> list[GZPattern]:
    return [p for p in _iter_patterns(label) if in_teepee(p, l)]


def s1_pairs(label: RepLabel, l: int) -> list[tuple[GZPattern, GZPattern]]:
    """S1-pairs ``(A, S1(A))`` with ``p12 - p22 > l`` on A, in basis order of A."""
    return [
        (p, s1_transform(p, l))
        for p in _iter_patterns(label)
        if p.sl2_dim > l and in_teepee(p, l)
    ]
