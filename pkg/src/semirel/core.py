"""Two-body mass algebra and the summed relativistic kinetic energy.

Masses are stored in energy/c^2 units.  The unit constants live in
``UnitSystem`` and default to natural units (hbar = c = 1); c may be set very
large to probe the non-relativistic limit.  All functions are pure;
momentum arguments may be scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "UnitSystem",
    "NATURAL_UNITS",
    "TwoBodySystem",
    "partner_mass",
    "mass_coefficient",
    "half_binomial",
    "total_kinetic",
    "dynamic_kinetic",
    "truncated_kinetic",
]


@dataclass(frozen=True)
class UnitSystem:
    """Planck constant and speed of light, both positive and finite."""

    hbar: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "c"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")


NATURAL_UNITS = UnitSystem()


@dataclass(frozen=True)
class TwoBodySystem:
    """Two point masses plus the unit constants they live in.

    The reduced mass ``mu`` and total mass ``m`` are derived exactly from
    (m1, m2); use :meth:`from_reduced` to build a system specified by
    (mu, m1) instead.
    """

    m1: float
    m2: float
    units: UnitSystem = NATURAL_UNITS

    def __post_init__(self):
        for name in ("m1", "m2"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    @classmethod
    def from_reduced(cls, mu: float, m1: float, units: UnitSystem = NATURAL_UNITS) -> "TwoBodySystem":
        return cls(m1, partner_mass(mu, m1), units)

    @property
    def m(self) -> float:
        """Total rest mass m1 + m2."""
        return self.m1 + self.m2

    @property
    def mu(self) -> float:
        """Reduced mass m1*m2/(m1 + m2)."""
        return self.m1 * self.m2 / (self.m1 + self.m2)

    @property
    def rest_energy(self) -> float:
        """m*c^2."""
        return self.m * self.units.c**2


def partner_mass(mu: float, m1: float) -> float:
    """Second mass m2 such that the pair (m1, m2) has reduced mass mu.

    Requires 0 < mu < m1; the reduced mass of any pair is smaller than
    either constituent.
    """
    if not (0.0 < mu < m1):
        raise ValueError(
            f"no positive partner mass exists for mu={mu!r}, m1={m1!r} (need 0 < mu < m1)"
        )
    return mu * m1 / (m1 - mu)


def mass_coefficient(system: TwoBodySystem, j: int) -> float:
    """Mass-distribution coefficient (m1/m)^(2j-1) + (m2/m)^(2j-1).

    Equals 1 for j = 1 and lies in (0, 1] for every j >= 1.
    """
    if j < 1:
        raise ValueError(f"j must be a positive integer, got {j!r}")
    f1 = system.m1 / system.m
    f2 = system.m2 / system.m
    return f1 ** (2 * j - 1) + f2 ** (2 * j - 1)


def half_binomial(j: int) -> float:
    """Generalized binomial coefficient (1/2 choose j).

    Evaluated with exact rational arithmetic and converted to float at the
    end, so no factorial overflow or cancellation occurs for large j.
    """
    if j < 1:
        raise ValueError(f"j must be a positive integer, got {j!r}")
    num = Fraction(1)
    for i in range(j):
        num *= Fraction(1, 2) - i
    return float(num / math.factorial(j))


def total_kinetic(system: TwoBodySystem, p):
    """Summed square-root kinetic energy sqrt(m1^2 c^4 + p^2 c^2) + sqrt(m2^2 c^4 + p^2 c^2).

    Even in p, bounded below by m*c^2, strictly increasing in |p|.
    """
    c = system.units.c
    pc = np.abs(p) * c
    return np.hypot(system.m1 * c * c, pc) + np.hypot(system.m2 * c * c, pc)


def dynamic_kinetic(system: TwoBodySystem, p):
    """total_kinetic minus the rest energy m*c^2, computed without cancellation.

    Uses q / (E + sqrt(E^2 + q)) per particle, which stays accurate when
    p*c is many orders of magnitude below the rest energies (large-c limit).
    """
    c = system.units.c
    e1 = system.m1 * c * c
    e2 = system.m2 * c * c
    q = np.square(p * c)
    return q / (e1 + np.sqrt(e1 * e1 + q)) + q / (e2 + np.sqrt(e2 * e2 + q))


def truncated_kinetic(system: TwoBodySystem, p, order: int):
    """Partial sum of the formal power-series expansion of total_kinetic.

    Returns m c^2 + mu c^2 * sum_{j=1..order} (1/2 choose j) eta_{2j} (p/(mu c))^(2j),
    accumulated Horner-style in the dimensionless variable (p/(mu c))^2.
    order = 0 returns the rest energy alone.

    The series converges for |p| < min(m1, m2)*c; this is documented, not
    enforced.
    """
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order!r}")
    c = system.units.c
    mu = system.mu
    u = np.square(p / (mu * c))
    s = np.zeros_like(u)
    for j in range(order, 0, -1):
        s = u * (half_binomial(j) * mass_coefficient(system, j) + s)
    return system.rest_energy + mu * c * c * s
