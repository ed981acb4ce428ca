"""Nonlinear amplitude-equation integrator with phase accumulation.

Two equation modes are supported for the amplitude A(x):

  NR   A'' = A^-3 - (2 mu / hbar^2) (eps - V) A
  WP   A'' = -(2 mu / hbar^2) [eps - V + m c^2 - W(A)] A,
       W(A) = sqrt(m1^2 c^4 + A^-4 hbar^2 c^2) + sqrt(m2^2 c^4 + A^-4 hbar^2 c^2)

The phase Phi = integral of A^-2 is carried as a third ODE component so the
same step-error control covers it.  Integration starts at the potential
minimum and runs outward in one direction at a time; the substitution
xi = direction * (x - x_min) lets a single code path serve both sides.
Stepping uses the Dormand-Prince 5(4) embedded pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .core import TwoBodySystem
from .potentials import PotentialSpec, as_scalar_fn

__all__ = [
    "Mode",
    "AmplitudeState",
    "IntegrationConfig",
    "IntegrationFault",
    "HalfAxisResult",
    "CONVERGED",
    "RANGE_LIMIT",
    "amplitude_rhs",
    "integrate_half_axis",
]


class Mode(str, Enum):
    NR = "nr"
    WP = "wp"


@dataclass
class AmplitudeState:
    """Integration state: position, amplitude, amplitude slope, accumulated phase."""

    x: float
    A: float
    A_prime: float
    Phi: float


@dataclass(frozen=True)
class IntegrationConfig:
    """Step control and termination parameters.

    rel_tol/abs_tol drive the embedded-pair error test on (A, A', Phi).
    Integration of a half axis stops once the position is safely past the
    classical turning point (V > eps + 0.05*(eps - V0)) and the phase
    integrand A^-2 has dropped below termination_ratio times its running
    maximum; x_max is a hard range limit on |x - x_min|.  length_scale
    rescales the space variable used for step sizing (working variable is
    x/length_scale).
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    h_init: float = 1e-3
    h_max: float = 0.5
    termination_ratio: float = 1e-10
    x_max: float = 1e4
    length_scale: float = 1.0

    def __post_init__(self):
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if not (0.0 < self.termination_ratio <= 1e-6):
            raise ValueError(f"termination_ratio must lie in (0, 1e-6], got {self.termination_ratio!r}")
        if not (0.0 < self.h_init <= self.h_max):
            raise ValueError("need 0 < h_init <= h_max")
        if not (self.x_max > 0.0 and math.isfinite(self.x_max)):
            raise ValueError("x_max must be positive and finite")
        if not (self.length_scale > 0.0 and math.isfinite(self.length_scale)):
            raise ValueError("length_scale must be positive and finite")


class IntegrationFault(RuntimeError):
    """Amplitude collapse, step underflow, or a non-finite state."""

    def __init__(self, message: str, *, x: float | None = None, h: float | None = None):
        super().__init__(message)
        self.x = x
        self.h = h


@dataclass
class HalfAxisResult:
    state: AmplitudeState
    reason: str
    samples: list = field(default_factory=list)


CONVERGED = "converged"
RANGE_LIMIT = "range-limit"

# In a forbidden region A grows exponentially and A^-2 underflows long before
# A itself overflows; cap the growth instead of producing inf.
_A_CEILING = 1e100


class _Collapse(Exception):
    pass


def _resolve_potential(potential, x0: float):
    """Accept a PotentialSpec or a plain callable V(x); return (fn, V0 reference)."""
    if isinstance(potential, PotentialSpec):
        return as_scalar_fn(potential), potential.V0
    if callable(potential):
        return potential, float(potential(x0))
    raise TypeError(f"potential must be a PotentialSpec or callable, got {type(potential)!r}")


def _make_rhs(mode: Mode, system: TwoBodySystem, v, eps: float):
    """Scalar closure (xi, A) -> A'' with the potential already folded to xi."""
    hbar = system.units.hbar
    two_mu_over_h2 = 2.0 * system.mu / (hbar * hbar)
    if mode is Mode.NR:

        def rhs(xi: float, a: float) -> float:
            if a <= 0.0:
                raise _Collapse
            return 1.0 / (a * a * a) - two_mu_over_h2 * (eps - v(xi)) * a

        return rhs

    c = system.units.c
    e1 = system.m1 * c * c
    e2 = system.m2 * c * c
    hc = hbar * c

    def rhs(xi: float, a: float) -> float:
        if a <= 0.0:
            raise _Collapse
        # W(A) - m c^2 without cancellation: q/(E + sqrt(E^2+q)) per particle,
        # with q the squared local momentum (hbar/A^2) times c, squared.
        q = hc / (a * a)
        q *= q
        dyn = q / (e1 + math.sqrt(e1 * e1 + q)) + q / (e2 + math.sqrt(e2 * e2 + q))
        return -two_mu_over_h2 * (eps - v(xi) - dyn) * a

    return rhs


def amplitude_rhs(mode: Mode, system: TwoBodySystem, potential, eps: float, x: float, A: float) -> float:
    """Second derivative A'' of the amplitude equation at (x, A)."""
    v, _ = _resolve_potential(potential, x)
    try:
        return _make_rhs(mode, system, v, eps)(x, A)
    except _Collapse:
        raise IntegrationFault(f"amplitude collapsed: A={A!r} <= 0 at x={x!r}", x=x) from None


# Dormand-Prince 5(4) tableau; the 5th-order weights equal the last stage row
# (first-same-as-last), so k7 of an accepted step is k1 of the next.
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)


def integrate_half_axis(
    mode: Mode,
    system: TwoBodySystem,
    potential,
    eps: float,
    init: AmplitudeState,
    config: IntegrationConfig,
    direction: int,
    checkpoints=None,
    record_steps: bool = False,
) -> HalfAxisResult:
    """Advance (A, A', Phi) outward from the well minimum until termination.

    ``init`` holds the starting state at the minimum (normally A from the
    matching initial-amplitude operation, A' = 0, Phi = 0); ``direction`` is
    +1 or -1.  When ``checkpoints`` (ascending offsets |x - init.x|) are
    given, the stepper lands on each one exactly and records the state
    there; ``record_steps`` records every accepted step instead.  The
    returned reason is "converged" (termination criterion met) or
    "range-limit" (x_max reached); faults raise IntegrationFault.
    """
    if direction not in (-1, 1):
        raise ValueError(f"direction must be +1 or -1, got {direction!r}")
    x0 = float(init.x)
    v_x, v0_ref = _resolve_potential(potential, x0)
    v = (lambda xi: v_x(x0 + xi)) if direction == 1 else (lambda xi: v_x(x0 - xi))
    rhs = _make_rhs(mode, system, v, eps)

    # Past-turning-point criterion, measured from the declared well minimum.
    v_stop = eps + 0.05 * (eps - v0_ref)

    cps = [float(c) for c in checkpoints] if checkpoints is not None else []
    if any(c < 0 for c in cps) or any(later < earlier for earlier, later in zip(cps, cps[1:])):
        raise ValueError("checkpoints must be non-negative and ascending")
    cp_index = 0
    samples: list[AmplitudeState] = []

    xi = 0.0
    a = float(init.A)
    b = direction * float(init.A_prime)
    phi = float(init.Phi)
    if a <= 0.0:
        raise IntegrationFault(f"amplitude collapsed: initial A={a!r} <= 0", x=x0)

    scale = config.length_scale
    h_nat = min(config.h_init, config.h_max) * scale
    h_max = config.h_max * scale
    xi_end = config.x_max
    rel, atol = config.rel_tol, config.abs_tol

    integrand = 1.0 / (a * a)
    max_integrand = integrand
    k1 = (b, rhs(xi, a), integrand)

    def _record(xi_s, a_s, b_s, phi_s):
        samples.append(AmplitudeState(x0 + direction * xi_s, a_s, direction * b_s, phi_s))

    if record_steps:
        _record(xi, a, b, phi)
    while cp_index < len(cps) and cps[cp_index] <= xi + 1e-15:
        _record(xi, a, b, phi)
        cp_index += 1

    reason = None
    steps = 0
    while reason is None:
        steps += 1
        if steps > 2_000_000:
            raise IntegrationFault("step budget exceeded", x=x0 + direction * xi, h=h_nat)

        h = h_nat
        at_cp = at_end = False
        if cp_index < len(cps) and xi + h >= cps[cp_index] - 1e-15:
            h = cps[cp_index] - xi
            at_cp = True
        if xi + h >= xi_end and (not at_cp or xi_end <= cps[cp_index]):
            h = xi_end - xi
            at_cp = False
            at_end = True
        if h <= 1e-14 * max(abs(xi), 1.0):
            if at_cp:
                _record(xi, a, b, phi)  # checkpoint coincides with current position
                cp_index += 1
                continue
            if at_end:
                reason = RANGE_LIMIT
                break
            raise IntegrationFault("step size underflow", x=x0 + direction * xi, h=h)

        try:
            a2 = a + h * _A21 * k1[0]
            b2 = b + h * _A21 * k1[1]
            k2 = (b2, rhs(xi + _C2 * h, a2), 1.0 / (a2 * a2))
            a3 = a + h * (_A31 * k1[0] + _A32 * k2[0])
            b3 = b + h * (_A31 * k1[1] + _A32 * k2[1])
            k3 = (b3, rhs(xi + _C3 * h, a3), 1.0 / (a3 * a3))
            a4 = a + h * (_A41 * k1[0] + _A42 * k2[0] + _A43 * k3[0])
            b4 = b + h * (_A41 * k1[1] + _A42 * k2[1] + _A43 * k3[1])
            k4 = (b4, rhs(xi + _C4 * h, a4), 1.0 / (a4 * a4))
            a5 = a + h * (_A51 * k1[0] + _A52 * k2[0] + _A53 * k3[0] + _A54 * k4[0])
            b5 = b + h * (_A51 * k1[1] + _A52 * k2[1] + _A53 * k3[1] + _A54 * k4[1])
            k5 = (b5, rhs(xi + _C5 * h, a5), 1.0 / (a5 * a5))
            a6 = a + h * (_A61 * k1[0] + _A62 * k2[0] + _A63 * k3[0] + _A64 * k4[0] + _A65 * k5[0])
            b6 = b + h * (_A61 * k1[1] + _A62 * k2[1] + _A63 * k3[1] + _A64 * k4[1] + _A65 * k5[1])
            k6 = (b6, rhs(xi + h, a6), 1.0 / (a6 * a6))
            a_new = a + h * (_B1 * k1[0] + _B3 * k3[0] + _B4 * k4[0] + _B5 * k5[0] + _B6 * k6[0])
            b_new = b + h * (_B1 * k1[1] + _B3 * k3[1] + _B4 * k4[1] + _B5 * k5[1] + _B6 * k6[1])
            phi_new = phi + h * (_B1 * k1[2] + _B3 * k3[2] + _B4 * k4[2] + _B5 * k5[2] + _B6 * k6[2])
            xi_new = xi + h
            k7 = (b_new, rhs(xi_new, a_new), 1.0 / (a_new * a_new))
        except _Collapse:
            # Reject and retry with a halved step before faulting.
            h_nat = 0.5 * h
            if h_nat < 1e-14 * max(abs(xi), 1.0):
                raise IntegrationFault(
                    "amplitude collapsed: A <= 0 reached during stepping",
                    x=x0 + direction * xi,
                    h=h_nat,
                ) from None
            continue

        err_a = h * (_E1 * k1[0] + _E3 * k3[0] + _E4 * k4[0] + _E5 * k5[0] + _E6 * k6[0] + _E7 * k7[0])
        err_b = h * (_E1 * k1[1] + _E3 * k3[1] + _E4 * k4[1] + _E5 * k5[1] + _E6 * k6[1] + _E7 * k7[1])
        err_p = h * (_E1 * k1[2] + _E3 * k3[2] + _E4 * k4[2] + _E5 * k5[2] + _E6 * k6[2] + _E7 * k7[2])
        norm = max(
            abs(err_a) / (atol + rel * max(abs(a), abs(a_new))),
            abs(err_b) / (atol + rel * max(abs(b), abs(b_new))),
            abs(err_p) / (atol + rel * max(abs(phi), abs(phi_new))),
        )
        if not math.isfinite(norm):
            h_nat = 0.5 * h
            if h_nat < 1e-14 * max(abs(xi), 1.0):
                raise IntegrationFault("non-finite state", x=x0 + direction * xi, h=h_nat)
            continue
        if norm > 1.0:
            h_nat = h * max(0.2, 0.9 * norm**-0.2)
            continue

        # Accepted step.  Equality is allowed: deep in a forbidden region the
        # increment A^-2 h legitimately drops below one ulp of Phi.
        if not (phi_new >= phi):
            raise IntegrationFault(
                "phase integral failed to increase", x=x0 + direction * xi_new
            )
        xi, a, b, phi = xi_new, a_new, b_new, phi_new
        k1 = k7
        integrand = 1.0 / (a * a)
        if integrand > max_integrand:
            max_integrand = integrand

        if at_cp:
            _record(xi, a, b, phi)
            cp_index += 1
        elif record_steps:
            _record(xi, a, b, phi)

        if v(xi) > v_stop and integrand < config.termination_ratio * max_integrand:
            reason = CONVERGED
        elif at_end:
            reason = RANGE_LIMIT
        elif a > _A_CEILING:
            reason = RANGE_LIMIT
        else:
            grow = 5.0 if norm == 0.0 else min(5.0, max(0.2, 0.9 * norm**-0.2))
            h_nat = min(max(h_nat, h) * grow, h_max)

    state = AmplitudeState(x0 + direction * xi, a, direction * b, phi)
    return HalfAxisResult(state, reason, samples)
