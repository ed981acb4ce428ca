"""Bound-state energies from the phase quantization condition.

A level with n nodes satisfies  integral of A^-2 over the whole axis
= (n+1) pi, where A solves the amplitude equation of the selected mode.
Energies are located by bracketed bisection refined with secant (Illinois)
steps; brackets are seeded from the harmonic estimate at the well minimum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import TwoBodySystem
from .milne import (
    AmplitudeState,
    IntegrationConfig,
    Mode,
    integrate_half_axis,
)
from .potentials import (
    QUARTIC,
    PotentialSpec,
    curvature_at_min,
    dissociation_limit,
    turning_points,
    validate_single_well,
)

__all__ = [
    "EnergyLevel",
    "ThresholdError",
    "BracketError",
    "QuantizationError",
    "initial_amplitude_wp",
    "initial_amplitude_nr",
    "total_phase",
    "solve_level",
    "solve_spectrum",
    "reconstruct_wavefunction",
    "wavefunction_profile",
    "count_nodes",
    "a0_sensitivity",
]


class ThresholdError(ValueError):
    """Energy at or below the local kinematic threshold at the well minimum."""


class BracketError(RuntimeError):
    """No energy bracket found for the requested level."""


class QuantizationError(RuntimeError):
    """Root refinement failed to meet the quantization tolerances."""


@dataclass
class EnergyLevel:
    """One bound state: nodal index, dynamical energy, and convergence data.

    ``eps`` excludes the rest energy.  ``residual`` is |Phi_total - (n+1) pi|
    at convergence and ``bracket`` the final energy bracket width; ``mode``
    is one of "wp", "nr", "exact", "analytic-nr".  ``error`` is set instead
    of raising when a batch solve collects failures.
    """

    n: int
    eps: float
    mode: str
    residual: float
    bracket: float
    info: dict = field(default_factory=dict)
    error: str | None = None


def initial_amplitude_wp(system: TwoBodySystem, eps: float, V0: float) -> float:
    """Starting amplitude for the WP equation at the well minimum.

    Root of  W(A0) = m c^2 + eps - V0  with W the summed square-root kinetic
    energy at local momentum hbar/A0^2.  Evaluated in a factored form free
    of cancellation: with w = eps - V0, E1 >= E2 the particle rest energies,
    Em = E1 + E2 and M = Em + w,

        hbar^2 c^2 / A0^4 = [w (E1 + w/2) / M] * [(2 E2 Em + (Em + E2) w + w^2/2) / M]

    which is positive exactly when w > 0.
    """
    units = system.units
    e1 = max(system.m1, system.m2) * units.c**2
    e2 = min(system.m1, system.m2) * units.c**2
    em = e1 + e2
    w = eps - V0
    m_total = em + w
    if m_total <= 0.0:
        raise ThresholdError(
            f"energy below local kinematic threshold at the well minimum (eps={eps!r}, V0={V0!r})"
        )
    r = (w * (e1 + 0.5 * w) / m_total) * ((2.0 * e2 * em + (em + e2) * w + 0.5 * w * w) / m_total)
    if r <= 0.0:
        raise ThresholdError(
            f"energy below local kinematic threshold at the well minimum (eps={eps!r}, V0={V0!r})"
        )
    return ((units.hbar * units.c) ** 2 / r) ** 0.25


def initial_amplitude_nr(system: TwoBodySystem, eps: float, V0: float) -> float:
    """Starting amplitude (hbar^2 / (2 mu (eps - V0))) ** (1/4) for the NR equation."""
    if eps <= V0:
        raise ThresholdError(
            f"no classically allowed region at minimum (eps={eps!r} <= V0={V0!r})"
        )
    hbar = system.units.hbar
    return (hbar * hbar / (2.0 * system.mu * (eps - V0))) ** 0.25


def _initial_amplitude(mode: Mode, system: TwoBodySystem, eps: float, V0: float) -> float:
    if mode is Mode.WP:
        return initial_amplitude_wp(system, eps, V0)
    return initial_amplitude_nr(system, eps, V0)


def _initial_state(mode, system, spec, eps, a0_scale):
    a0 = _initial_amplitude(mode, system, eps, spec.V0) * a0_scale
    return AmplitudeState(spec.x_min, a0, 0.0, 0.0)


def total_phase(
    mode: Mode,
    system: TwoBodySystem,
    spec: PotentialSpec,
    eps: float,
    config: IntegrationConfig = IntegrationConfig(),
    a0_scale: float = 1.0,
) -> float:
    """Full-axis phase integral of A^-2 as approximated by the terminated runs.

    Symmetric wells integrate one direction and double it; asymmetric wells
    integrate both directions from the minimum with the same starting
    amplitude.
    """
    init = _initial_state(mode, system, spec, eps, a0_scale)
    phi = integrate_half_axis(mode, system, spec, eps, init, config, +1).state.Phi
    if spec.symmetric:
        return 2.0 * phi
    return phi + integrate_half_axis(mode, system, spec, eps, init, config, -1).state.Phi


# integral of sqrt(1 - u^4) over [-1, 1], for the quartic action
_QUARTIC_ACTION = math.gamma(0.25) * math.gamma(1.5) / (2.0 * math.gamma(1.75))


def _nr_seed(system: TwoBodySystem, spec: PotentialSpec, n: int) -> float:
    """Semiclassical estimate above the minimum, used to seed energy brackets.

    Wells with positive curvature get the harmonic level; a flat-bottomed
    quartic gets the phase-integral estimate for beta4 x^4 / 4.
    """
    hbar = system.units.hbar
    curvature = curvature_at_min(spec)
    if curvature > 0.0:
        return spec.V0 + hbar * math.sqrt(curvature / system.mu) * (n + 0.5)
    if spec.kind == QUARTIC and spec.params[1] > 0.0:
        action = (n + 0.5) * math.pi * hbar
        quarter_beta4 = 0.25 * spec.params[1]
        eps = (action * quarter_beta4**0.25 / (_QUARTIC_ACTION * math.sqrt(2.0 * system.mu))) ** (4.0 / 3.0)
        return spec.V0 + eps
    raise ValueError("potential has no usable energy scale at its minimum")


def _gate_single_well(spec: PotentialSpec) -> None:
    """Reject quartic shapes that are not single wells before solving.

    The other kinds are single-well by construction; a quartic with a
    negative x^2 coefficient hides two minima away from the origin.
    """
    if spec.kind != QUARTIC:
        return
    beta2, beta4 = spec.params
    span = 3.0 * math.sqrt((abs(beta2) + 1.0) / beta4) if beta4 > 0.0 else 10.0 / math.sqrt(beta2)
    validate_single_well(spec, (spec.x_min - span, spec.x_min + span))


def solve_level(
    mode: Mode,
    system: TwoBodySystem,
    spec: PotentialSpec,
    n: int,
    config: IntegrationConfig = IntegrationConfig(),
    *,
    quantization_tol: float = 1e-8,
    bracket_tol: float = 1e-9,
    eps_floor: float | None = None,
    a0_scale: float = 1.0,
) -> EnergyLevel:
    """Find eps_n with Phi_total(eps_n) = (n+1) pi.

    Starts from the bracket [V0 + 0.3 d, V0 + 1.2 d] with d the harmonic
    estimate above the minimum (``eps_floor`` raises the lower edge, used to
    seed from a previously solved level), expands it if needed, bisects
    until the bracket is within 1% of the energy, then refines with Illinois
    secant steps.  Converged when the phase residual is below
    ``quantization_tol`` and the bracket width below
    ``bracket_tol * max(1, |eps|)``.
    """
    if n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n!r}")
    _gate_single_well(spec)
    target = (n + 1) * math.pi
    evals = 0

    def phase(eps: float) -> float:
        nonlocal evals
        evals += 1
        return total_phase(mode, system, spec, eps, config, a0_scale)

    seed = _nr_seed(system, spec, n)
    lo = spec.V0 + 0.3 * (seed - spec.V0)
    hi = spec.V0 + 1.2 * (seed - spec.V0)
    if eps_floor is not None:
        lo = max(lo, eps_floor)
    ceiling = dissociation_limit(spec)
    cap = None if ceiling is None else ceiling - 1e-9 * max(1.0, ceiling - spec.V0)
    if cap is not None:
        hi = min(hi, cap)

    # The phase is strictly increasing in eps wherever the initial amplitude
    # exists, so a sign change of phase - target brackets exactly one level.
    g_lo = phase(lo) - target
    for _ in range(60):
        if g_lo <= 0.0:
            break
        lo = spec.V0 + 0.5 * (lo - spec.V0)
        g_lo = phase(lo) - target
    else:
        raise BracketError(f"level outside search window: n={n} (no lower edge found)")
    g_hi = phase(hi) - target
    for _ in range(60):
        if g_hi >= 0.0:
            break
        if cap is not None and hi >= cap:
            raise BracketError(
                f"level outside search window: n={n} (bracket reached the dissociation limit)"
            )
        hi = spec.V0 + 1.6 * (hi - spec.V0)
        if cap is not None:
            hi = min(hi, cap)
        g_hi = phase(hi) - target
    else:
        raise BracketError(f"level outside search window: n={n} (no upper edge found)")

    # Phase evaluations carry integration noise; tolerate it in the
    # monotonicity assertion instead of failing on sub-tolerance wiggles.
    slack = max(1e-9, 100.0 * config.rel_tol * target)

    def check_monotone(g_mid: float) -> None:
        if g_mid < g_lo - slack or g_mid > g_hi + slack:
            raise QuantizationError(
                f"phase integral not monotone in energy near n={n}: "
                f"g({lo})={g_lo}, g(mid)={g_mid}, g({hi})={g_hi}"
            )

    # Bisection until the bracket is within 1% of the energy scale.
    while hi - lo > 0.01 * max(abs(lo), abs(hi), 1e-12):
        mid = 0.5 * (lo + hi)
        g_mid = phase(mid) - target
        check_monotone(g_mid)
        if g_mid < 0.0:
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid

    # Illinois secant refinement with bracket maintenance.  The slope copies
    # g_lo_s/g_hi_s get halved on same-side repeats to force superlinear
    # convergence; the true endpoint values feed the monotonicity check.
    best_eps, best_g = (lo, g_lo) if abs(g_lo) < abs(g_hi) else (hi, g_hi)
    side = 0
    g_lo_s, g_hi_s = g_lo, g_hi
    for _ in range(200):
        if abs(best_g) < quantization_tol and hi - lo < bracket_tol * max(1.0, abs(best_eps)):
            break
        denom = g_hi_s - g_lo_s
        mid = hi - g_hi_s * (hi - lo) / denom if denom > 0.0 else 0.5 * (lo + hi)
        if not (lo < mid < hi):
            mid = 0.5 * (lo + hi)
        g_mid = phase(mid) - target
        check_monotone(g_mid)
        if abs(g_mid) < abs(best_g):
            best_eps, best_g = mid, g_mid
        if g_mid < 0.0:
            lo, g_lo, g_lo_s = mid, g_mid, g_mid
            if side == -1:
                g_hi_s *= 0.5
            side = -1
        else:
            hi, g_hi, g_hi_s = mid, g_mid, g_mid
            if side == 1:
                g_lo_s *= 0.5
            side = 1
    else:
        raise QuantizationError(
            f"quantization root did not converge for n={n}: "
            f"residual={abs(best_g)}, bracket={hi - lo}"
        )

    info = {"phase_evaluations": evals, "nr_seed": seed}
    try:
        x_lo, x_hi = turning_points(spec, best_eps)
        compton = system.units.hbar / (system.mu * system.units.c)
        info["well_width_over_compton"] = (x_hi - x_lo) / compton
    except ValueError:
        pass
    return EnergyLevel(
        n=n,
        eps=best_eps,
        mode=str(mode.value),
        residual=abs(best_g),
        bracket=hi - lo,
        info=info,
    )


def solve_spectrum(
    mode: Mode,
    system: TwoBodySystem,
    spec: PotentialSpec,
    levels,
    config: IntegrationConfig = IntegrationConfig(),
    **kwargs,
) -> list[EnergyLevel]:
    """Solve the requested levels in ascending order, seeding each bracket
    from the previous energy.  Per-level failures are collected on the
    returned entries (``error`` set, ``eps`` NaN) rather than raised.
    """
    levels = list(levels)
    if levels != sorted(levels):
        raise ValueError("levels must be sorted ascending")
    out: list[EnergyLevel] = []
    floor = None
    for n in levels:
        try:
            level = solve_level(mode, system, spec, n, config, eps_floor=floor, **kwargs)
            floor = level.eps
        except Exception as exc:
            level = EnergyLevel(
                n=n,
                eps=float("nan"),
                mode=str(mode.value),
                residual=float("nan"),
                bracket=float("nan"),
                error=f"{type(exc).__name__}: {exc}",
            )
        out.append(level)
    return out


def _sample_on_grid(mode, system, spec, eps, config, grid, a0_scale=1.0):
    """psi and phase sampled at exact grid positions via checkpointed runs.

    Returns (psi, phi) with phi measured from the left termination point.
    """
    grid = np.asarray(grid, dtype=float)
    init = _initial_state(mode, system, spec, eps, a0_scale)
    left_offsets = sorted(spec.x_min - x for x in grid[grid < spec.x_min])
    right_offsets = sorted(x - spec.x_min for x in grid[grid >= spec.x_min])
    res_left = integrate_half_axis(
        mode, system, spec, eps, init, config, -1, checkpoints=left_offsets
    )
    res_right = integrate_half_axis(
        mode, system, spec, eps, init, config, +1, checkpoints=right_offsets
    )
    n_left = len(left_offsets)
    if len(res_left.samples) != n_left or len(res_right.samples) != len(right_offsets):
        raise ValueError(
            "grid outside integrated range: integration covers "
            f"[{res_left.state.x:.6g}, {res_right.state.x:.6g}]"
        )
    phi_left_total = res_left.state.Phi
    psi = np.empty(grid.size)
    phi = np.empty(grid.size)
    for i, s in enumerate(res_left.samples):
        # Left-side samples arrive ordered outward, i.e. descending in x.
        phi[n_left - 1 - i] = phi_left_total - s.Phi
        psi[n_left - 1 - i] = s.A * math.sin(phi[n_left - 1 - i])
    for i, s in enumerate(res_right.samples):
        phi[n_left + i] = phi_left_total + s.Phi
        psi[n_left + i] = s.A * math.sin(phi[n_left + i])
    return psi, phi


def reconstruct_wavefunction(
    mode: Mode,
    system: TwoBodySystem,
    spec: PotentialSpec,
    level: EnergyLevel,
    grid,
    config: IntegrationConfig = IntegrationConfig(),
) -> np.ndarray:
    """Sample psi(x) = A(x) sin(Phi(x)) on an ascending grid.

    Phi is measured from the left termination point of the integration, so
    psi decays into both forbidden regions when ``level`` satisfies the
    quantization condition.  Grid points beyond either termination point
    raise ValueError.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-D array of positions")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly ascending")
    psi, _ = _sample_on_grid(mode, system, spec, level.eps, config, grid)
    return psi


def wavefunction_profile(
    mode: Mode,
    system: TwoBodySystem,
    spec: PotentialSpec,
    level: EnergyLevel,
    config: IntegrationConfig = IntegrationConfig(),
    points: int | None = None,
):
    """Uniform-grid sampling of (x, psi, Phi) over the trustworthy window.

    The window ends where the remaining phase on each side still exceeds
    20x the level's quantization residual; beyond that the sine argument is
    residual-dominated and the reconstructed tail would be spurious.
    """
    if points is None:
        points = max(801, 64 * (level.n + 1) + 1)
    init = _initial_state(mode, system, spec, level.eps, 1.0)
    phi_tail = 20.0 * max(
        level.residual if math.isfinite(level.residual) else 0.0, 1e-10
    )

    def _clip_offset(direction: int) -> float:
        res = integrate_half_axis(
            mode, system, spec, level.eps, init, config, direction, record_steps=True
        )
        for s in reversed(res.samples):
            if res.state.Phi - s.Phi >= phi_tail:
                return abs(s.x - spec.x_min)
        return abs(res.state.x - spec.x_min)

    off_left = _clip_offset(-1)
    off_right = _clip_offset(+1)
    x = np.linspace(spec.x_min - off_left, spec.x_min + off_right, points)
    psi, phi = _sample_on_grid(mode, system, spec, level.eps, config, x)
    return x, psi, phi


def count_nodes(samples, phases=None) -> int:
    """Count strict interior sign changes, ignoring sub-threshold tails.

    Samples with |psi| below 1e-10 of the peak are dropped before counting.
    When ``phases`` is provided, a warning is emitted if the grid is
    sparser than 20 points per phase interval of pi.
    """
    psi = np.asarray(samples, dtype=float)
    if phases is not None:
        dphi = np.diff(np.asarray(phases, dtype=float))
        if dphi.size and float(np.max(dphi)) > math.pi / 20.0:
            warnings.warn("grid sparser than 20 points per phase pi; node count is best effort")
    keep = np.abs(psi) >= 1e-10 * float(np.max(np.abs(psi)))
    trimmed = psi[keep]
    return int(np.sum(trimmed[:-1] * trimmed[1:] < 0.0))


def a0_sensitivity(
    mode: Mode,
    system: TwoBodySystem,
    spec: PotentialSpec,
    n: int,
    config: IntegrationConfig = IntegrationConfig(),
    perturbation: float = 0.1,
) -> dict:
    """Relative energy shifts when the initial amplitude is scaled by
    (1 +/- perturbation) with A'0 kept at zero.

    The NR equation is initial-condition independent in exact arithmetic, so
    the shifts measure numerical truncation only; the WP equation carries no
    such guarantee and this diagnostic reports its actual sensitivity.
    """
    base = solve_level(mode, system, spec, n, config)
    out = {"eps": base.eps, "shifts": {}}
    for scale in (1.0 - perturbation, 1.0 + perturbation):
        lvl = solve_level(mode, system, spec, n, config, a0_scale=scale)
        out["shifts"][scale] = (lvl.eps - base.eps) / max(abs(base.eps), 1e-300)
    return out
