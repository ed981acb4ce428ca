"""Exact reference spectra: analytic non-relativistic and momentum-space
semi-relativistic solvers for the harmonic well.

In the momentum representation the harmonic problem
    [W(p) - (beta hbar^2 / 2) d^2/dp^2] phi = M phi
is local, so a 3-point central difference on a symmetric grid with
Dirichlet truncation yields a real symmetric tridiagonal matrix whose
lowest eigenvalues converge at second order in the spacing.  Eigenvalues
are extracted deterministically by Sturm-sequence bisection (counting sign
agreements of the leading-minor recurrence), and the grid is refined by
doubling with Richardson extrapolation until the requested accuracy holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import NATURAL_UNITS, TwoBodySystem, UnitSystem, dynamic_kinetic, total_kinetic
from .spectrum import EnergyLevel

__all__ = [
    "MomentumGrid",
    "SymmetricTridiagonal",
    "ExactConvergenceError",
    "nr_harmonic_spectrum",
    "build_momentum_hamiltonian",
    "tridiagonal_eigenvalues",
    "tridiagonal_eigenvector",
    "exact_salpeter_levels",
]


class ExactConvergenceError(RuntimeError):
    """Grid refinement exhausted its budget; carries the best estimate."""

    def __init__(self, message: str, best=None, achieved=None):
        super().__init__(message)
        self.best = best
        self.achieved = achieved


def nr_harmonic_spectrum(mu: float, beta: float, n: int, units: UnitSystem = NATURAL_UNITS) -> float:
    """Analytic non-relativistic level hbar sqrt(beta/mu) (n + 1/2)."""
    if mu <= 0.0 or beta <= 0.0:
        raise ValueError("mu and beta must be positive")
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n!r}")
    return units.hbar * math.sqrt(beta / mu) * (n + 0.5)


@dataclass(frozen=True)
class MomentumGrid:
    """Uniform symmetric grid of N interior points on (-P, P).

    The endpoints +/-P are the Dirichlet boundary and are excluded; the
    spacing is h = 2P/(N+1).
    """

    P: float
    N: int

    def __post_init__(self):
        if not (self.P > 0.0 and math.isfinite(self.P)):
            raise ValueError(f"P must be positive and finite, got {self.P!r}")
        if self.N < 3:
            raise ValueError(f"need at least 3 interior points, got {self.N!r}")

    @property
    def h(self) -> float:
        return 2.0 * self.P / (self.N + 1)

    @property
    def points(self) -> np.ndarray:
        return -self.P + self.h * np.arange(1, self.N + 1)


@dataclass(frozen=True)
class SymmetricTridiagonal:
    """Main diagonal and first off-diagonal of a real symmetric matrix."""

    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float)
        off = np.asarray(self.off, dtype=float)
        if diag.ndim != 1 or off.ndim != 1 or off.size != diag.size - 1:
            raise ValueError("need diag of length N and off of length N-1")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "off", off)

    @property
    def n(self) -> int:
        return self.diag.size


def build_momentum_hamiltonian(
    system: TwoBodySystem,
    beta: float,
    grid: MomentumGrid,
    kinetic=None,
) -> SymmetricTridiagonal:
    """Discretize [W(p) - (beta hbar^2 / 2) d^2/dp^2] on the grid.

    diag_i = W(p_i) + beta hbar^2 / h^2,  off_i = -beta hbar^2 / (2 h^2).
    ``kinetic`` overrides W(p) (vectorized callable); the default is the
    summed square-root energy, and e.g. the non-relativistic surrogate
    m c^2 + p^2/(2 mu) can be substituted for validation.
    """
    if beta < 0.0 or not math.isfinite(beta):
        raise ValueError(f"beta must be non-negative and finite, got {beta!r}")
    w = kinetic if kinetic is not None else (lambda p: total_kinetic(system, p))
    hbar = system.units.hbar
    stiff = beta * hbar * hbar / (grid.h * grid.h)
    diag = np.asarray(w(grid.points), dtype=float) + stiff
    off = np.full(grid.N - 1, -0.5 * stiff)
    return SymmetricTridiagonal(diag, off)


def _sturm_counts(diag_head, diag_tail, off2, shifts, pivmin: float) -> np.ndarray:
    """Number of eigenvalues strictly below each shift.

    Runs the LDL^T pivot recurrence d_i = (a_i - shift) - b_{i-1}^2 / d_{i-1}
    and counts negative pivots; vanishing pivots are replaced by -pivmin as
    in LAPACK's bisection.  ``diag_tail`` and ``off2`` are plain lists (a
    scalar loop beats per-row numpy dispatch for the few shifts needed
    here).
    """
    neg = -pivmin
    counts = []
    for s in shifts:
        d = diag_head - s
        if neg < d < pivmin:
            d = neg
        cnt = 1 if d < 0.0 else 0
        for a, b2 in zip(diag_tail, off2):
            d = a - s - b2 / d
            if neg < d < pivmin:
                d = neg
            if d < 0.0:
                cnt += 1
        counts.append(cnt)
    return np.array(counts, dtype=np.int64)


def _selected_eigenvalues(
    T: SymmetricTridiagonal,
    indices: np.ndarray,
    rtol: float = 1e-12,
    bounds=None,
) -> np.ndarray:
    """Eigenvalues of the given (ascending) indices by Sturm bisection.

    ``bounds`` may carry per-index (lo, hi) arrays from a previous grid; any
    warm bound that no longer brackets its eigenvalue falls back to the
    Gershgorin interval.  Bisection is deterministic, so repeated calls give
    identical results.
    """
    diag, off = T.diag, T.off
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size == 0:
        return np.empty(0)
    if np.any(indices < 0) or np.any(indices >= T.n) or np.any(np.diff(indices) <= 0):
        raise ValueError("indices must be ascending and within [0, N)")
    off2_arr = off * off
    pivmin = np.finfo(float).tiny * max(1.0, float(off2_arr.max(initial=0.0)))
    diag_head = float(diag[0])
    diag_tail = diag[1:].tolist()
    off2 = off2_arr.tolist()

    def counts_at(shifts):
        return _sturm_counts(diag_head, diag_tail, off2, shifts, pivmin)

    radius = np.zeros(T.n)
    radius[:-1] += np.abs(off)
    radius[1:] += np.abs(off)
    g_lo = float(np.min(diag - radius))
    g_hi = float(np.max(diag + radius))
    lo = np.full(indices.size, g_lo)
    hi = np.full(indices.size, g_hi)
    if bounds is not None:
        warm_lo, warm_hi = bounds
        ok = (counts_at(warm_lo) <= indices) & (counts_at(warm_hi) >= indices + 1)
        lo = np.where(ok, warm_lo, lo)
        hi = np.where(ok, warm_hi, hi)

    for _ in range(300):
        width = hi - lo
        tol = rtol * np.maximum(np.abs(lo), np.abs(hi))
        active = width > tol
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        counts = counts_at(mid[active])
        below = np.zeros(indices.size, dtype=bool)
        below[active] = counts >= indices[active] + 1
        hi = np.where(active & below, mid, hi)
        lo = np.where(active & ~below, mid, lo)
    return 0.5 * (lo + hi)


def tridiagonal_eigenvalues(T: SymmetricTridiagonal, k: int, rtol: float = 1e-12) -> np.ndarray:
    """Lowest k eigenvalues, ascending, each to relative precision ``rtol``."""
    if not (1 <= k <= T.n):
        raise ValueError(f"k must lie in [1, {T.n}], got {k!r}")
    return _selected_eigenvalues(T, np.arange(k), rtol=rtol)


def tridiagonal_eigenvector(T: SymmetricTridiagonal, eigenvalue: float, sweeps: int = 3) -> np.ndarray:
    """Eigenvector by inverse iteration at an already-converged eigenvalue.

    The tridiagonal solve uses the Thomas recurrence with a tiny pivot guard;
    near-singularity amplifies exactly the wanted direction.  Deterministic
    start vector.
    """
    n = T.n
    diag = T.diag - (eigenvalue + 1e-13 * max(1.0, abs(eigenvalue)))
    off = T.off
    tiny = np.finfo(float).tiny * max(1.0, float(np.max(np.abs(diag))))
    v = np.random.default_rng(0).standard_normal(n)
    v /= np.max(np.abs(v))
    for _ in range(sweeps):
        cp = np.empty(n - 1)
        dp = np.empty(n)
        d0 = diag[0] if abs(diag[0]) > tiny else tiny
        cp[0] = off[0] / d0
        dp[0] = v[0] / d0
        for i in range(1, n):
            den = diag[i] - off[i - 1] * cp[i - 1]
            if abs(den) < tiny:
                den = tiny
            if i < n - 1:
                cp[i] = off[i] / den
            dp[i] = (v[i] - off[i - 1] * dp[i - 1]) / den
        w = np.empty(n)
        w[-1] = dp[-1]
        for i in range(n - 2, -1, -1):
            w[i] = dp[i] - cp[i] * w[i + 1]
        v = w / np.max(np.abs(w))
    return v


def _classical_momentum(system: TwoBodySystem, energy_above_rest: float) -> float:
    """p solving total_kinetic(p) = m c^2 + energy_above_rest, by bisection."""
    target = system.rest_energy + energy_above_rest
    hi = 1.0
    while total_kinetic(system, hi) < target:
        hi *= 2.0
        if hi > 1e30:
            raise ValueError("classical momentum search diverged")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if total_kinetic(system, mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def exact_salpeter_levels(
    system: TwoBodySystem,
    beta: float,
    levels,
    accuracy: float = 1e-6,
    *,
    initial_points: int = 2000,
    max_refinements: int = 8,
    tail_threshold: float = 1e-10,
) -> list[EnergyLevel]:
    """Semi-relativistic harmonic levels eps_n = M_n - m c^2 by grid refinement.

    The half-extent P is sized from the classical momentum at 1.5x the
    highest non-relativistic estimate (with a safety factor of 6); N starts
    at ``initial_points`` and doubles until successive Richardson-extrapolated
    eigenvalues agree within ``accuracy`` for every requested level.  A
    posteriori, the top requested eigenvector must decay below
    ``tail_threshold`` of its peak at the grid edge, otherwise P grows and
    refinement restarts.
    """
    levels = [int(n) for n in levels]
    if levels != sorted(levels) or (levels and levels[0] < 0):
        raise ValueError("levels must be ascending non-negative integers")
    if not levels:
        return []
    if accuracy < 1e-7:
        raise ValueError(f"accuracy must be >= 1e-7, got {accuracy!r}")
    if beta <= 0.0:
        raise ValueError("the momentum-space solver needs a harmonic stiffness beta > 0")

    units = system.units
    n_top = levels[-1]
    eps_nr_top = nr_harmonic_spectrum(system.mu, beta, n_top, units)
    p_cl = _classical_momentum(system, 1.5 * eps_nr_top)
    P = 6.0 * max(p_cl, math.sqrt(2.0 * system.mu * eps_nr_top))
    indices = np.array(levels, dtype=np.int64)

    # Building the matrix from W - m c^2 shifts every eigenvalue by the rest
    # energy exactly, so the bisection returns eps_n directly and no
    # cancellation occurs when the rest energy dominates.
    dyn = lambda p: dynamic_kinetic(system, p)

    for _ in range(4):  # P enlargement attempts
        N = initial_points
        prev_raw = None
        prev_rich = None
        bounds = None
        raw_deltas: list[np.ndarray] = []
        rich_delta = None
        history: list[dict] = []
        converged = False
        for refinement in range(max_refinements + 1):
            grid = MomentumGrid(P, N)
            T = build_momentum_hamiltonian(system, beta, grid, kinetic=dyn)
            raw = _selected_eigenvalues(T, indices, bounds=bounds)
            entry = {"N": N, "raw": raw}
            if prev_raw is not None:
                delta = np.abs(raw - prev_raw)
                raw_deltas.append(delta)
                rich = (4.0 * raw - prev_raw) / 3.0
                entry["richardson"] = rich
                if prev_rich is not None:
                    rich_delta = np.abs(rich - prev_rich)
                    entry["richardson_delta"] = rich_delta
                    if float(np.max(rich_delta)) < accuracy:
                        converged = True
                prev_rich = rich
            history.append(entry)
            if converged:
                break
            margin = 0.05 * np.maximum(1.0, np.abs(raw))
            if raw_deltas:
                margin = np.minimum(margin, 8.0 * raw_deltas[-1] + 1e-9)
            bounds = (raw - margin, raw + margin)
            prev_raw = raw
            N *= 2
        if not converged:
            raise ExactConvergenceError(
                f"not converged after {max_refinements} grid doublings "
                f"(best delta {float(np.max(rich_delta)) if rich_delta is not None else math.inf:g})",
                best=prev_rich,
                achieved=rich_delta,
            )

        # Dirichlet-truncation validity: the hardest requested eigenfunction
        # must be negligible at the grid edge.
        vec = tridiagonal_eigenvector(T, raw[-1])
        tail = max(abs(vec[0]), abs(vec[-1])) / float(np.max(np.abs(vec)))
        if tail < tail_threshold:
            break
        P *= 1.5
    else:
        raise ExactConvergenceError(
            f"momentum-grid tail check kept failing (last fraction {tail:g})"
        )

    doubling_ratios = [
        [float(a / b) if b > 0 else math.inf for a, b in zip(d1, d2)]
        for d1, d2 in zip(raw_deltas, raw_deltas[1:])
    ]
    out = []
    eps_final = prev_rich
    for j, n in enumerate(levels):
        out.append(
            EnergyLevel(
                n=n,
                eps=float(eps_final[j]),
                mode="exact",
                residual=float(rich_delta[j]),
                bracket=float(raw_deltas[-1][j]),
                info={
                    "grid_points": N,
                    "half_extent": P,
                    "tail_fraction": float(tail),
                    "raw_deltas": [float(d[j]) for d in raw_deltas],
                    "doubling_ratios": [r[j] for r in doubling_ratios],
                },
            )
        )
    if any(later.eps <= earlier.eps for earlier, later in zip(out, out[1:])):
        raise ExactConvergenceError("eigenvalues not strictly increasing; refinement failed")
    return out
