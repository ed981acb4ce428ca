"""Shared reference data and independent oracles for the test suite.

The benchmark table is frozen here as quoted strings so each tolerance can
be derived from the printed precision (two units of the last digit).
Oracle routines deliberately avoid the production code paths: they use
mpmath arbitrary precision or textbook formulas evaluated directly.
"""

import math

import mpmath
import numpy as np

from semirel import potentials
from semirel.milne import Mode
from semirel.potentials import evaluate
from semirel.spectrum import reconstruct_wavefunction

# (n, mu, m1, exact, wave-phase, non-relativistic) with values as quoted.
BENCHMARK_TABLE = [
    (0, 5.0, 10.0, "0.222686", "0.2226", "0.224"),
    (10, 5.0, 10.0, "4.509109", "4.506", "4.7"),
    (20, 5.0, 10.0, "8.515499", "8.512", "9.2"),
    (0, 5.0, 100.0, "0.220584", "0.2202", "0.224"),
    (10, 5.0, 100.0, "4.183784", "4.174", "4.7"),
    (20, 5.0, 100.0, "7.591316", "7.580", "9.2"),
    (0, 1.0, 2.0, "0.480097", "0.476", "0.50"),
    (10, 1.0, 2.0, "7.965927", "7.914", "10.5"),
    (20, 1.0, 2.0, "13.646201", "13.59", "20.5"),
    (0, 1.0, 10.0, "0.455021", "0.442", "0.50"),
    (10, 1.0, 10.0, "6.846005", "6.749", "10.5"),
    (20, 1.0, 10.0, "11.760647", "11.66", "20.5"),
]

SYSTEMS = [(5.0, 10.0), (5.0, 100.0), (1.0, 2.0), (1.0, 10.0)]
LEVELS = [0, 10, 20]


def decimals(quoted: str) -> int:
    return len(quoted.split(".")[1]) if "." in quoted else 0


def quoted_tolerance(quoted: str) -> float:
    """Two units of the last quoted digit."""
    return 2.0 * 10.0 ** (-decimals(quoted))


def rounds_to(value: float, quoted: str) -> bool:
    return f"{value:.{decimals(quoted)}f}" == quoted


def mp_total_kinetic(m1, m2, p, c=1.0, dps=50):
    """Summed square-root energy in arbitrary precision."""
    with mpmath.workdps(dps):
        m1, m2, p, c = map(mpmath.mpf, (m1, m2, p, c))
        return float(
            mpmath.sqrt(m1**2 * c**4 + p**2 * c**2) + mpmath.sqrt(m2**2 * c**4 + p**2 * c**2)
        )


def mp_initial_amplitude_wp(m1, m2, eps, V0=0.0, hbar=1.0, c=1.0, dps=50):
    """Starting amplitude from the printed algebraic form, in arbitrary
    precision: hbar^2 c^2 / A0^4 = ((M^2 - m1^2 c^4 + m2^2 c^4)/(2M))^2 - m2^2 c^4
    with M the total energy above the well minimum and m1 >= m2."""
    with mpmath.workdps(dps):
        hi = mpmath.mpf(max(m1, m2))
        lo = mpmath.mpf(min(m1, m2))
        c = mpmath.mpf(c)
        big_m = (hi + lo) * c**2 + mpmath.mpf(eps) - mpmath.mpf(V0)
        r = ((big_m**2 - hi**2 * c**4 + lo**2 * c**4) / (2 * big_m)) ** 2 - lo**2 * c**4
        if r <= 0:
            raise ValueError("below threshold")
        return float((mpmath.mpf(hbar) ** 2 * c**2 / r) ** mpmath.mpf("0.25"))


def fd_nr_levels(spec, mu, k, half_width, n_points=6000, hbar=1.0):
    """Non-relativistic levels from a position-space finite-difference
    Hamiltonian (LAPACK tridiagonal eigensolver), Richardson-extrapolated
    over one grid doubling.  Independent of the amplitude-phase machinery.
    """
    from scipy.linalg import eigh_tridiagonal

    out = []
    for n in (n_points, 2 * n_points):
        x = np.linspace(-half_width, half_width, n)
        h = x[1] - x[0]
        diag = hbar * hbar / (mu * h * h) + evaluate(spec, x)
        off = np.full(n - 1, -hbar * hbar / (2.0 * mu * h * h))
        out.append(eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, k - 1)))
    return (4.0 * out[1] - out[0]) / 3.0


def schrodinger_residual_ratio(system, spec, level, config, points=4001):
    """Max |psi'' + k^2 psi| over the well, relative to max|psi| * 2 mu |eps| / hbar^2.

    psi'' comes from a 5-point central difference on a uniform grid spanning
    the classically allowed region plus a small margin, so the finite
    difference truncation sits far below the asserted bound.
    """
    x_lo, x_hi = potentials.turning_points(spec, level.eps)
    pad = 0.05 * (x_hi - x_lo)
    x = np.linspace(x_lo - pad, x_hi + pad, points)
    psi = reconstruct_wavefunction(Mode.NR, system, spec, level, x, config)
    h = x[1] - x[0]
    d2 = (-psi[:-4] + 16 * psi[1:-3] - 30 * psi[2:-2] + 16 * psi[3:-1] - psi[4:]) / (12 * h * h)
    inner = slice(2, -2)
    hbar2 = system.units.hbar**2
    k2 = 2.0 * system.mu * (level.eps - evaluate(spec, x[inner])) / hbar2
    residual = np.max(np.abs(d2 + k2 * psi[inner]))
    bound = np.max(np.abs(psi)) * (2.0 * system.mu * abs(level.eps) / hbar2)
    return float(residual / bound)
