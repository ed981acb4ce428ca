import pytest

from semirel import TwoBodySystem, potentials
from semirel.exact import exact_salpeter_levels
from semirel.milne import Mode
from semirel.spectrum import solve_spectrum

from oracles import LEVELS, SYSTEMS


@pytest.fixture(scope="session")
def unit_harmonic():
    return potentials.harmonic(1.0)


@pytest.fixture(scope="session")
def wp_table(unit_harmonic):
    """Wave-phase energies for the four benchmark systems at levels 0/10/20."""
    out = {}
    for mu, m1 in SYSTEMS:
        system = TwoBodySystem.from_reduced(mu, m1)
        out[(mu, m1)] = solve_spectrum(Mode.WP, system, unit_harmonic, LEVELS)
    return out


@pytest.fixture(scope="session")
def exact_table():
    """Momentum-space reference energies for the same systems and levels."""
    out = {}
    for mu, m1 in SYSTEMS:
        system = TwoBodySystem.from_reduced(mu, m1)
        out[(mu, m1)] = exact_salpeter_levels(system, 1.0, LEVELS, 1e-6)
    return out
