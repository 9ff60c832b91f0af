import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from agingforecast.errors import ConfigError
from agingforecast.reactor import (
    KineticParams,
    ProcessParams,
    SpeciesSet,
    concentrations_from_fractions,
    default_species,
    reaction_rates,
    residence_time,
)

R_SI = 8.314
R_KJ = 8.314e-3


@pytest.fixture
def species():
    return default_species()


@pytest.fixture
def kin():
    return KineticParams()


def make_params(flow=3750.0, p_bar=1.35, t_c=505.0, mu_olef=0.5):
    return ProcessParams.from_configured_units(flow, p_bar, t_c, mu_olef)


class TestSpeciesSet:
    def test_default_has_five_species_two_reactions(self, species):
        assert species.n_species == 5
        assert species.stoichiometry.shape == (5, 2)

    def test_reactions_are_mass_balanced(self, species):
        defect = species.molar_masses @ species.stoichiometry
        assert np.all(np.abs(defect) < 1e-3)

    def test_unbalanced_stoichiometry_rejected(self, species):
        bad = species.stoichiometry.copy()
        bad[2, 0] = 2.0  # two product moles out of one olefine
        with pytest.raises(ConfigError):
            SpeciesSet(species.names, species.molar_masses, bad)

    def test_wrong_species_count_rejected(self, species):
        with pytest.raises(ConfigError):
            SpeciesSet(("a", "b"), np.ones(2), np.ones((2, 2)))


class TestConcentrations:
    def test_single_species_reduces_to_ideal_gas_law(self, species):
        mu = np.zeros(5)
        mu[0] = 1.0
        c = concentrations_from_fractions(mu, 1e5, 600.0, species)
        assert c[0] == pytest.approx(1e5 / (R_SI * 600.0), rel=1e-12)
        assert np.all(c[1:] == 0.0)

    def test_zero_fraction_gives_zero_concentration(self, species):
        mu = np.array([0.5, 0.5, 0.0, 0.0, 0.0])
        c = concentrations_from_fractions(mu, 1.35e5, 778.15, species)
        assert np.all(c[2:] == 0.0)

    def test_total_concentration_matches_hand_value(self, species):
        # p/RT at 1.35 bar, 778.15 K, evaluated by hand
        mu = np.array([0.5, 0.5, 0.0, 0.0, 0.0])
        c = concentrations_from_fractions(mu, 1.35e5, 778.15, species)
        assert c.sum() == pytest.approx(20.867019723244272, rel=1e-12)

    @given(st.floats(0.01, 0.99))
    def test_concentrations_sum_to_p_over_rt(self, mu_olef):
        species = default_species()
        mu = np.array([mu_olef, 1.0 - mu_olef, 0.0, 0.0, 0.0])
        c = concentrations_from_fractions(mu, 2.0e5, 700.0, species)
        assert c.sum() == pytest.approx(2.0e5 / (R_SI * 700.0), rel=1e-12)

    def test_invalid_fractions_rejected(self, species):
        with pytest.raises(ValueError):
            concentrations_from_fractions(
                np.array([0.5, 0.4, 0.0, 0.0, 0.0]), 1e5, 600.0, species
            )
        with pytest.raises(ValueError):
            concentrations_from_fractions(
                np.array([-0.1, 1.1, 0.0, 0.0, 0.0]), 1e5, 600.0, species
            )


class TestResidenceTime:
    def test_unit_case(self, kin):
        # V=1 m^3, F=1 kg/h and inlet density 1 kg/m^3 give exactly 1 h.
        # Build a fake single-species set with M chosen so that rho = 1.
        p, t = 1.0e5, 600.0
        c_total = p / (R_SI * t)
        mass = 1.0 / c_total
        species = SpeciesSet(
            names=("olefine", "O2", "product", "CO2", "H2O"),
            molar_masses=np.array([mass, mass, 1.5 * mass, mass, mass / 3]),
            stoichiometry=np.array(
                [[-1.0, -1], [-0.5, -1], [1.0, 0], [0, 1], [0, 3.0]]
            ),
        )
        kin1 = KineticParams(volume=1.0)
        params = ProcessParams(flow_kgph=1.0, pressure_pa=p, temperature_k=t,
                               mu_olef_in=0.5)
        assert residence_time(params, species, kin1) == pytest.approx(1.0, rel=1e-9)

    def test_default_conditions_hand_value(self, species, kin):
        # rho = (p/RT) / sum(mu_k/M_k) recomputed by hand -> 9.53e-6 h
        params = make_params()
        t_res = residence_time(params, species, kin)
        assert t_res == pytest.approx(9.532112778836708e-06, rel=1e-10)

    def test_doubling_flow_halves_residence_time(self, species, kin):
        t1 = residence_time(make_params(flow=3750.0), species, kin)
        t2 = residence_time(make_params(flow=7500.0), species, kin)
        assert t2 == pytest.approx(t1 / 2.0, rel=1e-12)

    def test_zero_flow_rejected(self, species, kin):
        params = ProcessParams(flow_kgph=0.0, pressure_pa=1e5,
                               temperature_k=700.0, mu_olef_in=0.5)
        with pytest.raises(ValueError):
            residence_time(params, species, kin)


class TestReactionRates:
    def test_zero_olefine_zeroes_both_rates(self, species, kin):
        c = np.array([0.0, 10.0, 0.0, 0.0, 0.0])
        r1, r2 = reaction_rates(c, 778.15, 1.0, kin)
        assert r1 == 0.0 and r2 == 0.0

    def test_only_main_rate_scales_with_activity(self, species, kin):
        c = np.array([10.0, 10.0, 0.0, 0.0, 0.0])
        r1_full, r2_full = reaction_rates(c, 778.15, 1.0, kin)
        r1_half, r2_half = reaction_rates(c, 778.15, 0.5, kin)
        assert r1_half == pytest.approx(r1_full / 2.0, rel=1e-12)
        assert r2_half == r2_full

    def test_hand_evaluated_rates(self, species, kin):
        # independent one-line evaluations of both kinetic laws
        t, c_olef, c_o2 = 778.15, 10.0, 10.0
        want_r1 = 30000.0 * math.exp(-42.0 / (R_KJ * t)) * c_olef * c_o2
        want_r2 = 15000.0 * math.exp(-45.0 / (R_KJ * t)) * c_olef * math.sqrt(c_o2)
        r1, r2 = reaction_rates(
            np.array([c_olef, c_o2, 0.0, 0.0, 0.0]), t, 1.0, kin
        )
        assert r1 == pytest.approx(want_r1, rel=1e-12)
        assert r2 == pytest.approx(want_r2, rel=1e-12)

    def test_negative_concentration_rejected(self, kin):
        with pytest.raises(ValueError):
            reaction_rates(np.array([-1.0, 1.0, 0, 0, 0]), 700.0, 1.0, kin)


class TestKineticParams:
    def test_defaults_match_reference_table(self, kin):
        assert kin.k1 == 30000.0
        assert kin.e1 == 42.0
        assert kin.k2 == 15000.0
        assert kin.e2 == 45.0
        assert kin.ka == 2.7e-10
        assert kin.ea == 50.0
        assert kin.volume == 4.712e-2

    def test_non_positive_rejected(self):
        with pytest.raises(ConfigError):
            KineticParams(k1=-1.0)


class TestProcessParams:
    def test_o2_fraction_complements_olefine(self):
        params = make_params(mu_olef=0.475)
        assert params.mu_o2_in == pytest.approx(0.525, abs=1e-15)

    def test_unit_conversions(self):
        params = make_params(p_bar=1.35, t_c=505.0)
        assert params.pressure_pa == pytest.approx(1.35e5)
        assert params.temperature_k == pytest.approx(778.15)
        assert params.pressure_bar == pytest.approx(1.35)
        assert params.temperature_c == pytest.approx(505.0)

    def test_invalid_fraction_rejected(self):
        with pytest.raises(ConfigError):
            make_params(mu_olef=1.2)
