"""Gas mixture chemistry for the simulated oxidation process.

The modeled process is the gas-phase partial oxidation of an olefine over
a fixed catalyst bed.  Five species take part: the olefine itself, oxygen,
the oxidized product, and CO2/H2O from total combustion.  Two reactions
run in parallel:

    r1 (catalyzed):  olefine + 1/2 O2 -> product
    r2 (side):       olefine + 9/2 O2 -> 3 CO2 + 3 H2O

The default species identify the olefine with propylene and the product
with propylene oxide; both the molar masses and the stoichiometry are
configurable as long as each reaction stays mass-balanced.

Unit conventions: pressures in Pa, temperatures in K, activation energies
in kJ/mol (with the matching gas constant ``R_KJ``), concentrations in
mol/m^3, mass flows in kg/h.  Rate constants follow the power-law orders
of the two reactions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from agingforecast.errors import ConfigError

# Gas constant, kJ/(mol K) for Arrhenius factors and J/(mol K) for the
# ideal gas law.
R_KJ = 8.314e-3
R_SI = 8.314

PA_PER_BAR = 1.0e5
PA_PER_MBAR = 1.0e2
KELVIN_OFFSET = 273.15

#: tolerated mass imbalance per reaction, kg/mol
MASS_BALANCE_TOL = 1e-3


@dataclass(frozen=True)
class SpeciesSet:
    """Species names, molar masses (kg/mol) and the 5x2 stoichiometry.

    Column j of ``stoichiometry`` holds the signed mol-per-mol-extent
    coefficients of reaction j.  Species order is fixed as
    (olefine, O2, product, CO2, H2O); the inlet feed contains only the
    first two.
    """

    names: tuple[str, ...]
    molar_masses: np.ndarray
    stoichiometry: np.ndarray

    IDX_OLEFINE = 0
    IDX_O2 = 1
    IDX_PRODUCT = 2

    def __post_init__(self):
        masses = np.asarray(self.molar_masses, dtype=float)
        nu = np.asarray(self.stoichiometry, dtype=float)
        object.__setattr__(self, "molar_masses", masses)
        object.__setattr__(self, "stoichiometry", nu)
        if len(self.names) != 5 or masses.shape != (5,):
            raise ConfigError("a species set needs exactly 5 species")
        if nu.shape != (5, 2):
            raise ConfigError("stoichiometry must be 5 species x 2 reactions")
        if np.any(masses <= 0):
            raise ConfigError("molar masses must be positive")
        defect = masses @ nu
        if np.any(np.abs(defect) > MASS_BALANCE_TOL):
            raise ConfigError(
                f"reactions are not mass-balanced: defect {defect} kg/mol"
            )

    @property
    def n_species(self) -> int:
        return len(self.names)


def default_species() -> SpeciesSet:
    """Propylene / O2 / propylene oxide / CO2 / H2O with balanced reactions."""
    return SpeciesSet(
        names=("olefine", "O2", "product", "CO2", "H2O"),
        molar_masses=np.array([0.04208, 0.03200, 0.05808, 0.04401, 0.018016]),
        stoichiometry=np.array(
            [
                [-1.0, -1.0],   # olefine consumed by both reactions
                [-0.5, -4.5],   # O2
                [+1.0, 0.0],    # product, main reaction only
                [0.0, +3.0],    # CO2, combustion only
                [0.0, +3.0],    # H2O, combustion only
            ]
        ),
    )


@dataclass(frozen=True)
class KineticParams:
    """Rate constants, activation energies and reactor volume.

    Defaults reproduce the reference parameterization of the synthetic
    process.  ``k1`` has units mol/m^3/s (mol/m^3)^-2, ``k2``
    mol/m^3/s (mol/m^3)^-1.5, ``ka`` (kg/h)^-3 h^-1; energies in kJ/mol;
    ``volume`` in m^3.
    """

    k1: float = 30000.0
    e1: float = 42.0
    k2: float = 15000.0
    e2: float = 45.0
    ka: float = 2.7e-10
    ea: float = 50.0
    volume: float = 4.712e-2
    r_gas: float = R_KJ

    def __post_init__(self):
        for name in ("e1", "e2", "ea", "volume", "r_gas"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"kinetic parameter {name} must be positive")
        for name in ("k1", "k2", "ka"):
            if getattr(self, name) < 0:
                raise ConfigError(f"rate constant {name} must be non-negative")

    def arrhenius(self, pre: float, energy: float, temperature_k: float) -> float:
        return pre * np.exp(-energy / (self.r_gas * temperature_k))


@dataclass(frozen=True)
class ProcessParams:
    """One operating point: flow, pressure, temperature, inlet fractions.

    Stored in SI-ish working units (Pa, K); constructors from the
    configured units (bar, Celsius) are provided.  The inlet consists of
    olefine and oxygen only, so ``mu_o2_in = 1 - mu_olef_in``.
    """

    flow_kgph: float
    pressure_pa: float
    temperature_k: float
    mu_olef_in: float
    mu_o2_in: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.mu_o2_in is None:
            object.__setattr__(self, "mu_o2_in", 1.0 - self.mu_olef_in)
        if self.flow_kgph < 0:
            raise ConfigError("total mass flow must be non-negative")
        if self.pressure_pa <= 0 or self.temperature_k <= 0:
            raise ConfigError("pressure and temperature must be positive")
        if not 0.0 <= self.mu_olef_in <= 1.0:
            raise ConfigError("inlet olefine fraction must lie in [0, 1]")
        if abs(self.mu_olef_in + self.mu_o2_in - 1.0) > 1e-12:
            raise ConfigError("inlet fractions must sum to 1")

    @classmethod
    def from_configured_units(
        cls, flow_kgph: float, pressure_bar: float, temperature_c: float,
        mu_olef_in: float,
    ) -> "ProcessParams":
        return cls(
            flow_kgph=flow_kgph,
            pressure_pa=pressure_bar * PA_PER_BAR,
            temperature_k=temperature_c + KELVIN_OFFSET,
            mu_olef_in=mu_olef_in,
        )

    @property
    def pressure_bar(self) -> float:
        return self.pressure_pa / PA_PER_BAR

    @property
    def temperature_c(self) -> float:
        return self.temperature_k - KELVIN_OFFSET

    def inlet_fractions(self, species: SpeciesSet) -> np.ndarray:
        mu = np.zeros(species.n_species)
        mu[SpeciesSet.IDX_OLEFINE] = self.mu_olef_in
        mu[SpeciesSet.IDX_O2] = self.mu_o2_in
        return mu


def concentrations_from_fractions(
    mu: np.ndarray, pressure_pa: float, temperature_k: float,
    species: SpeciesSet,
) -> np.ndarray:
    """Convert mass fractions to molar concentrations (ideal gas).

    c_i = (p / R T) * (mu_i / M_i) / sum_k(mu_k / M_k); the concentrations
    therefore sum to p/(R T) exactly.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.shape[-1] != species.n_species:
        raise ValueError("fraction vector length does not match species set")
    if np.any(mu < 0):
        raise ValueError("mass fractions must be non-negative")
    if np.any(np.abs(mu.sum(axis=-1) - 1.0) > 1e-9):
        raise ValueError("mass fractions must sum to 1")
    if pressure_pa <= 0 or temperature_k <= 0:
        raise ValueError("pressure and temperature must be positive")
    mols = mu / species.molar_masses
    total = mols.sum(axis=-1, keepdims=True)
    if np.any(total <= 0):
        raise ValueError("zero total molar content")
    c_total = pressure_pa / (R_SI * temperature_k)
    return c_total * mols / total


def mixture_density(c: np.ndarray, species: SpeciesSet) -> float:
    """Mass density (kg/m^3) of a concentration vector."""
    return float(np.asarray(c) @ species.molar_masses)


def residence_time(
    params: ProcessParams, species: SpeciesSet, kin: KineticParams,
) -> float:
    """Residence time in hours: t_res = (V / F) * sum_i c_i_in * M_i.

    The sum is the inlet gas density, so this is reactor volume times
    density over total mass flow.
    """
    if params.flow_kgph <= 0:
        raise ValueError("residence time requires a positive total mass flow")
    c_in = concentrations_from_fractions(
        params.inlet_fractions(species), params.pressure_pa,
        params.temperature_k, species,
    )
    t_res = kin.volume / params.flow_kgph * mixture_density(c_in, species)
    if not np.isfinite(t_res) or t_res <= 0:
        raise ValueError(f"non-finite or non-positive residence time {t_res}")
    return float(t_res)


def reaction_rates(
    c: np.ndarray, temperature_k: float, activity: float, kin: KineticParams,
) -> tuple[float, float]:
    """Volumetric rates (mol/m^3/s) of the main and side reaction.

    Only the main reaction is catalyzed: r1 scales linearly with the
    catalyst activity, r2 does not.
    """
    c = np.asarray(c, dtype=float)
    if np.any(c < 0):
        raise ValueError("negative concentration")
    if not 0.0 < activity <= 1.0:
        raise ValueError("activity must lie in (0, 1]")
    c_olef = c[..., SpeciesSet.IDX_OLEFINE]
    c_o2 = c[..., SpeciesSet.IDX_O2]
    r1 = activity * kin.arrhenius(kin.k1, kin.e1, temperature_k) * c_olef * c_o2
    r2 = kin.arrhenius(kin.k2, kin.e2, temperature_k) * c_olef * np.sqrt(c_o2)
    return float(r1), float(r2)
