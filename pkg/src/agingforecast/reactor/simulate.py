"""Degradation-cycle simulation and synthetic dataset generation.

The generator runs the mechanistic model hour by hour:

1. start a cycle with full catalyst activity,
2. sample an operating point (random walk on a 6-value grid per parameter),
3. hold it for a random integer number of hours between 1 and 24,
4. for each hour: integrate the reactor kinetics over the residence time,
   record the hourly observation, end the cycle once conversion falls
   below the end-of-run threshold, otherwise advance the deactivation ODE
   by one hour,
5. sample the next operating point and repeat.

The parameter random walk continues across cycle boundaries; only the
catalyst activity resets.  Everything is driven by a single seed, so a
generation run is a pure function of its configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from agingforecast.data.cycles import (
    Cycle,
    CycleDataset,
    SYNTHETIC_INPUT_COLUMNS,
    SYNTHETIC_TARGET_COLUMNS,
)
from agingforecast.errors import ConfigError, SimulationError
from agingforecast.reactor._kernels import plugflow_batch
from agingforecast.reactor.chemistry import (
    KELVIN_OFFSET,
    KineticParams,
    PA_PER_MBAR,
    ProcessParams,
    SpeciesSet,
    concentrations_from_fractions,
    default_species,
    mixture_density,
    residence_time,
)

SECONDS_PER_HOUR = 3600.0
HOURS_PER_YEAR = 8760.0

#: floor for the (dimensionless) catalyst activity
MIN_ACTIVITY = 1e-3


@dataclass(frozen=True)
class ReactorState:
    """Hidden simulator state between hourly records."""

    activity: float
    params: ProcessParams
    time_on_stream: float = 0.0
    cycle_index: int = 0
    cumulative_olefine_feed: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.activity <= 1.0:
            raise ValueError(f"activity {self.activity} outside (0, 1]")
        if self.time_on_stream < 0 or self.cumulative_olefine_feed < 0:
            raise ValueError("time on stream and cumulative feed must be >= 0")


@dataclass(frozen=True)
class SimRecord:
    """One hourly observation: process conditions plus conversion and
    selectivity, all in working units (Pa, K, mass fractions)."""

    pressure_pa: float
    temperature_k: float
    flow_kgph: float
    mu_olef_in: float
    mu_o2_in: float
    time_on_stream: int
    conversion: float
    selectivity: float

    def __post_init__(self):
        if not 0.0 <= self.conversion <= 1.0:
            raise ValueError(f"conversion {self.conversion} outside [0, 1]")
        if not (0.0 <= self.selectivity <= 1.0 or math.isnan(self.selectivity)):
            raise ValueError(f"selectivity {self.selectivity} outside [0, 1]")


@dataclass(frozen=True)
class PlugFlowResult:
    """Outlet state of one plug-flow integration."""

    concentrations: np.ndarray     # mol/m^3
    mass_fractions: np.ndarray
    mass_flows: np.ndarray         # kg/h, sums to the inlet flow
    clamp_events: int              # substeps clipped at zero concentration


# ---------------------------------------------------------------------------
# parameter sampling

@dataclass(frozen=True)
class ParameterRanges:
    """Admissible ranges of the four operating parameters, in configured
    units (kg/h, bar, degC, mass fraction).  Each parameter lives on a
    grid of ``grid_points`` equidistant values spanning its range."""

    flow: tuple[float, float] = (3500.0, 4000.0)
    pressure: tuple[float, float] = (1.25, 1.45)
    temperature: tuple[float, float] = (500.0, 510.0)
    mu_olef: tuple[float, float] = (0.475, 0.525)
    grid_points: int = 6

    def __post_init__(self):
        for name in ("flow", "pressure", "temperature", "mu_olef"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ConfigError(f"range {name} must satisfy lo < hi")
        if self.grid_points < 2:
            raise ConfigError("need at least 2 grid points")

    def items(self):
        return (
            ("flow", *self.flow),
            ("pressure", *self.pressure),
            ("temperature", *self.temperature),
            ("mu_olef", *self.mu_olef),
        )


def snap_to_grid(x: float, lo: float, hi: float, points: int = 6) -> float:
    """Round to the nearest of ``points`` equidistant values in [lo, hi].

    Values outside the range are clipped first; an exact midpoint rounds
    to the lower grid value.
    """
    step = (hi - lo) / (points - 1)
    x = min(max(x, lo), hi)
    idx = math.ceil((x - lo) / step - 0.5)
    idx = min(max(idx, 0), points - 1)
    return lo + idx * step


def gaussian_walk_step(prev: float, lo: float, hi: float, rng) -> float:
    """Raw (unclipped, unrounded) walk proposal: N(prev, (hi-lo)/10)."""
    return float(rng.normal(prev, (hi - lo) / 10.0))


def sample_process_params(
    prev: ProcessParams | None, rng, ranges: ParameterRanges | None = None,
) -> ProcessParams:
    """Draw the next operating point.

    Without a previous point each parameter is drawn uniformly from its
    range; afterwards it takes a Gaussian step (sigma = range/10) from the
    previous value.  Draws are clipped to the range and snapped to the
    6-value grid.  Draw order is fixed: flow, pressure, temperature,
    olefine fraction.
    """
    ranges = ranges or ParameterRanges()
    prev_values = None
    if prev is not None:
        prev_values = {
            "flow": prev.flow_kgph,
            "pressure": prev.pressure_bar,
            "temperature": prev.temperature_c,
            "mu_olef": prev.mu_olef_in,
        }
    out = {}
    for name, lo, hi in ranges.items():
        if prev_values is None:
            raw = float(rng.uniform(lo, hi))
        else:
            raw = gaussian_walk_step(prev_values[name], lo, hi, rng)
        out[name] = snap_to_grid(raw, lo, hi, ranges.grid_points)
    return ProcessParams.from_configured_units(
        flow_kgph=out["flow"],
        pressure_bar=out["pressure"],
        temperature_c=out["temperature"],
        mu_olef_in=out["mu_olef"],
    )


# ---------------------------------------------------------------------------
# reactor integration

def _rate_prefactors(temperature_k: float, kin: KineticParams) -> tuple[float, float]:
    """Arrhenius factors of both reactions at fixed temperature (activity
    excluded; the main reaction is multiplied by it later)."""
    return (
        kin.arrhenius(kin.k1, kin.e1, temperature_k),
        kin.arrhenius(kin.k2, kin.e2, temperature_k),
    )


def _integrate_concentrations(
    c_in: np.ndarray,
    activities: np.ndarray,
    temperature_k: float,
    t_res_hours: float,
    species: SpeciesSet,
    kin: KineticParams,
    substeps: int,
) -> tuple[np.ndarray, int]:
    """Fixed-step RK4 of dc/dt = nu . r(c) over the residence time.

    Batched over activity values sharing the same inlet state (the
    hourly intervals of one constant-parameter window).  Returns outlet
    concentrations of shape (len(activities), n_species) and the number
    of substeps that needed a zero clamp.  See ``_kernels`` for how the
    oxygen slot is propagated.
    """
    a1, a2 = _rate_prefactors(temperature_k, kin)
    act = np.ascontiguousarray(activities, dtype=float)
    c_out, clamps = plugflow_batch(
        np.ascontiguousarray(c_in, dtype=float),
        act,
        a1,
        a2,
        np.ascontiguousarray(species.stoichiometry[:, 0]),
        np.ascontiguousarray(species.stoichiometry[:, 1]),
        SpeciesSet.IDX_OLEFINE,
        SpeciesSet.IDX_O2,
        t_res_hours * SECONDS_PER_HOUR,
        substeps,
    )
    if not np.isfinite(c_out).all():
        raise SimulationError(
            "plug-flow integration produced non-finite concentrations",
            state=c_out,
        )
    return c_out, int(clamps)


def _outlet_flows(
    c_out: np.ndarray, flow_kgph: float, species: SpeciesSet,
) -> tuple[np.ndarray, np.ndarray]:
    """Outlet mass fractions and flows from outlet concentrations.

    mu_i = M_i c_i / sum_k M_k c_k and F_i = mu_i F; the total outlet
    flow equals the (conserved) inlet flow by construction.
    """
    weighted = c_out * species.molar_masses
    density = weighted.sum(axis=-1, keepdims=True)
    mu_out = weighted / density
    return mu_out, mu_out * flow_kgph


def integrate_plug_flow(
    params: ProcessParams,
    activity: float,
    species: SpeciesSet | None = None,
    kin: KineticParams | None = None,
    substeps: int = 256,
) -> PlugFlowResult:
    """Integrate one hourly interval's reactor pass at fixed conditions."""
    species = species or default_species()
    kin = kin or KineticParams()
    if not 0.0 < activity <= 1.0:
        raise ValueError(f"activity {activity} outside (0, 1]")
    c_in = concentrations_from_fractions(
        params.inlet_fractions(species), params.pressure_pa, params.temperature_k,
        species,
    )
    t_res = residence_time(params, species, kin)
    c_out, clamps = _integrate_concentrations(
        c_in, np.array([activity]), params.temperature_k, t_res, species, kin,
        substeps,
    )
    mu_out, flows = _outlet_flows(c_out, params.flow_kgph, species)
    return PlugFlowResult(
        concentrations=c_out[0],
        mass_fractions=mu_out[0],
        mass_flows=flows[0],
        clamp_events=clamps,
    )


def selectivity_conversion(
    c_in: np.ndarray, c_out: np.ndarray,
) -> tuple[float, float]:
    """Selectivity and conversion from inlet/outlet concentrations.

    C = (c_olef_in - c_olef_out) / c_olef_in and
    S = c_product_out / (c_olef_in - c_olef_out), clamped to [0, 1].
    With zero consumed olefine the selectivity is undefined and returned
    as NaN (with C = 0) rather than a silent 0/0.
    """
    c_in = np.asarray(c_in, dtype=float)
    c_out = np.asarray(c_out, dtype=float)
    olef_in = c_in[SpeciesSet.IDX_OLEFINE]
    if olef_in <= 0:
        raise ValueError("inlet olefine concentration must be positive")
    consumed = olef_in - c_out[SpeciesSet.IDX_OLEFINE]
    conversion = consumed / olef_in
    if consumed == 0.0:
        return math.nan, 0.0
    selectivity = c_out[SpeciesSet.IDX_PRODUCT] / consumed
    return float(min(max(selectivity, 0.0), 1.0)), float(conversion)


def step_activity(
    state: ReactorState,
    dt: float = 1.0,
    kin: KineticParams | None = None,
    substeps: int = 32,
    min_activity: float = MIN_ACTIVITY,
) -> float:
    """Advance the deactivation ODE dA/dt = -kA e^(-EA/RT) (mu_O2 F)^3 A^-5.

    Fixed-step RK4 over ``dt`` hours in the variable w = A^6, whose rate
    dw/dt = -6 kA e^(-EA/RT) (mu_O2 F)^3 is constant (RK4 reproduces it
    exactly, so the result does not depend on the substep count and the
    A^-5 blow-up near the end of a cycle cannot destabilize the step).
    Each substep result is clamped to [min_activity, previous value]:
    the returned activity is monotonically non-increasing with a hard
    floor.
    """
    kin = kin or KineticParams()
    if dt <= 0:
        raise ValueError("dt must be positive")
    p = state.params
    coeff = kin.arrhenius(kin.ka, kin.ea, p.temperature_k)
    coeff *= (p.mu_o2_in * p.flow_kgph) ** 3
    if coeff == 0.0:
        return state.activity

    w = state.activity ** 6
    w_min = min_activity ** 6
    h = dt / substeps
    for _ in range(substeps):
        # all four RK4 stages of the constant RHS coincide
        w = max(w - 6.0 * coeff * h, w_min)
    return float(min(max(w ** (1.0 / 6.0), min_activity), state.activity))


# ---------------------------------------------------------------------------
# dataset generation

@dataclass(frozen=True)
class GenerationConfig:
    """Everything a generation run depends on.

    Exactly one stop criterion is required: ``max_cycles`` or
    ``horizon_years`` (whichever is reached first wins if both are set).
    """

    seed: int
    max_cycles: int | None = None
    horizon_years: float | None = 50.0
    ranges: ParameterRanges = field(default_factory=ParameterRanges)
    kinetics: KineticParams = field(default_factory=KineticParams)
    species: SpeciesSet = field(default_factory=default_species)
    rk4_substeps: int = 256
    activity_substeps: int = 32
    eor_conversion: float = 0.75
    cycle_hard_cap_hours: int = 10_000

    def __post_init__(self):
        if self.max_cycles is None and self.horizon_years is None:
            raise ConfigError("set max_cycles and/or horizon_years")
        if self.max_cycles is not None and self.max_cycles < 1:
            raise ConfigError("max_cycles must be >= 1")
        if self.horizon_years is not None and self.horizon_years <= 0:
            raise ConfigError("horizon_years must be positive")
        if self.rk4_substeps < 1 or self.activity_substeps < 1:
            raise ConfigError("substep counts must be >= 1")
        if not 0.0 < self.eor_conversion < 1.0:
            raise ConfigError("eor_conversion must lie in (0, 1)")


@dataclass
class GenerationResult:
    """Generated cycles plus hidden-state traces and integrity stats."""

    records: list[list[SimRecord]]
    activities: list[np.ndarray]
    max_rel_mass_flow_error: float
    clamp_events: int
    config: GenerationConfig

    @property
    def n_cycles(self) -> int:
        return len(self.records)

    @property
    def cycle_lengths(self) -> np.ndarray:
        return np.array([len(r) for r in self.records], dtype=int)

    def to_cycle_dataset(self) -> CycleDataset:
        """Convert to the CSV-layer schema (mbar, degC, kg/h, percent)."""
        cycles = []
        for cid, recs in enumerate(self.records):
            inputs = np.array(
                [
                    [
                        r.pressure_pa / PA_PER_MBAR,
                        r.temperature_k - KELVIN_OFFSET,
                        r.flow_kgph,
                        r.mu_olef_in * 100.0,
                        r.mu_o2_in * 100.0,
                        float(r.time_on_stream),
                    ]
                    for r in recs
                ]
            )
            targets = np.array(
                [[r.conversion * 100.0, r.selectivity * 100.0] for r in recs]
            )
            cycles.append(Cycle(cycle_id=cid, inputs=inputs, targets=targets))
        return CycleDataset(
            cycles=tuple(cycles),
            input_columns=SYNTHETIC_INPUT_COLUMNS,
            target_columns=SYNTHETIC_TARGET_COLUMNS,
        )


def generate_dataset(config: GenerationConfig) -> GenerationResult:
    """Run the generation loop; deterministic for a fixed config.

    RNG draw order per constant-parameter window: the four parameter
    draws (flow, pressure, temperature, olefine fraction), then the
    window duration (integer hours in [1, 24]).  The walk persists across
    cycle boundaries.
    """
    species, kin = config.species, config.kinetics
    rng = np.random.default_rng(config.seed)
    horizon_hours = (
        None if config.horizon_years is None
        else config.horizon_years * HOURS_PER_YEAR
    )

    records: list[list[SimRecord]] = []
    activities: list[np.ndarray] = []
    cur_records: list[SimRecord] = []
    cur_activities: list[float] = []
    total_hours = 0
    max_mass_err = 0.0
    clamp_events = 0

    params: ProcessParams | None = None
    state = None  # ReactorState once params exist

    def finish_cycle():
        nonlocal cur_records, cur_activities
        records.append(cur_records)
        activities.append(np.array(cur_activities))
        cur_records, cur_activities = [], []

    while True:
        params = sample_process_params(params, rng, config.ranges)
        duration = int(rng.integers(1, 25))
        if state is None:
            state = ReactorState(activity=1.0, params=params)
        else:
            state = replace(state, params=params)

        c_in = concentrations_from_fractions(
            params.inlet_fractions(species), params.pressure_pa,
            params.temperature_k, species,
        )
        t_res = residence_time(params, species, kin)

        # Activity trajectory over the window; entry h is used for hour h.
        window_acts = [state.activity]
        for _ in range(duration - 1):
            window_acts.append(
                step_activity(
                    replace(state, activity=window_acts[-1]),
                    1.0, kin, config.activity_substeps,
                )
            )
        act_arr = np.array(window_acts)

        try:
            c_out, clamps = _integrate_concentrations(
                c_in, act_arr, params.temperature_k, t_res, species, kin,
                config.rk4_substeps,
            )
        except SimulationError as err:
            raise SimulationError(str(err), state=state) from err
        clamp_events += clamps

        mu_out, flows = _outlet_flows(c_out, params.flow_kgph, species)
        i_olef = SpeciesSet.IDX_OLEFINE
        consumed = c_in[i_olef] - c_out[:, i_olef]
        conversion = consumed / c_in[i_olef]
        if np.any(consumed <= 0.0):
            raise SimulationError(
                "no olefine consumed: selectivity undefined "
                "(degenerate kinetics configuration)", state=state,
            )
        selectivity = np.clip(
            c_out[:, SpeciesSet.IDX_PRODUCT] / consumed, 0.0, 1.0
        )
        mass_err = np.abs(flows.sum(axis=1) - params.flow_kgph) / params.flow_kgph
        max_mass_err = max(max_mass_err, float(mass_err.max()))

        ended = conversion < config.eor_conversion
        end_at = int(np.argmax(ended)) if ended.any() else duration - 1
        hours_used = end_at + 1 if ended.any() else duration

        t0 = len(cur_records)
        for h in range(hours_used):
            cur_records.append(
                SimRecord(
                    pressure_pa=params.pressure_pa,
                    temperature_k=params.temperature_k,
                    flow_kgph=params.flow_kgph,
                    mu_olef_in=params.mu_olef_in,
                    mu_o2_in=params.mu_o2_in,
                    time_on_stream=t0 + h,
                    conversion=float(conversion[h]),
                    selectivity=float(selectivity[h]),
                )
            )
            cur_activities.append(float(act_arr[h]))
        total_hours += hours_used
        fed = params.mu_olef_in * params.flow_kgph * hours_used

        if len(cur_records) > config.cycle_hard_cap_hours:
            raise SimulationError(
                f"cycle exceeded {config.cycle_hard_cap_hours} h without "
                "reaching the end-of-run criterion", state=state,
            )

        if ended.any():
            finish_cycle()
            done_cycles = len(records)
            if config.max_cycles is not None and done_cycles >= config.max_cycles:
                break
            if horizon_hours is not None and total_hours >= horizon_hours:
                break
            state = ReactorState(
                activity=1.0, params=params, time_on_stream=0.0,
                cycle_index=state.cycle_index + 1, cumulative_olefine_feed=0.0,
            )
        else:
            # advance activity past the final hour of the window
            next_a = step_activity(
                replace(state, activity=float(act_arr[-1])),
                1.0, kin, config.activity_substeps,
            )
            state = replace(
                state,
                activity=next_a,
                time_on_stream=state.time_on_stream + hours_used,
                cumulative_olefine_feed=state.cumulative_olefine_feed + fed,
            )

    return GenerationResult(
        records=records,
        activities=activities,
        max_rel_mass_flow_error=max_mass_err,
        clamp_events=clamp_events,
        config=config,
    )
