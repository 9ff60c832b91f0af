"""Mechanistic simulator of catalyst deactivation in a plug flow reactor."""

from agingforecast.reactor.chemistry import (
    KineticParams,
    ProcessParams,
    SpeciesSet,
    concentrations_from_fractions,
    default_species,
    reaction_rates,
    residence_time,
)
from agingforecast.reactor.simulate import (
    GenerationConfig,
    GenerationResult,
    ParameterRanges,
    PlugFlowResult,
    ReactorState,
    SimRecord,
    gaussian_walk_step,
    generate_dataset,
    integrate_plug_flow,
    sample_process_params,
    selectivity_conversion,
    snap_to_grid,
    step_activity,
)

__all__ = [
    "KineticParams",
    "ProcessParams",
    "SpeciesSet",
    "concentrations_from_fractions",
    "default_species",
    "reaction_rates",
    "residence_time",
    "GenerationConfig",
    "GenerationResult",
    "ParameterRanges",
    "PlugFlowResult",
    "ReactorState",
    "SimRecord",
    "gaussian_walk_step",
    "generate_dataset",
    "integrate_plug_flow",
    "sample_process_params",
    "selectivity_conversion",
    "snap_to_grid",
    "step_activity",
]
