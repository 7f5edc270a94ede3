"""Simulation engine: small-step semantics in sampled and distribution modes."""
from .runtime import (
    match_distributions,
    Configuration,
    DistributionResult,
    PreparedProgram,
    RunRecord,
    ShotStats,
    initial_configuration,
    prepare,
    run_distribution,
    run_shot,
    run_shots,
    step,
)
from .sampler import SamplerState, sample_outcome, splitmix64

__all__ = [
    "Configuration", "DistributionResult", "PreparedProgram", "RunRecord",
    "ShotStats", "initial_configuration", "prepare", "run_distribution",
    "run_shot", "run_shots", "step", "match_distributions",
    "SamplerState", "sample_outcome", "splitmix64",
]
