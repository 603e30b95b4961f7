"""Markov-modulated Brownian motion with two reflecting barriers.

Thin Python layer over the C++ core: first-passage matrices, stationary and
exponential-epoch laws of the reflected process, inverse-local-time
transforms, stationary overflow rates, and a Monte Carlo cross-check
simulator.
"""

from _mmbm import (
    Direction,
    IoError,
    LinalgError,
    LocalTimeError,
    LocalTimeTransform,
    MatrixEstimate,
    Model,
    ModelError,
    OverflowEstimate,
    OverflowRates,
    PassageError,
    PassagePair,
    PathRecord,
    ReflectedLaw,
    ReflectionError,
    SimConfig,
    admissible_alpha,
    asymptotic_drift,
    brownian_overflow_process,
    busy_period_transform,
    crossing_probability,
    estimate_overflow,
    estimate_passage,
    estimate_stationary,
    exp_epoch_law,
    localtime_transform,
    overflow_rates,
    parse_model_document,
    passage_matrices,
    phase_classes,
    simulate_path,
    stationary_law,
    stationary_law_at,
)

__all__ = [
    "Direction",
    "IoError",
    "LinalgError",
    "LocalTimeError",
    "LocalTimeTransform",
    "MatrixEstimate",
    "Model",
    "ModelError",
    "OverflowEstimate",
    "OverflowRates",
    "PassageError",
    "PassagePair",
    "PathRecord",
    "ReflectedLaw",
    "ReflectionError",
    "SimConfig",
    "admissible_alpha",
    "asymptotic_drift",
    "brownian_overflow_process",
    "busy_period_transform",
    "crossing_probability",
    "estimate_overflow",
    "estimate_passage",
    "estimate_stationary",
    "exp_epoch_law",
    "localtime_transform",
    "overflow_rates",
    "parse_model_document",
    "passage_matrices",
    "phase_classes",
    "simulate_path",
    "stationary_law",
    "stationary_law_at",
]
