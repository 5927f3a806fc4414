"""Python access to the congestion flow solver.

Configurations use the same INI text as the command-line tool::

    import congestion
    cfg = congestion.parse_config("scenario = lane_narrowing_1d\n", ["output.dir=out/lane"])
    result = congestion.run(cfg)
    result["records"]["max_ratio"]   # numpy array, one entry per recorded state
"""

from ._core import (
    Barotropic,
    BarrierViolation,
    ConfigError,
    CongestionError,
    DegenerateState,
    IoError,
    NonFinite,
    ParameterError,
    ParseError,
    QuadratureFailure,
    RunConfig,
    Sedimentation,
    Singular,
    SpecError,
    StepFailure,
    Truncated,
    UnknownScenario,
    ValidationError,
    check,
    load_config,
    parse_config,
    run,
    scenario_names,
    sweep,
)

__all__ = [
    "Barotropic",
    "BarrierViolation",
    "ConfigError",
    "CongestionError",
    "DegenerateState",
    "IoError",
    "NonFinite",
    "ParameterError",
    "ParseError",
    "QuadratureFailure",
    "RunConfig",
    "Sedimentation",
    "Singular",
    "SpecError",
    "StepFailure",
    "Truncated",
    "UnknownScenario",
    "ValidationError",
    "check",
    "load_config",
    "parse_config",
    "run",
    "scenario_names",
    "sweep",
]
