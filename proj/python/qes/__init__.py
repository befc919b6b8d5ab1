"""Quasi-exactly solvable levels of two charges on a plane in a magnetic field."""

import json

from ._core import (
    CaseTag,
    ConfigError,
    DerivedConstants,
    DomainError,
    Family,
    FamilyI,
    FamilyII,
    FamilyIII,
    FormulaSet,
    NumericalError,
    OracleReport,
    ParticlePair,
    RunConfig,
    SolveFor,
    SpectrumLine,
    SpectrumRequest,
    SpectrumResult,
    assemble_spectrum,
    block_eigenvalues,
    block_matrix,
    commutator_defect,
    cross_validate,
    derive_constants,
    parse_config,
    run,
    zeta,
)


def request_from(config):
    """SpectrumRequest from a config dict or JSON string (same schema as the CLI)."""
    text = config if isinstance(config, str) else json.dumps(config)
    return parse_config(text).request


def solve(config):
    """Lines of a config dict or JSON string, ascending in E_rho."""
    return assemble_spectrum(request_from(config)).lines


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
