"""Persistent catalog of equations, reductions and forbidden-set results."""
from .store import (
    ENV_ROOT,
    Catalog,
    CatalogError,
    CorruptRecord,
    EquationRecord,
    IngestOutcome,
    StaleResult,
    UnknownRecord,
    canonical_form,
    default_root,
    description_json,
    equation_hash,
    normalized_definition,
    seed_catalog,
    seed_text,
)

__all__ = [
    "ENV_ROOT",
    "Catalog",
    "CatalogError",
    "CorruptRecord",
    "EquationRecord",
    "IngestOutcome",
    "StaleResult",
    "UnknownRecord",
    "canonical_form",
    "default_root",
    "description_json",
    "equation_hash",
    "normalized_definition",
    "seed_catalog",
    "seed_text",
]
