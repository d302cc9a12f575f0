"""Catalog, result cache, reproduction runner and command line."""

from .cache import ResultCache, ResultRecord, cache_key
from .catalog import CatalogEntry, CatalogError, load_entries, select
from .runner import ReproductionReport, run_reproduction

__all__ = [
    "CatalogEntry",
    "CatalogError",
    "ReproductionReport",
    "ResultCache",
    "ResultRecord",
    "cache_key",
    "load_entries",
    "run_reproduction",
    "select",
]
