"""Built-in groups, group oracles and the text formats."""

from autostack.catalog.entries import (
    CATALOG_ENV,
    SHIPPED,
    CatalogEntry,
    CatalogError,
    entry_names,
    load_entry,
    tree_multiplier,
)
from autostack.catalog.formats import ParseError
from autostack.catalog.oracles import (
    FreeGroupOracle,
    KleinBottleOracle,
    NormalFormOracle,
    PermutationOracle,
    VectorOracle,
)

__all__ = [
    "CATALOG_ENV",
    "SHIPPED",
    "CatalogEntry",
    "CatalogError",
    "FreeGroupOracle",
    "KleinBottleOracle",
    "NormalFormOracle",
    "ParseError",
    "PermutationOracle",
    "VectorOracle",
    "entry_names",
    "load_entry",
    "tree_multiplier",
]
