"""Shared test helpers: re-exported seeded generators."""

from chaincalc.randgen import (  # noqa: F401
    conjugate,
    null_homotopic_map,
    random_chain_map,
    random_complex,
    random_graded_map,
    random_matrix,
)
