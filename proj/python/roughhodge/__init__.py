"""Discrete Hodge theory with rough metrics (bindings to the C++ core)."""

from ._roughhodge import (
    Complex,
    HodgeError,
    __version__,
    betti_smith,
    build_cubical,
    build_fixture,
    certify_nilpotent,
    decompose,
    kernel_isomorphism,
    refine_divergence,
    run_scenario,
    sample_weights,
    spectral_betti,
    weierstrass_partial_sum,
)

__all__ = [
    "Complex",
    "HodgeError",
    "__version__",
    "betti_smith",
    "build_cubical",
    "build_fixture",
    "certify_nilpotent",
    "decompose",
    "kernel_isomorphism",
    "refine_divergence",
    "run_scenario",
    "sample_weights",
    "spectral_betti",
    "weierstrass_partial_sum",
]
