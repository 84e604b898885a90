"""Exact transfer-matrix solver for 1D tunneling through piecewise-constant barriers."""

from .potential import (
    PiecewisePotential,
    PotentialError,
    UniformBarrierSpec,
    build_uniform,
    sample_smooth,
)
from .solver import (
    RegionAmplitudes,
    ScatteringError,
    ScatteringResult,
    UnitarityError,
    closed_form_single,
    closed_form_step,
    evaluate_wavefunction,
    recover_amplitudes,
    scatter,
    scatter_degenerate,
    scatter_many,
)

__version__ = "0.1.0"
