"""Exact second-quantized validator on a small periodic lattice."""

from .basis import FixedN, FockBasis, Truncated, basis_dimension, build_basis, sector_ladder
from .meanfield import (
    GrowthFit,
    GrowthSeries,
    MeanFieldError,
    MeanFieldWitness,
    exact_evolve,
    fit_growth,
    fluctuation_basis,
    growth_series,
    mean_field_witness,
    meanfield_error,
    meanfield_errors,
    propagate_V,
)
from .operators import (
    FockOperator,
    WeylOperator,
    build_HHar,
    build_Hcor,
    build_Hmf,
    build_HN_k,
    build_LN,
    ccr_defect,
    fiber_hamiltonian,
    japanese_operator,
    kinetic_operator,
    ladder,
    lattice_operators,
    momentum_operator,
    number_operator,
    truncation_for,
    weyl,
)
from .spectra import (
    BoostTransformReport,
    boost_transform_check,
    ground_energy_EN,
    hartree_product_energy,
    lowest_eigenvalues,
    product_energy_direct,
    product_state,
)
