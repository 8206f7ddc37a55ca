"""Coupled heat and moisture transfer in porous building materials.

Evaluates the constitutive laws and coefficient maps of the two-potential
(temperature, vapor pressure) transfer model, computes the eight dimensionless
numbers and their nonlinear distortion over the admitted state domain for a
49-material database, solves kinetic, geometric and dynamic similarity
problems, and verifies dynamic similitude with a one dimensional nonlinear
coupled solver.
"""

from hygroscale.materials import (
    MaterialProperties,
    fit_conductivity,
    fit_sorption,
    load_database,
)
from hygroscale.thermo import (
    DEFAULT_CONSTANTS,
    CoefficientSet,
    PhysicalConstants,
    ThermoState,
    coefficients,
    saturation_pressure,
)
from hygroscale.dimensionless import (
    INSIDE_SURFACE,
    OUTSIDE_SURFACE,
    DimensionlessNumbers,
    ReferenceFrame,
    default_frame,
    distortion,
    numbers,
    reference_coefficients,
    scale_fields,
    unscale_fields,
)
from hygroscale.similarity import (
    Design,
    check_similitude,
    dynamic_scale,
    equivalent_length,
    equivalent_time,
)
from hygroscale.wall import layer_numbers, compare, parse_wall_config
from hygroscale.solver import (
    SimulationConfig,
    simulate,
    derived_outputs,
    verify_dynamic_similarity,
)

__version__ = "0.1.0"
