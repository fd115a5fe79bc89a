"""radiilab: circumradius statistics of fractal measures.

A desk-scale numerical laboratory for the distribution of radii of spheres
determined by (d+1)-tuples of points from fractal subsets of R^d: incidence
scaling in the window width, Fourier decay of the associated configuration
measures, Riesz energies, and annulus/dilation intersection diagnostics.
"""

__version__ = "0.1.0"

from .circumsphere import (
    ConfigTuple,
    cayley_menger_radius,
    cayley_menger_radius_batch,
    circumradius_batch,
    circumradius_of_differences,
    circumsphere,
)
from .errors import InputError, ResourceError
from .incidence import (
    IncidenceQuery,
    PairSearchGrid,
    adversarial_conditional_profile,
    conditional_incidence,
    incidence_statistic,
)
from .intersection import (
    AnnulusSlice,
    DilationSet,
    annulus_mass,
    center_validity,
    dilation_set,
    intersection_dimension,
    radii_set_measure,
    unique_sphere_fit,
)
from .measures import (
    Cantor,
    CantorSpec,
    DiscreteMeasure,
    Interval,
    ProductSpec,
    Scaled,
    SetSpec,
    TranslateUnion,
    box_dimension,
    build_cantor,
    frostman_ratio,
    lattice_interval_product,
    middle_thirds,
    realize,
    realize_factors,
    sample,
    two_piece_cantor,
)
from .scaling import ScalingFit, fit_scaling_exponent
from .spectral import (
    EnergyReport,
    FrequencySample,
    configuration_ft,
    decay_envelope_fit,
    energy_integral,
    measure_ft,
    sphere_surface_ft,
)
