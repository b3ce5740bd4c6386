"""Wavefunction branching and redundant records for a light scalar field.

The package follows one mode (or a window of modes) of a self-interacting
massless scalar through inflation and into radiation domination, tracking
the Gaussian kernel of the wavefunction, the cubic phase kernel sourced by
long-wavelength backgrounds, and the localized observables whose
conditional statistics decide whether the long field has been recorded
redundantly (i.e. whether the wavefunction has branched).
"""

from .background import (
    Coupling,
    InflationEpoch,
    ModeTriplet,
    RadiationEpoch,
    gauge_coupling_map,
    horizon_crossing_time,
    kinetic_weight,
    kinetic_weight_log_deriv,
    scale_factor,
)
from .cubic import (
    alpha_factor,
    free_F_propagation,
    imF_inflation_closed,
    imF_radiation_closed,
    integrate_F,
    sine_integral,
    source_term,
)
from .windows import (
    LocalizedMode,
    WindowSpec,
    disjointness_hierarchy,
    fourier_window,
    localized_variances,
    real_space_window,
    support_regions,
    window_commutator,
    window_overlap,
)
from .gaussian import (
    RotatedFrame,
    TwoPointSet,
    closed_form_A_inflation,
    closed_form_A_radiation_approx,
    closed_form_A_radiation_exact,
    gaussian_overlap,
    heisenberg_mode,
    integrate_A,
    rotated_frame,
    shifted_phase_A,
    two_point_from_A,
    wigner_gaussian,
)

__version__ = "0.1.0"
