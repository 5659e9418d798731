"""Fourier analysis and oscillating singular integrals on compact Lie groups.

Supported groups: flat tori T^n (n <= 3) and SU(2).  The package provides
the unitary dual with spectral data, Haar quadrature grids, the matrix-valued
group Fourier transform, oscillating and Bessel spectral multipliers with
kernel synthesis, a translation-difference (Hörmander-type) seminorm
estimator, Calderón–Zygmund decompositions on dyadic hierarchies, and a
batch experiment CLI for weak-(1,1) ratio sweeps.
"""

__version__ = "0.1.0"

from .groups import (
    GroupId,
    SU2,
    TorusPoint,
    Su2Point,
    GroupPoint,
    compose,
    diameter,
    distance,
    geodesic_norm,
    identity,
    invert,
    torus,
)
from .dual_spectrum import (
    DualIndex,
    SpectralData,
    Su2Spin,
    TorusFreq,
    enumerate_dual,
    representation_matrix,
    spectral_data,
)
from .group_domain import Ball, QuadratureGrid, ball_volume, build_grid, points_in_ball
from .group_fourier import (
    FourierCoefficients,
    GridFunction,
    coefficients_from_json,
    coefficients_to_json,
    convolve_direct,
    convolve_fourier,
    forward_transform,
    inverse_transform,
    plancherel_energy,
)
from .multipliers import (
    KernelSynthesis,
    MultiplierSymbol,
    apply_multiplier,
    bessel_symbol,
    envelope_slope,
    heat_symbol,
    oscillating_phase_symbol,
    oscillating_symbol,
    synthesize_kernel,
    verify_decay,
)
from .hormander import SeminormEstimate, estimate_seminorm, inner_integral
from .czd import (
    CzDecomposition,
    DyadicSystem,
    build_dyadic_system,
    decompose,
    mollifier,
    smooth_bad_part,
    verify_properties,
)
from .experiments import distribution_function, run_config, weak11_sweep
