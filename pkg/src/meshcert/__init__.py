"""Simplicial mesh quality constants and interpolation-error certificates in R^d."""
from .coxeter import coxeter_a_tilde
from .functionals import (
    QualityReport,
    constant_c1,
    constant_c2,
    edge_functional,
    energy_J,
    gradient_norm,
    quality_report,
    rajan_theta,
    roughness_energy,
    roughness_functional,
    sup_norm,
    verify_equivalence,
    verify_error_estimates,
    verify_upper_bound,
)
from .geometry import (
    SimplexGeometry,
    circumsphere,
    elevation,
    facet_normal_and_volume,
    min_containment_ball,
    simplex_geometry,
    simplex_volume,
    thickness,
)
from .interpolation import (
    best_approx_surrogate,
    build_scheme,
    interpolate_gradient,
    interpolate_vector,
    lebesgue_constant,
)
from .mesh import Mesh, delaunay, measure_net, protection, validate_mesh, validate_pseudo_manifold
from .quadrature import simplex_quadrature
from .sizing import SizingField, compute_zeta, constant_c3, estimate_hessian_sup

__version__ = "0.1.0"
