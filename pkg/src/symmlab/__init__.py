"""Circular and Steiner symmetrisation of sets of finite perimeter, on exact
polygon sets, analytic arc families and sampled slice grids."""

from .arcfamily import ArcFamilySet, BuiltinField, InterpolatedField
from .bv import FullSliceWarning, JumpSet, SigmaMeasure, bv_decompose, pairing, polar, sigma_measure, total_variation
from .diagnostics import (
    DiagnosticsReport,
    InvariantBreach,
    bar_nu_F,
    boundary_normals,
    check_condition_a,
    check_condition_b,
    verify_inequality,
    verify_symmetral_propositions,
)
from .generators import generate
from .grid import Box, GridFunction, GridSpec, RegionError, SliceGrid
from .perimeter import (
    QuadratureError,
    arcfamily_perimeter,
    coarea_check,
    perimeter_F_mu_formula,
    polygon_perimeter,
)
from .polygon import PolygonSet, Ring
from .sets import AngularArcSet, CircNormal, GeometryError, IntervalSet, arcset_boolean, arcset_measure, normal_to_circ
from .slicing import DistributionError, distribution, slice_circle, slice_grid, slice_vertical
from .steiner import steiner_nu_s, steiner_sigma, steiner_verify, verify_F_v_propositions
from .symmetral import DensityProfile, build_F_mu, build_F_v, density_profile, is_nonincreasing, monotone_check

__all__ = [name for name in dir() if not name.startswith("_")]
