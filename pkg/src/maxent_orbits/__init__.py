"""Maximum-entropy distributions on adjoint orbits of compact Lie groups.

The package evaluates orbital integrals in closed form, decides membership
in orbit polytopes, and solves the maximum-entropy dual program with the
ellipsoid method.  A Monte Carlo harness cross-checks the closed forms.
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateFamilyError,
    EnumerationCapError,
    InfeasibleError,
    OracleOverflowError,
    OrbitError,
    ParseError,
    SpecError,
)
from .geometry import (
    MembershipReport,
    balancedness_bound,
    bounding_radius,
    kostant_project,
    majorization_member,
    membership,
)
from .groups import (
    Family,
    GroupSpec,
    affine_equalities,
    cartan_embed,
    make_group_spec,
    weyl_orbit,
)
from .montecarlo import McEstimate, haar_sample, mc_ball_mass, mc_log_integral, mc_orbit_mean
from .oracle import CoincidencePattern, OracleResult, confluent_limit, gradient, log_integral, orbit_mean
from .solver import DualSolution, ProblemInstance, density_report, dual_objective, make_instance, solve

__all__ = [name for name in dir() if not name.startswith("_")]
