"""Maximum-entropy densities on orbits via the dual program.

The dual objective::

    f_A(Y) = <Y, A> + E_F(Y)

is convex, and its minimizer over the feasible subspace ``V_L`` of the
Cartan subalgebra parameterizes the maximum-entropy density
``nu(X) ~ exp(-<Y, X>)`` with mean ``A``.  It is minimized by the
central-cut ellipsoid method started from a ball whose radius comes from
the balancedness of the invariant measure.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InfeasibleError, OracleOverflowError, SpecError
from .geometry import bounding_radius, membership
from .groups import WEYL_CAP, affine_equalities, check_cartan
from .oracle import log_integral

__all__ = [
    "ProblemInstance",
    "DualSolution",
    "DensityReport",
    "make_instance",
    "dual_objective",
    "solve",
    "density_report",
    "volume_iteration_bound",
]

log = logging.getLogger(__name__)


@dataclass
class ProblemInstance:
    spec: object
    F: np.ndarray
    A: np.ndarray
    eta: float
    epsilon: float
    eta_estimated: bool = False
    constraints: object = None


@dataclass
class DualSolution:
    """Best iterate of the ellipsoid run.

    ``trace`` holds ``(iteration, f, grad_norm, best_f)`` for every oracle
    call; ``exit_reason`` is ``"gradient"`` or ``"volume"``.
    """

    Y_opt: np.ndarray
    f_value: float
    grad_norm: float
    iterations: int
    R_used: float
    trace: list = field(default_factory=list)
    exit_reason: str = "volume"
    iteration_bound: int = 0


@dataclass
class DensityReport:
    """Parameters of ``nu(X) = exp(-<Y, X> - log_partition)`` on the orbit."""

    Y: np.ndarray
    log_partition: float
    mean: np.ndarray
    deviation: float


def make_instance(spec, F, A, epsilon=1e-6, eta: Optional[float] = None):
    """Validate a problem and estimate the interior margin if not given."""
    if spec.integration_only:
        raise SpecError(f"{spec} is disconnected; it is supported for integration only",
                        code="INTEGRATION_ONLY")
    F = check_cartan(spec, F, "F")
    A = check_cartan(spec, A, "A")
    if epsilon <= 0:
        raise SpecError("epsilon must be positive")
    cons = affine_equalities(spec, F)
    if not cons.satisfied_by(A):
        raise InfeasibleError("A violates the affine equalities of the orbit")
    estimated = eta is None
    if spec.n <= WEYL_CAP:
        rep = membership(spec, F, A)
        if cons.dim and rep.status != "interior":
            raise InfeasibleError(f"A is not interior to the orbit polytope ({rep.status})")
        if estimated:
            eta = rep.margin if cons.dim else 1.0
    elif estimated:
        raise SpecError("eta must be supplied above the enumeration cap")
    if eta <= 0:
        raise SpecError("eta must be positive")
    return ProblemInstance(spec, F, A, float(eta), float(epsilon), estimated, cons)


def dual_objective(instance, Y):
    """Value and projected gradient of ``f_A`` at ``Y`` in ``V_L``."""
    cons = instance.constraints
    Y = np.asarray(Y, dtype=float)
    if np.linalg.norm(Y - cons.project(Y)) > 1e-9 * max(1.0, float(np.linalg.norm(Y))):
        raise SpecError("Y must lie in the feasible subspace V_L")
    r = log_integral(instance.spec, instance.F, Y)
    f = float(Y @ instance.A + r.log_value)
    return f, cons.project(instance.A + r.gradient)


def _radius(instance):
    d = instance.spec.dim
    return bounding_radius(d, instance.eta, float(np.linalg.norm(instance.F))).R


def volume_iteration_bound(k, R, epsilon, normA, normF):
    """Iterations after which the ellipsoid volume certifies an ``epsilon`` gap."""
    if k == 0:
        return 0
    beta = epsilon / (2.0 * R * (normA + normF))
    if k == 1:
        log_q = np.log(0.5)
    else:
        # per-step change of log(volume) for a central cut
        log_q = 0.5 * (k * np.log(k * k / (k * k - 1.0)) + np.log((k - 1.0) / (k + 1.0)))
    return int(np.ceil(k * np.log(beta) / log_q))


def solve(instance, max_iter=None):
    """Minimize the dual objective with the central-cut ellipsoid method.

    Stops once the gradient norm certifies an additive gap of
    ``epsilon / 2`` over the ball, or after the number of steps whose
    volume reduction certifies an ``epsilon`` gap.
    """
    spec, cons = instance.spec, instance.constraints
    B = cons.basis
    k = B.shape[1]
    R = _radius(instance)
    eps = instance.epsilon
    normA, normF = float(np.linalg.norm(instance.A)), float(np.linalg.norm(instance.F))
    n_vol = volume_iteration_bound(k, R, eps, normA, normF)
    if k == 0:
        return DualSolution(np.zeros(spec.coord_len), 0.0, 0.0, 0, R, [], "gradient", 0)
    if max_iter is not None:
        n_vol = min(n_vol, max_iter)

    c = np.zeros(k)
    P = R * R * np.eye(k)
    best = None
    trace = []
    grad_tol = eps / (4.0 * R)
    exit_reason = "volume"
    it = 0
    while it < n_vol:
        it += 1
        g = None
        if np.linalg.norm(c) <= R:
            Y = B @ c
            try:
                f, gY = dual_objective(instance, Y)
            except OracleOverflowError as exc:
                log.debug("iteration %d: oracle overflow at |Y|=%.3g (%s)", it, np.linalg.norm(Y), exc)
            else:
                g = B.T @ gY
                gn = float(np.linalg.norm(g))
                if best is None or f < best[1]:
                    best = (Y, f, gn)
                trace.append((it, f, gn, best[1]))
                if gn <= grad_tol:
                    best = (Y, f, gn)
                    exit_reason = "gradient"
                    break
        if g is None:
            g = c.copy()  # cut towards the origin
        if not np.any(g):
            break
        c, P = _ellipsoid_step(c, P, g, k)
        if it % 50 == 0:
            P = _repair(P, R)

    if best is None:
        raise OracleOverflowError("no iterate could be evaluated")
    Y, f, gn = best
    return DualSolution(Y, f, gn, it, R, trace, exit_reason, n_vol)


def _ellipsoid_step(c, P, g, k):
    Pg = P @ g
    b = Pg / np.sqrt(g @ Pg)
    c = c - b / (k + 1.0)
    if k == 1:
        return c, P / 4.0
    P = k * k / (k * k - 1.0) * (P - 2.0 / (k + 1.0) * np.outer(b, b))
    return c, P


def _repair(P, R):
    P = 0.5 * (P + P.T)
    w, V = np.linalg.eigh(P)
    w = np.maximum(w, 1e-24 * R * R)
    return (V * w) @ V.T


def density_report(instance, sol):
    """Log-partition and achieved mean of the reconstructed density."""
    r = log_integral(instance.spec, instance.F, sol.Y_opt)
    mean = -r.gradient
    dev = float(np.linalg.norm(instance.constraints.project(mean - instance.A)))
    return DensityReport(sol.Y_opt, float(r.log_value), mean, dev)
