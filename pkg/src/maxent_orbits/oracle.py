"""Closed-form orbital integrals and their gradients.

``log_integral(spec, F, Y)`` returns::

    E_F(Y) = log  integral over O(F) of exp(-<Y, X>) dmu_F(X)

through the Harish-Chandra determinant formulas.  With ``x = -Y`` and
``z = F`` in Cartan coordinates every family reduces to a ratio
``det[phi(p_i q_j)] / (Vandermonde(p) Vandermonde(q))``:

* ``U(n)``, ``SU(n)``: ``phi = exp`` with ``p = x``, ``q = z``;
* ``SO(2n+1)``, ``USp(n)``: ``phi = sinhc`` in the squares ``p = x**2``,
  ``q = z**2``;
* ``O(2n)``: ``phi = cosh`` in the squares;
* ``SO(2n)``: the cosh ratio plus ``prod(x) prod(z)`` times the sinhc ratio.

Values are self-normalized by the same formula at ``Y = 0``, which fixes
all family constants because ``mu_F`` is a probability measure.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .confluent import (
    CONDITION_LIMIT,
    CONFLUENCE_RTOL,
    confluent_groups,
    log_ratio,
)
from .errors import OracleOverflowError, SpecError
from .groups import Family, check_cartan

__all__ = [
    "OracleResult",
    "CoincidencePattern",
    "log_integral",
    "gradient",
    "confluent_limit",
    "orbit_mean",
]


@dataclass
class OracleResult:
    """Value and gradient of ``E_F`` at one point ``Y``."""

    log_value: float
    gradient: np.ndarray
    confluent: bool = False
    condition_estimate: float = 0.0


@dataclass
class CoincidencePattern:
    """Index groups of ``Y`` (and ``F``) coordinates to be merged exactly.

    For the orthogonal and symplectic families coordinates enter through
    their squares, so a group merges absolute values; ``y_zeros`` and
    ``f_zeros`` pin coordinates to zero.
    """

    y_groups: list = field(default_factory=list)
    f_groups: list = field(default_factory=list)
    y_zeros: list = field(default_factory=list)
    f_zeros: list = field(default_factory=list)


def _nodes(spec, v):
    """Map Cartan coordinates to determinant nodes (identity or squares)."""
    return v if spec.family in (Family.U, Family.SU) else v * v


def _single_value(spec, x, z, with_grad):
    """log I and d log I / dx for one family, unnormalized."""
    fam = spec.family
    if fam in (Family.U, Family.SU):
        r = log_ratio("exp", x, z, with_grad)
        return r.value, r.grad, r.condition
    u, v = x * x, z * z
    if fam in (Family.SOodd, Family.USp):
        r = log_ratio("sinhc", u, v, with_grad)
        return r.value, 2.0 * x * r.grad, r.condition
    if fam == Family.Oeven:
        r = log_ratio("cosh", u, v, with_grad)
        return r.value, 2.0 * x * r.grad, r.condition

    # SO(2n): cosh part plus prod(x) prod(z) times the sinhc part
    rc = log_ratio("cosh", u, v, with_grad)
    Pz = float(np.prod(z))
    if Pz == 0.0:
        return rc.value, 2.0 * x * rc.grad, rc.condition
    rs = log_ratio("sinhc", u, v, with_grad)
    P = float(np.prod(x)) * Pz
    lc, ls = rc.value, rs.value
    if P == 0.0:
        value, cond = lc, rc.condition
    else:
        big = max(lc, ls + np.log(abs(P)))
        wc, ws = np.exp(lc - big), np.sign(P) * np.exp(ls + np.log(abs(P)) - big)
        total = wc + ws
        if total <= 0.0:
            raise OracleOverflowError("cosh and sinh parts cancelled",
                                      scale=float(np.sqrt(u.max() * v.max())))
        value = big + np.log(total)
        cond = max(rc.condition, rs.condition) + float(np.log(max(abs(wc), abs(ws)) / total))
    grad = np.zeros_like(x)
    if with_grad:
        rel_c = np.exp(lc - value)
        rel_s = np.exp(ls - value)
        dP = np.array([np.prod(np.delete(x, j)) for j in range(x.size)]) * Pz
        grad = 2.0 * x * (rel_c * rc.grad + P * rel_s * rs.grad) + dP * rel_s
    return value, grad, cond


@lru_cache(maxsize=4096)
def _log_norm(spec, z_key):
    z = np.array(z_key)
    value, _, _ = _single_value(spec, np.zeros_like(z), z, with_grad=False)
    return value


def _evaluate(spec, F, Y, with_grad=True):
    x = -Y
    z = F
    if not np.any(Y):
        value, cond = 0.0, 0.0
        grad_x = _single_value(spec, x, z, with_grad)[1] if with_grad else np.zeros_like(x)
    else:
        raw, grad_x, cond = _single_value(spec, x, z, with_grad)
        value = raw - _log_norm(spec, tuple(z.tolist()))
    grad = -grad_x
    if spec.family == Family.SU and with_grad:
        grad = grad - grad.mean()
    if cond > CONDITION_LIMIT or not np.isfinite(value) or not np.all(np.isfinite(grad)):
        raise OracleOverflowError(
            "orbital integral could not be evaluated in double precision",
            scale=float(np.max(np.abs(np.multiply.outer(Y, F)))), condition=cond,
        )
    return value, grad, cond


def _is_confluent(spec, F, Y):
    return bool(confluent_groups(_nodes(spec, Y)) or confluent_groups(_nodes(spec, F)))


def log_integral(spec, F, Y):
    """Evaluate ``E_F(Y)`` and its gradient.

    Examples
    --------
    >>> from maxent_orbits.groups import make_group_spec
    >>> r = log_integral(make_group_spec("U", 1), [3.0], [-2.0])
    >>> round(r.log_value, 12)
    6.0
    """
    F = check_cartan(spec, F, "F")
    Y = check_cartan(spec, Y, "Y")
    value, grad, cond = _evaluate(spec, F, Y)
    return OracleResult(float(value), grad, _is_confluent(spec, F, Y), float(cond))


def gradient(spec, F, Y):
    """Gradient of ``E_F`` at ``Y`` in Cartan coordinates."""
    return log_integral(spec, F, Y).gradient


def orbit_mean(spec, F, Y):
    """Cartan projection of the mean of ``exp(-<Y, X>) dmu_F``, i.e. ``-grad E_F``."""
    return -gradient(spec, F, Y)


def _snap(spec, v, groups, zeros, name):
    v = v.copy()
    scale = max(1.0, float(np.max(np.abs(v))) if v.size else 0.0)
    thr = CONFLUENCE_RTOL * scale
    typeA = spec.family in (Family.U, Family.SU)
    for j in zeros:
        if typeA:
            raise SpecError("zero pinning only applies to orthogonal and symplectic families",
                            code="BAD_PATTERN")
        if abs(v[j]) > thr:
            raise SpecError(f"{name}[{j}] = {v[j]} is not zero within {thr:g}", code="BAD_PATTERN")
        v[j] = 0.0
    for g in groups:
        g = list(g)
        vals = v[g] if typeA else np.abs(v[g])
        if np.ptp(vals) > thr:
            raise SpecError(f"{name} coordinates {g} do not coincide within {thr:g}",
                            code="BAD_PATTERN")
        target = vals.mean()
        v[g] = target if typeA else np.sign(v[g]) * target
    return v


def confluent_limit(spec, F, Y, pattern):
    """Evaluate the analytic limit where the grouped coordinates coincide.

    Coordinates in each group (equal within the confluence threshold) are
    merged exactly and the determinant ratio is evaluated with repeated
    rows and columns replaced by derivatives.
    """
    F = check_cartan(spec, F, "F")
    Y = check_cartan(spec, Y, "Y")
    for g in list(pattern.y_groups) + list(pattern.f_groups):
        if any(i < 0 or i >= spec.coord_len for i in g):
            raise SpecError(f"group {g} has indices out of range", code="BAD_PATTERN")
    Ys = _snap(spec, Y, pattern.y_groups, pattern.y_zeros, "Y")
    Fs = _snap(spec, F, pattern.f_groups, pattern.f_zeros, "F")
    if spec.family == Family.SU:
        Ys = Ys - Ys.mean()
        Fs = Fs - Fs.mean()
    value, grad, cond = _evaluate(spec, Fs, Ys)
    return OracleResult(float(value), grad, True, float(cond))
