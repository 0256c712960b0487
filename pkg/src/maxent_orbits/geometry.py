"""Convex geometry of orbit projections.

By Kostant's convexity theorem the orthogonal projection of an adjoint
orbit onto the Cartan subalgebra is the convex hull of a Weyl orbit.
Membership in that polytope is decided by a linear program over the
enumerated vertices.  Interior margins use the complete list of facet
normal directions (Weyl images of the fundamental coweights), with the
right-hand sides read off the vertices, so no facet enumeration is needed.
"""

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np
from scipy.optimize import linprog

from .errors import SpecError
from .groups import (
    Family,
    affine_equalities,
    cartan_basis,
    check_algebra,
    check_cartan,
    weyl_orbit,
)

__all__ = [
    "MembershipReport",
    "BoundingBox",
    "kostant_project",
    "membership",
    "majorization_member",
    "facet_normals",
    "nearest_point",
    "bounding_radius",
    "balancedness_bound",
]


@dataclass
class MembershipReport:
    """Outcome of a polytope membership query.

    For ``interior`` and ``boundary`` the certificate is a weight vector
    over ``vertices``; for ``outside`` it is a separating functional.
    """

    status: str
    margin: float
    certificate: np.ndarray
    vertices: np.ndarray


@dataclass(frozen=True)
class BoundingBox:
    R: float
    eta: float
    d: int
    normF: float


def kostant_project(spec, X):
    """Cartan coordinates of the orthogonal projection of ``X``.

    Examples
    --------
    >>> from maxent_orbits.groups import make_group_spec, cartan_embed
    >>> s = make_group_spec("USp", 2)
    >>> kostant_project(s, cartan_embed(s, [0.5, -1.0])).round(12).tolist()
    [0.5, -1.0]
    """
    X = check_algebra(spec, X, rtol=1e-10)
    H = cartan_basis(spec)
    return -np.real(np.einsum("jab,ba->j", H, X))


def majorization_member(F, A, tol=1e-9):
    """Schur-Horn test: is ``A`` in the permutohedron of ``F``?"""
    F = np.sort(np.asarray(F, dtype=float))[::-1]
    A = np.sort(np.asarray(A, dtype=float))[::-1]
    scale = max(1.0, float(np.max(np.abs(F))))
    cf, ca = np.cumsum(F), np.cumsum(A)
    if abs(cf[-1] - ca[-1]) > tol * scale:
        return False
    return bool(np.all(ca[:-1] <= cf[:-1] + tol * scale))


def facet_normals(spec):
    """Unit normals containing every facet direction of a Weyl polytope."""
    n = spec.n
    out = set()
    if spec.family in (Family.U, Family.SU):
        for k in range(1, n):
            for S in combinations(range(n), k):
                c = np.zeros(n)
                c[list(S)] = 1.0
                out.add(tuple(c))
    else:
        # signed 0/1 vectors with k nonzeros; type D adds all full-support ones
        for k in range(1, n + 1):
            for S in combinations(range(n), k):
                for signs in product((1.0, -1.0), repeat=k):
                    c = np.zeros(n)
                    c[list(S)] = signs
                    out.add(tuple(c))
    C = np.array(sorted(out)).reshape(-1, n)
    return C / np.linalg.norm(C, axis=1)[:, None]


def _subspace_normals(spec, basis):
    """Facet normals projected into ``V_L`` and renormalized."""
    C = facet_normals(spec) @ basis
    norms = np.linalg.norm(C, axis=1)
    C = C[norms > 1e-12] / norms[norms > 1e-12, None]
    return np.unique(np.round(C, 14), axis=0)


def nearest_point(P, tol=1e-13, max_iter=10_000):
    """Min-norm point of ``conv(P)`` by Wolfe's algorithm.

    Returns ``(x, weights)`` with ``weights`` over the rows of ``P``.
    """
    P = np.asarray(P, dtype=float)
    m = P.shape[0]
    scale = max(float(np.max(np.sum(P * P, axis=1))), 1e-300)
    S = [int(np.argmin(np.sum(P * P, axis=1)))]
    lam = np.array([1.0])
    x = P[S[0]].copy()
    for _ in range(max_iter):
        j = int(np.argmin(P @ x))
        if x @ x - P[j] @ x <= tol * scale or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            Q = P[S]
            k = len(S)
            K = np.zeros((k + 1, k + 1))
            K[:k, :k] = Q @ Q.T
            K[:k, k] = 1.0
            K[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            alpha = np.linalg.lstsq(K, rhs, rcond=None)[0][:k]
            if np.all(alpha > 1e-15):
                lam = alpha
                break
            neg = alpha <= 1e-15
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(neg, lam / (lam - alpha), np.inf)
            theta = min(1.0, float(np.min(ratios)))
            lam = lam + theta * (alpha - lam)
            keep = lam > 1e-15
            keep[np.argmin(np.where(neg, ratios, np.inf))] = False
            S = [s for s, kp in zip(S, keep) if kp]
            lam = lam[keep]
            lam /= lam.sum()
        x = lam @ P[S]
    w = np.zeros(m)
    w[S] = lam
    return x, w


def _lp_weights(V, A, basis, anchor):
    """Convex weights over ``V`` reproducing ``A`` in ``V_L`` coordinates, or None."""
    m = V.shape[0]
    Aeq = np.vstack([((V - anchor) @ basis).T, np.ones((1, m))])
    beq = np.concatenate([(A - anchor) @ basis, [1.0]])
    res = linprog(np.zeros(m), A_eq=Aeq, b_eq=beq, bounds=(0, None), method="highs")
    if res.status != 0:
        return None
    w = np.clip(res.x, 0.0, None)
    # polish on the support so the combination reproduces A to roundoff
    sup = np.flatnonzero(w > 1e-14)
    sol = np.linalg.lstsq(Aeq[:, sup], beq, rcond=None)[0]
    if np.all(sol >= 0):
        w = np.zeros(m)
        w[sup] = sol
    return w / w.sum()


def membership(spec, F, A, tol=1e-9):
    """Decide whether ``A`` lies in ``hull(weyl_orbit(F))``.

    The margin is the distance from ``A`` to the relative boundary inside
    the affine span (interior), zero (boundary) or a certified lower bound
    on the distance to the polytope that equals it up to roundoff (outside).

    Examples
    --------
    >>> from maxent_orbits.groups import make_group_spec
    >>> r = membership(make_group_spec("U", 2), [1.0, 0.0], [0.5, 0.5])
    >>> r.status, round(r.margin, 8)
    ('interior', 0.70710678)
    """
    F = check_cartan(spec, F, "F")
    A = np.asarray(A, dtype=float)
    if A.shape != F.shape:
        raise SpecError(f"A must have length {F.size}", code="LENGTH_MISMATCH")
    V = weyl_orbit(spec, F)
    cons = affine_equalities(spec, F)
    scale = max(1.0, float(np.linalg.norm(F)))
    atol = tol * scale

    if cons.residual(A) <= atol:
        w = _lp_weights(V, A, cons.basis, cons.anchor) if cons.dim else None
        if cons.dim == 0:
            return MembershipReport("boundary", 0.0, np.ones(1), V)
        C = _subspace_normals(spec, cons.basis)
        Vc, Ac = (V - cons.anchor) @ cons.basis, (A - cons.anchor) @ cons.basis
        slack = np.max(Vc @ C.T, axis=0) - C @ Ac
        margin = float(np.min(slack))
        if w is not None and margin > atol:
            return MembershipReport("interior", margin, w, V)
        if w is not None or margin >= -atol:
            if w is None:
                x, w = nearest_point(V - A)
            return MembershipReport("boundary", 0.0, w, V)

    x, _ = nearest_point(V - A)
    c = -x  # A - p
    sep = float(c @ A - np.max(V @ c))
    nc = float(np.linalg.norm(c))
    if nc == 0.0 or sep <= 0.0:
        return MembershipReport("boundary", 0.0, np.zeros(V.shape[0]), V)
    return MembershipReport("outside", sep / nc, c, V)


def bounding_radius(d, eta, normF):
    """Radius of a ball guaranteed to contain the dual optimum.

    ``R = (2 d / eta) log(8 sqrt(d) |F| / eta)``.
    """
    if d < 1 or eta <= 0 or normF <= 0:
        raise SpecError("bounding_radius needs d >= 1, eta > 0, |F| > 0")
    arg = 8.0 * np.sqrt(d) * normF / eta
    if arg <= 1.0:
        raise SpecError("eta too large relative to |F|: logarithm is not positive")
    return BoundingBox(float(2.0 * d / eta * np.log(arg)), float(eta), int(d), float(normF))


def balancedness_bound(d, delta, normF):
    """Exponent ``d log(4 sqrt(d) |F| / delta)`` of the ball-mass lower bound."""
    if d <= 0 or delta <= 0 or normF <= 0:
        raise SpecError("balancedness_bound needs positive inputs")
    return float(d * np.log(4.0 * np.sqrt(d) * normF / delta))
