"""Classical compact groups: metadata, Cartan coordinates and Weyl orbits.

Every family is realized as a matrix group acting on its Lie algebra by
conjugation, with the invariant inner product ``<X, Y> = -Re Tr(XY)``.
Cartan coordinates are taken in an orthonormal basis ``H_j`` of the
standard maximal torus, so Euclidean norms of coordinate vectors equal
algebra norms.

Special unitary coordinates are stored as length-``n`` vectors with zero
sum, which keeps the determinant formulas uniform with ``U(n)``.
"""

from dataclasses import dataclass
from enum import Enum
from itertools import permutations, product
from typing import Optional

import numpy as np

from .errors import DegenerateFamilyError, EnumerationCapError, SpecError

__all__ = [
    "Family",
    "GroupSpec",
    "AffineConstraintSet",
    "make_group_spec",
    "check_cartan",
    "cartan_basis",
    "cartan_embed",
    "inner_product",
    "algebra_norm",
    "check_algebra",
    "group_residual",
    "adjoint_apply",
    "affine_equalities",
    "weyl_orbit",
    "weyl_elements",
    "weyl_act",
    "WEYL_CAP",
]

WEYL_CAP = 8
SQRT2 = np.sqrt(2.0)


class Family(str, Enum):
    U = "U"
    SU = "SU"
    SOeven = "SOeven"
    SOodd = "SOodd"
    Oeven = "Oeven"
    USp = "USp"


@dataclass(frozen=True)
class GroupSpec:
    """A classical group together with its size parameter.

    ``n`` is the parameter in ``U(n)``, ``SU(n)``, ``SO(2n)``, ``O(2n)``,
    ``SO(2n+1)`` and ``USp(n)``; ``N`` is the side of the defining matrices.
    ``coord_len`` is the length of a Cartan coordinate vector, which differs
    from ``rank`` only for SU.
    """

    family: Family
    n: int
    dim: int
    rank: int
    N: int
    weyl_type: str
    integration_only: bool = False

    @property
    def coord_len(self):
        return self.n

    @property
    def is_complex(self):
        return self.family in (Family.U, Family.SU, Family.USp)

    @property
    def sign_rule(self):
        """Sign changes allowed in the coordinate action of the orbit symmetry."""
        if self.family in (Family.U, Family.SU):
            return "none"
        if self.family == Family.SOeven:
            return "even"
        # O(2n) contains reflections flipping a single torus block.
        return "all"

    def __str__(self):
        names = {
            Family.U: f"U({self.n})",
            Family.SU: f"SU({self.n})",
            Family.SOeven: f"SO({2 * self.n})",
            Family.SOodd: f"SO({2 * self.n + 1})",
            Family.Oeven: f"O({2 * self.n})",
            Family.USp: f"USp({self.n})",
        }
        return names[self.family]


def make_group_spec(family, n):
    """Build a :class:`GroupSpec`, rejecting degenerate parameters.

    Examples
    --------
    >>> s = make_group_spec("SOeven", 2)
    >>> (s.dim, s.rank, s.N, s.weyl_type)
    (6, 2, 4, 'D2')
    """
    try:
        fam = Family(family)
    except ValueError:
        raise SpecError(f"unknown group family {family!r}", code="UNKNOWN_FAMILY") from None
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n <= 0:
        raise SpecError(f"size parameter must be a positive integer, got {n!r}")
    n = int(n)
    if fam == Family.SOeven and n == 1:
        raise DegenerateFamilyError("SO(2) is abelian; the determinant formula degenerates")
    if fam == Family.SU and n == 1:
        raise DegenerateFamilyError("SU(1) is the trivial group")

    if fam == Family.U:
        return GroupSpec(fam, n, n * n, n, n, f"A{n - 1}")
    if fam == Family.SU:
        return GroupSpec(fam, n, n * n - 1, n - 1, n, f"A{n - 1}")
    if fam in (Family.SOeven, Family.Oeven):
        N = 2 * n
        return GroupSpec(fam, n, N * (N - 1) // 2, n, N, f"D{n}",
                         integration_only=fam == Family.Oeven)
    if fam == Family.SOodd:
        N = 2 * n + 1
        return GroupSpec(fam, n, N * (N - 1) // 2, n, N, f"B{n}")
    return GroupSpec(fam, n, n * (2 * n + 1), n, 2 * n, f"C{n}")


def check_cartan(spec, v, name="vector"):
    """Validate and return Cartan coordinates as a float array."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != spec.coord_len:
        raise SpecError(
            f"{name} must have length {spec.coord_len} for {spec}, got shape {v.shape}",
            code="LENGTH_MISMATCH",
        )
    if not np.all(np.isfinite(v)):
        raise SpecError(f"{name} has non-finite entries")
    if spec.family == Family.SU:
        scale = np.max(np.abs(v)) if v.size else 0.0
        if abs(v.sum()) > 1e-12 * scale:
            raise SpecError(f"{name} must sum to zero for {spec}", code="SU_NONZERO_SUM")
    return v


def cartan_basis(spec):
    """Orthonormal torus basis ``H_j`` as an array of shape ``(coord_len, N, N)``."""
    n, N = spec.n, spec.N
    if spec.family in (Family.U, Family.SU):
        H = np.zeros((n, N, N), dtype=complex)
        for j in range(n):
            H[j, j, j] = 1j
        return H
    if spec.family == Family.USp:
        H = np.zeros((n, N, N), dtype=complex)
        for j in range(n):
            H[j, j, j] = 1j / SQRT2
            H[j, n + j, n + j] = -1j / SQRT2
        return H
    H = np.zeros((n, N, N))
    for j in range(n):
        H[j, 2 * j, 2 * j + 1] = 1 / SQRT2
        H[j, 2 * j + 1, 2 * j] = -1 / SQRT2
    return H


def cartan_embed(spec, v):
    """Map Cartan coordinates to the algebra element ``sum_j v_j H_j``."""
    v = check_cartan(spec, v)
    return np.tensordot(v, cartan_basis(spec), axes=1)


def inner_product(X, Y):
    """Invariant inner product ``-Re Tr(XY)``; accepts stacked matrices."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    if X.shape[-2:] != Y.shape[-2:] or X.shape[-1] != X.shape[-2]:
        raise SpecError(f"size mismatch: {X.shape} vs {Y.shape}")
    return -np.real(np.einsum("...ij,...ji->...", X, Y))


def algebra_norm(X):
    return float(np.sqrt(max(inner_product(X, X), 0.0)))


def check_algebra(spec, X, rtol=1e-12):
    """Raise unless ``X`` lies in the Lie algebra of ``spec``."""
    X = np.asarray(X)
    if X.shape != (spec.N, spec.N):
        raise SpecError(f"expected a {spec.N}x{spec.N} matrix for {spec}, got {X.shape}")
    scale = max(np.linalg.norm(X), 1.0)
    if np.linalg.norm(X + X.conj().T) > rtol * scale:
        raise SpecError("matrix is not skew-Hermitian")
    if not spec.is_complex and np.linalg.norm(X.imag) > rtol * scale:
        raise SpecError("orthogonal-group algebra elements must be real")
    if spec.family == Family.SU and abs(np.trace(X)) > rtol * scale:
        raise SpecError("special unitary algebra elements must be traceless")
    if spec.family == Family.USp:
        n = spec.n
        J = _symplectic_form(n)
        if np.linalg.norm(X.conj() - J @ X @ J.T) > rtol * scale:
            raise SpecError("matrix does not preserve the symplectic form")
    return X


def _symplectic_form(n):
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


def group_residual(spec, g):
    """Largest defining-equation residual of ``g`` (unitarity, det, symplectic)."""
    g = np.asarray(g)
    res = np.linalg.norm(g.conj().T @ g - np.eye(spec.N))
    if spec.family in (Family.SU, Family.SOeven, Family.SOodd):
        res = max(res, abs(np.linalg.det(g) - 1.0))
    if not spec.is_complex:
        res = max(res, np.linalg.norm(np.imag(g)))
    if spec.family == Family.USp:
        J = _symplectic_form(spec.n)
        res = max(res, np.linalg.norm(g.conj() - J @ g @ J.T))
    return float(res)


def adjoint_apply(spec, g, X):
    """Return ``g X g^{-1}`` after checking that ``g`` is in the group."""
    g = np.asarray(g)
    if g.shape != (spec.N, spec.N):
        raise SpecError(f"group element must be {spec.N}x{spec.N}")
    if group_residual(spec, g) > 1e-10 * spec.N:
        raise SpecError(f"matrix is not an element of {spec}")
    X = check_algebra(spec, X, rtol=1e-10)
    out = g @ X @ g.conj().T
    return out if spec.is_complex else out.real


@dataclass(frozen=True)
class AffineConstraintSet:
    """Maximal affine equalities of the Cartan polytope of an orbit.

    The affine hull of the Weyl orbit of ``F`` is ``F + span(basis)``;
    ``basis`` has orthonormal columns.  ``fixed_center`` is the pinned
    mean coordinate for ``U(n)``; ``pinned`` has one flag per simple
    component (two for ``SO(4)``).
    """

    fixed_center: Optional[float]
    pinned: tuple
    basis: np.ndarray
    anchor: np.ndarray

    @property
    def dim(self):
        return self.basis.shape[1]

    def project(self, v):
        """Orthogonal projection onto the feasible linear subspace ``V_L``."""
        return self.basis @ (self.basis.T @ np.asarray(v, dtype=float))

    def residual(self, A):
        d = np.asarray(A, dtype=float) - self.anchor
        return float(np.linalg.norm(d - self.project(d)))

    def satisfied_by(self, A, tol=1e-9):
        return self.residual(A) <= tol * max(1.0, float(np.linalg.norm(self.anchor)))


def _zero_sum_basis(n):
    # Orthonormal basis of {x : sum x = 0} (Helmert contrasts).
    B = np.zeros((n, n - 1))
    for k in range(1, n):
        B[:k, k - 1] = 1.0
        B[k, k - 1] = -k
        B[:, k - 1] /= np.sqrt(k * (k + 1))
    return B


def affine_equalities(spec, F):
    """Affine equalities satisfied by every point of the orbit of ``F``.

    Examples
    --------
    >>> c = affine_equalities(make_group_spec("U", 2), [1.0, 0.0])
    >>> c.fixed_center, c.dim
    (0.5, 1)
    """
    F = check_cartan(spec, F, "F")
    n = spec.n
    scale = max(1.0, float(np.max(np.abs(F))))
    tiny = 1e-12 * scale
    empty = np.zeros((n, 0))

    if spec.family in (Family.U, Family.SU):
        center = float(F.mean())
        traceless = F - center
        zero = bool(np.max(np.abs(traceless)) <= tiny)
        basis = empty if zero else _zero_sum_basis(n)
        fixed = center if spec.family == Family.U else None
        return AffineConstraintSet(fixed, (zero,), basis, F.copy())

    if spec.family == Family.SOeven and n == 2:
        # so(4) = su(2) + su(2): components along (1, 1) and (1, -1).
        dirs = [np.array([1.0, 1.0]) / SQRT2, np.array([1.0, -1.0]) / SQRT2]
        pinned = tuple(bool(abs(d @ F) <= tiny) for d in dirs)
        cols = [d for d, p in zip(dirs, pinned) if not p]
        basis = np.column_stack(cols) if cols else empty
        return AffineConstraintSet(None, pinned, basis, F.copy())

    zero = bool(np.max(np.abs(F)) <= tiny)
    basis = empty if zero else np.eye(n)
    return AffineConstraintSet(None, (zero,), basis, F.copy())


def weyl_elements(spec, cap=WEYL_CAP):
    """Enumerate the coordinate action ``(perm, signs)`` of the Weyl group.

    For ``O(2n)`` this is the full signed permutation group, the symmetry
    of its (disconnected) orbits.
    """
    n = spec.n
    if n > cap:
        raise EnumerationCapError(f"rank {n} exceeds the enumeration cap {cap}")
    rule = spec.sign_rule
    for perm in permutations(range(n)):
        if rule == "none":
            yield perm, np.ones(n)
            continue
        for signs in product((1.0, -1.0), repeat=n):
            if rule == "even" and np.prod(signs) < 0:
                continue
            yield perm, np.array(signs)


def weyl_act(element, v):
    perm, signs = element
    return signs * np.asarray(v, dtype=float)[list(perm)]


def weyl_orbit(spec, F, cap=WEYL_CAP):
    """Distinct points of the Weyl orbit of ``F``, lexicographically sorted.

    Examples
    --------
    >>> weyl_orbit(make_group_spec("SOeven", 2), [1.0, 2.0]).tolist()
    [[-2.0, -1.0], [-1.0, -2.0], [1.0, 2.0], [2.0, 1.0]]
    """
    F = check_cartan(spec, F, "F")
    n = spec.n
    if n > cap:
        raise EnumerationCapError(f"rank {n} exceeds the enumeration cap {cap}")
    rule = spec.sign_rule
    points = set()
    if rule == "none":
        points = set(permutations(F.tolist()))
    elif rule == "all":
        for p in set(permutations(np.abs(F).tolist())):
            nz = [i for i, x in enumerate(p) if x != 0.0]
            for signs in product((1.0, -1.0), repeat=len(nz)):
                q = list(p)
                for i, s in zip(nz, signs):
                    q[i] = s * q[i]
                points.add(tuple(q))
    else:
        for p in set(permutations(F.tolist())):
            for signs in product((1.0, -1.0), repeat=n):
                if np.prod(signs) < 0:
                    continue
                points.add(tuple(s * x + 0.0 for s, x in zip(signs, p)))
    pts = np.array(sorted(points), dtype=float).reshape(-1, n)
    return pts + 0.0
