"""Log-domain evaluation of determinant ratios with confluent nodes.

For an entire function ``phi`` and real nodes ``p``, ``q`` this module
evaluates::

    R(p, q) = det[phi(p_i q_j)] / (Vandermonde(p) * Vandermonde(q))

which stays finite and positive when nodes coincide.  Rows (columns)
belonging to a cluster of nearby nodes are replaced by divided
differences over the cluster; this divides out the matching Vandermonde
factors exactly, and repeated nodes turn into derivatives.  Divided
differences are read off the first row of ``phi`` applied to a bidiagonal
matrix (Opitz's formula), with the bivariate case handled by a Kronecker
product, so the same code covers distinct, nearly equal and equal nodes.

Three kernels are supported, all functions of the product ``t = p q``:

``exp``    ``e^t``
``cosh``   ``cosh(sqrt(t))``      (``t >= 0``)
``sinhc``  ``sinh(sqrt(t))/sqrt(t)`` (``t >= 0``)
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import linear_sum_assignment

from .errors import OracleOverflowError

__all__ = ["LogRatio", "log_ratio", "cluster_nodes", "CONFLUENCE_RTOL", "CONDITION_LIMIT"]

CONFLUENCE_RTOL = 1e-8
CONDITION_LIMIT = 30.0


def _bidiag(nodes):
    m = len(nodes)
    return np.diag(np.asarray(nodes, dtype=float)) + np.diag(np.ones(m - 1), 1)


def _phi_matrix(kind, M, tmax):
    """Return ``(phi(M) * exp(-shift), shift)`` for upper-triangular ``M``.

    ``tmax`` bounds the eigenvalues of ``M`` from above.
    """
    k = M.shape[0]
    if kind == "exp":
        shift = tmax
        return expm(M - shift * np.eye(k)), shift
    s = np.sqrt(max(tmax, 0.0))
    alpha = max(1.0, s)
    # exp([[0, I], [M, 0]]) = [[cosh(sqrt M), sinhc(sqrt M)], [., .]],
    # balanced by diag(I, alpha I).
    B = np.zeros((2 * k, 2 * k))
    B[:k, k:] = alpha * np.eye(k)
    B[k:, :k] = M / alpha
    E = expm(B - s * np.eye(2 * k))
    if kind == "cosh":
        return E[:k, :k], s
    return E[:k, k:] / alpha, s


def divided_block(kind, ps, qs):
    """Bivariate divided differences ``phi[ps[:i+1]; qs[:j+1]]``.

    Returns ``(mantissa, shift)`` with block ``= mantissa * exp(shift)``.
    """
    m, l = len(ps), len(qs)
    if m == 1 and l == 1:
        return _scalar(kind, ps[0] * qs[0])
    Jp, Jq = _bidiag(ps), _bidiag(qs)
    M = np.kron(Jp, Jq)
    tmax = max(a * b for a in ps for b in qs)
    phiM, shift = _phi_matrix(kind, M, tmax)
    return phiM[0].reshape(m, l), shift


def _scalar(kind, t):
    if kind == "exp":
        return np.ones((1, 1)), t
    t = max(t, 0.0)
    s = np.sqrt(t)
    if kind == "cosh":
        return np.array([[0.5 * (1.0 + np.exp(-2.0 * s))]]), s
    if s < 1e-3:
        # sinh(s)/s series, scaled by exp(-s)
        val = (1.0 + t / 6.0 + t * t / 120.0) * np.exp(-s)
    else:
        val = 0.5 * (1.0 - np.exp(-2.0 * s)) / s
    return np.array([[val]]), s


def _rate(kind, p, q):
    """Bound on |d log phi(p q) / dp| over the nodes ``q``."""
    q = np.abs(np.asarray(q, dtype=float))
    if q.size == 0:
        return 0.0
    if kind == "exp":
        return float(q.max())
    pmax = float(np.max(np.abs(p))) if len(p) else 0.0
    return float(np.max(q / (1.0 + np.sqrt(pmax * q))))


def cluster_nodes(nodes, rate, tol=1.0):
    """Single-linkage clusters of sorted nodes with ``gap * rate <= tol``.

    Returns the sort order and a list of index arrays into the sorted nodes.
    """
    nodes = np.asarray(nodes, dtype=float)
    order = np.argsort(nodes, kind="stable")
    s = nodes[order]
    clusters, start = [], 0
    for i in range(1, len(s)):
        gap = s[i] - s[i - 1]
        if gap * rate > tol and gap > 0:
            clusters.append(np.arange(start, i))
            start = i
    clusters.append(np.arange(start, len(s)))
    return order, clusters


def confluent_groups(nodes, rtol=CONFLUENCE_RTOL):
    """Groups of nodes equal within ``rtol * max(1, max|nodes|)``."""
    nodes = np.asarray(nodes, dtype=float)
    if nodes.size == 0:
        return []
    thr = rtol * max(1.0, float(np.max(np.abs(nodes))))
    order = np.argsort(nodes, kind="stable")
    groups, cur = [], [int(order[0])]
    for a, b in zip(order[:-1], order[1:]):
        if nodes[b] - nodes[a] <= thr:
            cur.append(int(b))
        else:
            groups.append(cur)
            cur = [int(b)]
    groups.append(cur)
    return [g for g in groups if len(g) > 1]


@dataclass
class LogRatio:
    """``log R(p, q)`` with its gradient in ``p`` and diagnostics."""

    value: float
    grad: np.ndarray
    condition: float
    scale: float


def _assemble(blocks, row_sizes, col_sizes):
    """Log-magnitude and sign matrices from a grid of (mantissa, shift) blocks."""
    n = sum(row_sizes)
    L = np.full((n, n), -np.inf)
    S = np.zeros((n, n))
    r0 = 0
    for a, m in enumerate(row_sizes):
        c0 = 0
        for b, l in enumerate(col_sizes):
            mant, shift = blocks[a][b]
            with np.errstate(divide="ignore"):
                L[r0:r0 + m, c0:c0 + l] = np.log(np.abs(mant)) + shift
            S[r0:r0 + m, c0:c0 + l] = np.sign(mant)
            c0 += l
        r0 += m
    return L, S


def _equilibrate(L):
    """Row and column log-scalings putting a maximal matching at 1.

    The largest-product permutation is found by an assignment solve; the
    dual potentials (longest paths in the exchange graph) then scale its
    entries to 1 and every other entry to at most 1.
    """
    if not np.all(np.isfinite(np.max(L, axis=1))):
        raise OracleOverflowError("determinant matrix has a zero row")
    if not np.all(np.isfinite(np.max(L, axis=0))):
        raise OracleOverflowError("determinant matrix has a zero column")
    finite = np.isfinite(L)
    floor = L[finite].min() - 1e3 * (1.0 + np.ptp(L[finite]))
    W = np.where(finite, L, floor)
    rows, sigma = linear_sum_assignment(W, maximize=True)
    diag = W[rows, sigma]
    # D[i, k]: gain of moving row k onto the column matched to row i
    D = W[:, sigma].T - diag[:, None]
    for m in range(D.shape[0]):
        D = np.maximum(D, D[:, m:m + 1] + D[m:m + 1, :])
    r = np.maximum(0.0, D.max(axis=0))
    c = np.empty_like(r)
    c[sigma] = diag - r
    return r, c


def log_ratio(kind, p, q, with_grad=True):
    """Evaluate ``log R(p, q)`` and optionally ``d log R / dp``.

    Raises :class:`OracleOverflowError` when the result is not finite and
    positive or the cancellation estimate exceeds ``CONDITION_LIMIT``.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    n = p.size
    scale = float(np.max(np.abs(np.multiply.outer(p, q)))) if n else 0.0
    if kind != "exp":
        scale = float(np.sqrt(scale))

    p_order, p_cl = cluster_nodes(p, _rate(kind, p, q))
    q_order, q_cl = cluster_nodes(q, _rate(kind, q, p))
    ps, qs = p[p_order], q[q_order]

    blocks = [[divided_block(kind, ps[ca], qs[cb]) for cb in q_cl] for ca in p_cl]
    L, S = _assemble(blocks, [len(c) for c in p_cl], [len(c) for c in q_cl])
    r, c = _equilibrate(L)
    M = S * np.exp(L - r[:, None] - c[None, :])
    sign, logdet = np.linalg.slogdet(M)
    if sign <= 0 or not np.isfinite(logdet):
        raise OracleOverflowError(
            "determinant lost its sign; inputs too ill-conditioned", scale=scale
        )
    cond = float(np.log(np.linalg.cond(M)))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise OracleOverflowError(
            f"cancellation estimate {cond:.1f} exceeds {CONDITION_LIMIT}",
            scale=scale, condition=cond,
        )

    value = logdet + r.sum() + c.sum()
    value -= _cross_log_gaps(ps, p_cl) + _cross_log_gaps(qs, q_cl)
    if not np.isfinite(value):
        raise OracleOverflowError("non-finite log determinant", scale=scale)

    grad = np.zeros(n)
    if with_grad:
        Minv = np.linalg.inv(M)
        gs = np.zeros(n)
        row0 = 0
        for ca in p_cl:
            m = len(ca)
            for t in range(m):
                k = ca[t]
                acc = 0.0
                nodes = np.concatenate(([ps[k]], ps[ca]))
                col0 = 0
                for cb in q_cl:
                    mant, shift = divided_block(kind, nodes, qs[cb])
                    l = len(cb)
                    # rows i >= t of the cluster depend on node t
                    for i in range(t, m):
                        rr = row0 + i
                        dD = mant[i + 1] * np.exp(shift - r[rr] - c[col0:col0 + l])
                        acc += Minv[col0:col0 + l, rr] @ dD
                    col0 += l
                others = np.setdiff1d(np.arange(n), ca)
                acc -= np.sum(1.0 / (ps[k] - ps[others]))
                gs[k] = acc
            row0 += m
        grad[p_order] = gs
    return LogRatio(float(value), grad, cond, scale)


def _cross_log_gaps(s, clusters):
    """Sum of log gaps between sorted nodes lying in different clusters."""
    label = np.empty(len(s), dtype=int)
    for i, cl in enumerate(clusters):
        label[cl] = i
    total = 0.0
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if label[i] != label[j]:
                total += np.log(s[j] - s[i])
    return total
