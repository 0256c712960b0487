"""Brute-force Haar-measure estimators used to validate the closed forms.

Samples are drawn in fixed-size chunks, chunk ``k`` from the Philox stream
keyed by ``(seed, k)``.  Results therefore depend only on
``(spec, seed, n_samples)``, never on how many workers produced them.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .groups import Family, cartan_basis, cartan_embed, check_algebra, check_cartan

__all__ = [
    "McEstimate",
    "rng_stream",
    "haar_sample",
    "haar_batch",
    "orbit_points",
    "mc_log_integral",
    "mc_orbit_mean",
    "mc_ball_mass",
    "CHUNK",
]

CHUNK = 8192


@dataclass
class McEstimate:
    """Monte Carlo estimate with its standard error.

    ``mean`` and ``stderr`` are scalars or per-coordinate arrays.
    ``low_ess`` flags importance-weighted estimates whose effective sample
    size fell below 100.
    """

    mean: object
    stderr: object
    n_samples: int
    seed: int
    ess: float = float("nan")
    low_ess: bool = False


def rng_stream(seed, stream):
    """Counter-based generator for chunk ``stream`` of ``seed``."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _qr_haar(Z):
    # QR with the R-diagonal phases moved into Q (Mezzadri's correction).
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    return Q * ph[..., None, :]


def _usp_gram_schmidt(Z, n):
    """Quaternionic Gram-Schmidt on the first ``n`` columns of ``Z``.

    Column ``j`` and its partner ``(-conj(b), conj(a))`` span a quaternionic
    line; the result has the block form of USp(n).
    """
    m = Z.shape[0]
    Q = np.zeros((m, 2 * n, 2 * n), dtype=complex)

    def partner(w):
        return np.concatenate([-w[:, n:].conj(), w[:, :n].conj()], axis=1)

    for j in range(n):
        w = Z[:, :, j].copy()
        for _ in range(2):
            for k in range(j):
                for basis in (Q[:, :, k], Q[:, :, n + k]):
                    coef = np.einsum("bi,bi->b", basis.conj(), w)
                    w = w - coef[:, None] * basis
        w /= np.linalg.norm(w, axis=1)[:, None]
        Q[:, :, j] = w
        Q[:, :, n + j] = partner(w)
    return Q


def haar_batch(spec, m, rng):
    """Draw ``m`` Haar-distributed group elements as an ``(m, N, N)`` array."""
    N = spec.N
    fam = spec.family
    if fam in (Family.U, Family.SU):
        Z = (rng.standard_normal((m, N, N)) + 1j * rng.standard_normal((m, N, N))) / np.sqrt(2)
        g = _qr_haar(Z)
        if fam == Family.SU:
            det = np.linalg.det(g)
            # one of the N-th roots of det; any choice keeps Haar measure
            g = g / (det ** (1.0 / N))[:, None, None]
        return g
    if fam == Family.USp:
        n = spec.n
        Z = rng.standard_normal((m, N, n)) + 1j * rng.standard_normal((m, N, n))
        return _usp_gram_schmidt(Z, n)
    g = _qr_haar(rng.standard_normal((m, N, N)))
    if fam in (Family.SOeven, Family.SOodd):
        neg = np.linalg.det(g) < 0
        g[neg, :, 0] *= -1.0
    return g


def haar_sample(spec, seed, stream=0):
    """One Haar-random group element, reproducible from ``(seed, stream)``."""
    return haar_batch(spec, 1, rng_stream(seed, stream))[0]


def orbit_points(spec, F, g):
    """``Ad_g F`` for a batch of group elements."""
    X = cartan_embed(spec, F)
    out = g @ X @ np.swapaxes(g.conj(), -1, -2)
    return out if spec.is_complex else out.real


def _chunks(n_samples):
    sizes = [CHUNK] * (n_samples // CHUNK)
    if n_samples % CHUNK:
        sizes.append(n_samples % CHUNK)
    return sizes


def _map_chunks(spec, F, seed, n_samples, fn, workers):
    sizes = _chunks(n_samples)

    def run(k):
        g = haar_batch(spec, sizes[k], rng_stream(seed, k))
        return fn(orbit_points(spec, F, g))

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(run, range(len(sizes))))
    return [run(k) for k in range(len(sizes))]


def _pairing(spec, Y, X):
    """``<Y, X>`` for Cartan coordinates ``Y`` and a batch of algebra elements."""
    H = cartan_basis(spec)
    coords = -np.real(np.einsum("jab,mba->mj", H, X))
    return coords @ Y, coords


def mc_log_integral(spec, F, Y, n_samples=100_000, seed=0, workers=None):
    """Monte Carlo estimate of ``log E_Haar[exp(-<Y, Ad_g F>)]``.

    The standard error is the delta-method error of the log of the sample
    mean.
    """
    F = check_cartan(spec, F, "F")
    Y = check_cartan(spec, Y, "Y")
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")
    if not np.any(Y):
        return McEstimate(0.0, 0.0, n_samples, seed)

    def chunk(X):
        w = -_pairing(spec, Y, X)[0]
        return logsumexp(w), logsumexp(2.0 * w)

    parts = _map_chunks(spec, F, seed, n_samples, chunk, workers)
    ls1 = logsumexp([p[0] for p in parts])
    ls2 = logsumexp([p[1] for p in parts])
    log_mean = ls1 - np.log(n_samples)
    # var(w)/mean^2 = E[w^2]/E[w]^2 - 1
    rel_var = np.exp(ls2 - np.log(n_samples) - 2.0 * log_mean) - 1.0
    rel_var *= n_samples / (n_samples - 1)
    stderr = float(np.sqrt(max(rel_var, 0.0) / n_samples))
    return McEstimate(float(log_mean), stderr, n_samples, seed)


def mc_orbit_mean(spec, F, Y, n_samples=100_000, seed=0, workers=None):
    """Importance-weighted Cartan mean of the orbit under ``exp(-<Y, X>)``."""
    F = check_cartan(spec, F, "F")
    Y = check_cartan(spec, Y, "Y")

    def chunk(X):
        pair, coords = _pairing(spec, Y, X)
        return -pair, coords

    parts = _map_chunks(spec, F, seed, n_samples, chunk, workers)
    logw = np.concatenate([p[0] for p in parts])
    coords = np.concatenate([p[1] for p in parts])
    w = np.exp(logw - logw.max())
    w /= w.sum()
    mean = w @ coords
    # self-normalized importance sampling variance
    var = (w ** 2) @ (coords - mean) ** 2
    ess = float(1.0 / np.sum(w ** 2))
    return McEstimate(mean, np.sqrt(var), n_samples, seed, ess, ess < 100)


def mc_ball_mass(spec, F, X0, delta, n_samples=100_000, seed=0, workers=None):
    """Fraction of Haar-random orbit points within distance ``delta`` of ``X0``."""
    F = check_cartan(spec, F, "F")
    X0 = check_algebra(spec, np.asarray(X0), rtol=1e-10)
    if delta <= 0:
        raise ValueError("delta must be positive")

    def chunk(X):
        D = X - X0
        dist2 = np.real(np.einsum("mab,mab->m", D, D.conj()))
        return (dist2 <= delta * delta).astype(float)

    hits = np.concatenate(_map_chunks(spec, F, seed, n_samples, chunk, workers))
    p = float(hits.mean())
    stderr = float(hits.std(ddof=1) / np.sqrt(n_samples))
    return McEstimate(p, stderr, n_samples, seed)
