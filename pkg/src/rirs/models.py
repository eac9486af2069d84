"""Simulation designs: SBM, DCMM and low-rank plus uniform noise."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import InvalidArgument
from .seeds import rng_from
from .spectra import SymMatrix

FAMILIES = ("sbm", "dcmm", "lowrank_uniform")


def pn_set(K: int) -> np.ndarray:
    """Pure-node membership vectors: the rows of the ``K x K`` identity."""
    if K < 1:
        raise InvalidArgument(f"K must be >= 1, got {K}")
    return np.eye(K)


def mm_set(K: int, x: float) -> np.ndarray:
    """The three mixed-membership vectors ``(x, 1-x, 0...)``, ``(1-x, x, 0...)``, flat."""
    if K < 2:
        raise InvalidArgument(f"mixed membership needs K >= 2, got {K}")
    if not 0 < x < 1:
        raise InvalidArgument(f"x must lie in (0, 1), got {x}")
    out = np.zeros((3, K))
    out[0, :2] = (x, 1 - x)
    out[1, :2] = (1 - x, x)
    out[2, :] = 1.0 / K
    return out


def band_b_matrix(K: int, rho: float) -> np.ndarray:
    """``B_ij = rho^|i-j|`` off the diagonal and ``B_ii = (K + 1 - i) / K`` (1-based i)."""
    if K < 1:
        raise InvalidArgument(f"K must be >= 1, got {K}")
    if not 0 <= rho < 1:
        raise InvalidArgument(f"rho must lie in [0, 1), got {rho}")
    i = np.arange(K)
    B = float(rho) ** np.abs(i[:, None] - i[None, :]).astype(float)
    B[i, i] = (K - i) / K
    return B


def equal_blocks(n: int, K: int) -> np.ndarray:
    """Pure membership with ``K`` near-equal blocks; remainders go to the first blocks."""
    if not 1 <= K <= n:
        raise InvalidArgument(f"need 1 <= K <= n, got K={K}, n={n}")
    sizes = np.full(K, n // K)
    sizes[: n % K] += 1
    return np.repeat(np.eye(K), sizes, axis=0)


def _check_membership(Pi: np.ndarray):
    if Pi.ndim != 2 or np.any(Pi < 0) or not np.allclose(Pi.sum(axis=1), 1.0, rtol=0, atol=1e-12):
        raise InvalidArgument("membership rows must be probability vectors")


def _as_sym(h: np.ndarray) -> SymMatrix:
    h = 0.5 * (h + h.T)
    return SymMatrix._wrap(h, True)


def sbm_mean(Pi, B, r: float) -> SymMatrix:
    """``H = r * Pi B Pi^T`` for pure memberships.

    ``r = 1`` is allowed so the degree-corrected mean with unit weights can
    be compared against this one.
    """
    Pi = np.asarray(Pi, dtype=float)
    B = np.asarray(B, dtype=float)
    _check_membership(Pi)
    if not np.all((Pi == 0) | (Pi == 1)):
        raise InvalidArgument("SBM membership rows must be pure (unit vectors)")
    if not 0 < r <= 1:
        raise InvalidArgument(f"r must lie in (0, 1], got {r}")
    if r * B.max() > 1 or B.min() < 0:
        raise InvalidArgument("r * B must have entries in [0, 1]")
    return _as_sym(r * (Pi @ B @ Pi.T))


def dcmm_mean(theta, Pi, B) -> SymMatrix:
    """``H = Theta Pi B Pi^T Theta`` with ``Theta = diag(theta)``."""
    theta = np.asarray(theta, dtype=float)
    Pi = np.asarray(Pi, dtype=float)
    B = np.asarray(B, dtype=float)
    _check_membership(Pi)
    if theta.shape != (Pi.shape[0],) or np.any(theta <= 0):
        raise InvalidArgument("theta must be a positive vector with one entry per node")
    h = theta[:, None] * (Pi @ B @ Pi.T) * theta[None, :]
    if h.max() > 1 or h.min() < 0:
        raise InvalidArgument(f"DCMM mean has entries outside [0, 1] (max {h.max():.4g})")
    return _as_sym(h)


def dcmm_thetas(n: int, lo: float = 0.5, hi: float = 1.0, seed: int = 0) -> np.ndarray:
    if not 0 < lo <= hi <= 1:
        raise InvalidArgument(f"need 0 < lo <= hi <= 1, got lo={lo}, hi={hi}")
    if lo == hi:
        return np.full(n, float(lo))
    return rng_from(seed).uniform(lo, hi, size=n)


def dcmm_membership(n: int, K: int, n0: int, x: float = 0.2) -> np.ndarray:
    """``n0`` pure nodes per community, the rest spread over ``mm_set(K, x)``.

    Mixed nodes are split equally across the three mixed rows; any remainder
    is handed out one node at a time to the mixed rows in order.
    """
    if n0 < 0 or K * n0 > n:
        raise InvalidArgument(f"need 0 <= K*n0 <= n, got K={K}, n0={n0}, n={n}")
    rest = n - K * n0
    counts = np.full(3, rest // 3)
    counts[: rest % 3] += 1
    pure = np.repeat(pn_set(K), n0, axis=0)
    mixed = np.repeat(mm_set(K, x), counts, axis=0)
    return np.vstack([pure, mixed])


def sample_adjacency(H, selfloops: bool, seed: int) -> SymMatrix:
    """Independent Bernoulli(H_ij) edges for ``i <= j``, mirrored below.

    Without self-loops the diagonal is zeroed after sampling.
    """
    h = np.asarray(H, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InvalidArgument("H must be square")
    if h.min() < 0 or h.max() > 1:
        raise InvalidArgument("H entries must lie in [0, 1]")
    n = h.shape[0]
    u = rng_from(seed).random((n, n))
    x = np.triu(u < h).astype(float)
    if not selfloops:
        np.fill_diagonal(x, 0.0)
    x += np.triu(x, 1).T
    return SymMatrix._wrap(x, selfloops)


def uniform_noise(n: int, rng: np.random.Generator) -> np.ndarray:
    """Symmetric noise with i.i.d. Uniform(-1, 1) entries on and above the diagonal."""
    u = np.triu(rng.uniform(-1.0, 1.0, size=(n, n)))
    return u + np.triu(u, 1).T


def lowrank_uniform(n: int, n1: int, K: int, seed: int):
    """Low-rank mean ``V D V^T`` plus symmetric uniform noise.

    ``V`` stacks the top-``K`` eigenvectors of an ``n1 x n1`` Gaussian
    Wigner matrix over an equal-block membership scaled to unit columns, and
    halves both parts by ``sqrt(2)``; ``D = n * diag(K, ..., 1)``.  Returns
    ``(X, H, V, D)`` with ``X`` flagged as carrying self-loops.
    """
    if not 1 <= K <= n1 < n:
        raise InvalidArgument(f"need 1 <= K <= n1 < n, got K={K}, n1={n1}, n={n}")
    if (n - n1) % K:
        raise InvalidArgument(f"K={K} must divide n - n1 = {n - n1}")
    rng = rng_from(seed)
    g = rng.standard_normal((n1, n1))
    wig = np.triu(g) + np.triu(g, 1).T
    _, vecs = np.linalg.eigh(wig)
    V1 = vecs[:, ::-1][:, :K]
    V2 = math.sqrt(K) / math.sqrt(n - n1) * equal_blocks(n - n1, K)
    V = np.vstack([V1, V2]) / math.sqrt(2.0)
    D = n * np.arange(K, 0, -1, dtype=float)
    H = _as_sym((V * D) @ V.T)
    X = H.entries + uniform_noise(n, rng)
    return SymMatrix._wrap(X, True), H, V, np.diag(D)


@dataclass(frozen=True)
class ModelSpec:
    """One simulation design.

    ``n0`` is the number of pure nodes per community for ``dcmm`` (None
    picks 0.35 n for K = 2 and 0.25 n otherwise); ``n1`` is the Wigner block
    size for ``lowrank_uniform`` (None picks n / 2).  For ``lowrank_uniform``
    ``selfloops=False`` zeroes the diagonal of the generated matrix.
    """

    family: str = "sbm"
    n: int = 1000
    K: int = 2
    r: float = 0.5
    rho: float = 0.1
    x: float = 0.2
    n0: int | None = None
    theta_lo: float = 0.5
    theta_hi: float = 1.0
    n1: int | None = None
    selfloops: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidArgument(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.n < 2 or self.K < 1 or self.K > self.n:
            raise InvalidArgument(f"need n >= 2 and 1 <= K <= n, got n={self.n}, K={self.K}")
        if self.family == "sbm" and not 0 < self.r < 1:
            raise InvalidArgument(f"r must lie in (0, 1), got {self.r}")
        if self.family != "lowrank_uniform" and not 0 <= self.rho < 1:
            raise InvalidArgument(f"rho must lie in [0, 1), got {self.rho}")
        if self.family == "dcmm":
            if not 0 < self.x < 1:
                raise InvalidArgument(f"x must lie in (0, 1), got {self.x}")
            if self.K < 2:
                raise InvalidArgument("dcmm needs K >= 2")

    @property
    def pure_per_community(self) -> int:
        if self.n0 is not None:
            return int(self.n0)
        return int(round((0.35 if self.K == 2 else 0.25) * self.n))

    @property
    def wigner_size(self) -> int:
        return int(self.n1) if self.n1 is not None else self.n // 2

    def mean(self, seed: int | None = None) -> SymMatrix:
        """Mean matrix; ``dcmm`` and ``lowrank_uniform`` draw their random
        ingredients from ``seed``."""
        if self.family == "sbm":
            return sbm_mean(equal_blocks(self.n, self.K), band_b_matrix(self.K, self.rho), self.r)
        if self.family == "dcmm":
            Pi = dcmm_membership(self.n, self.K, self.pure_per_community, self.x)
            theta = dcmm_thetas(self.n, self.theta_lo, self.theta_hi, 0 if seed is None else seed)
            return dcmm_mean(theta, Pi, band_b_matrix(self.K, self.rho))
        return lowrank_uniform(self.n, self.wigner_size, self.K, seed)[1]

    def generate(self, seed: int) -> SymMatrix:
        """One observed matrix, deterministic in ``seed``."""
        if self.family == "lowrank_uniform":
            X = lowrank_uniform(self.n, self.wigner_size, self.K, seed)[0]
            if not self.selfloops:
                a = X.entries.copy()
                np.fill_diagonal(a, 0.0)
                X = SymMatrix._wrap(a, False)
            return X
        ss = np.random.SeedSequence(int(seed)).spawn(2)
        mean_seed = int(ss[0].generate_state(1, np.uint64)[0])
        edge_seed = int(ss[1].generate_state(1, np.uint64)[0])
        H = self.mean(mean_seed)
        return sample_adjacency(H, self.selfloops, edge_seed)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> ModelSpec:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InvalidArgument(f"unknown ModelSpec fields: {sorted(unknown)}")
        return cls(**d)
