"""Residual-subsampling rank test.

Given a symmetric data matrix ``X`` and a hypothesised rank ``k0``, the top
``k0`` spectral components are removed and the residual is summarised by one
of two self-normalised statistics:

* ``subsampled``: ``sqrt(m) * sum_{i != j} w_ij Y_ij / sqrt(2 sum_{i != j} w_ij^2)``
  where ``Y`` is a symmetric Bernoulli(1/m) mask over off-diagonal pairs;
* ``diagonal``: ``sum_i w_ii / sqrt(sum_i w_ii^2)``, valid only when the
  diagonal of ``X`` carries random data (self-loops).

Both are compared with standard normal quantiles, two-sided.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateDenominator, InvalidArgument, InvalidVariant
from .normal import normal_quantile, two_sided_p
from .seeds import rng_from
from .spectra import SpectralDecomposition, SymMatrix, eigs_topk

VARIANTS = ("subsampled", "diagonal", "fullsum_diagnostic")


@dataclass(frozen=True, eq=False)
class SubsampleMask:
    """Sampled off-diagonal pairs ``(rows[t], cols[t])`` with ``rows < cols``."""

    n: int
    m: float
    seed: int | None
    rows: np.ndarray
    cols: np.ndarray

    @property
    def n_pairs(self) -> int:
        return int(self.rows.size)

    def pairs(self) -> set[tuple[int, int]]:
        return set(zip(self.rows.tolist(), self.cols.tolist()))

    def dense(self) -> np.ndarray:
        y = np.zeros((self.n, self.n), dtype=bool)
        y[self.rows, self.cols] = True
        y[self.cols, self.rows] = True
        return y

    @classmethod
    def from_pairs(cls, n: int, m: float, pairs, seed=None) -> SubsampleMask:
        p = np.array(sorted((min(i, j), max(i, j)) for i, j in pairs), dtype=np.intp).reshape(-1, 2)
        if p.size and (np.any(p[:, 0] == p[:, 1]) or p.min() < 0 or p.max() >= n):
            raise InvalidArgument("mask pairs must be off-diagonal indices in [0, n)")
        if m < 1:
            raise InvalidArgument(f"m must be >= 1, got {m}")
        return cls(int(n), float(m), seed, p[:, 0].copy(), p[:, 1].copy())


@dataclass(frozen=True)
class TestOutcome:
    """Result of one rank test.

    ``degenerate`` marks a residual with an exactly zero normaliser (the
    statistic is then reported as 0).  ``empty_mask`` marks a subsampled
    test whose mask selected no pairs.
    """

    __test__ = False

    variant: str
    k0: int
    statistic: float
    p_value: float
    alpha: float
    reject: bool
    m: float | None = None
    seed: int | None = None
    n_sampled_pairs: int | None = None
    degenerate: bool = False
    empty_mask: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


@lru_cache(maxsize=4)
def _upper_pairs(n: int):
    r, c = np.triu_indices(n, 1)
    r.setflags(write=False)
    c.setflags(write=False)
    return r, c


def default_m(n: int) -> float:
    if n < 2:
        raise InvalidArgument(f"n must be >= 2, got {n}")
    return math.sqrt(n)


def sample_mask(n: int, m: float, seed: int) -> SubsampleMask:
    """Include each pair ``i < j`` independently with probability ``1/m``.

    Pairs are visited in row-major upper-triangular order, one uniform draw
    each, from a generator seeded only by ``seed``.
    """
    if n < 2:
        raise InvalidArgument(f"n must be >= 2, got {n}")
    if not m >= 1:
        raise InvalidArgument(f"m must be >= 1 (inclusion probability 1/m), got {m}")
    r, c = _upper_pairs(int(n))
    keep = rng_from(seed).random(r.size) < 1.0 / m
    return SubsampleMask(int(n), float(m), int(seed), r[keep], c[keep])


def full_mask(n: int) -> SubsampleMask:
    r, c = _upper_pairs(int(n))
    return SubsampleMask(int(n), 1.0, None, r, c)


def residual(X: SymMatrix, decomp: SpectralDecomposition, k0: int) -> SymMatrix:
    """``X - sum_{k <= k0} d_k v_k v_k^T`` as a new :class:`SymMatrix`."""
    a = np.asarray(X)
    if decomp.n != a.shape[0]:
        raise InvalidArgument(f"decomposition has dimension {decomp.n}, matrix has {a.shape[0]}")
    if not 0 <= k0 <= decomp.k:
        raise InvalidArgument(f"k0={k0} outside [0, {decomp.k}]")
    if k0 == 0:
        return SymMatrix._wrap(a.copy(), X.has_selfloops)
    v = decomp.eigenvectors[:, :k0]
    w = a - (v * decomp.eigenvalues[:k0]) @ v.T
    w = 0.5 * (w + w.T)
    return SymMatrix._wrap(w, X.has_selfloops)


def _zero_floor(n: int, scale: float) -> float:
    """Squared norm below which a residual is treated as exactly zero.

    Removing an exact low-rank part in floating point leaves rounding noise
    of order ``n * eps * ||X||``; statistics built on that noise are
    meaningless, so it counts as a perfect fit.
    """
    return (100.0 * n * np.finfo(float).eps * scale) ** 2


def _offdiag_sumsq(w: np.ndarray) -> float:
    sq = w * w
    np.fill_diagonal(sq, 0.0)
    return math.fsum(sq.sum(axis=1))


def _subsampled(w: np.ndarray, rows: np.ndarray, cols: np.ndarray, m: float, scale: float = 0.0) -> float:
    den = _offdiag_sumsq(w)
    if den <= _zero_floor(w.shape[0], scale):
        raise DegenerateDenominator("off-diagonal residual is identically zero; the test is undefined")
    if rows.size == 0:
        return 0.0
    num = 2.0 * math.fsum(w[rows, cols])
    return math.sqrt(m) * num / math.sqrt(2.0 * den)


def statistic_subsampled(w_hat, mask: SubsampleMask) -> float:
    w = np.asarray(w_hat, dtype=float)
    if w.shape != (mask.n, mask.n):
        raise InvalidArgument(f"mask is for n={mask.n}, residual has shape {w.shape}")
    if mask.n_pairs == 0:
        warnings.warn("subsample mask is empty; statistic set to 0", RuntimeWarning, stacklevel=2)
    return _subsampled(w, mask.rows, mask.cols, mask.m)


def statistic_fullsum(w_hat) -> float:
    """Unsubsampled statistic (``m = 1``, every pair).

    Diagnostic only: when a leading eigenvector is close to flat the
    residual sum is dominated by estimation error and the statistic is far
    from N(0, 1).  Do not use it as a test.
    """
    w = np.asarray(w_hat, dtype=float)
    return statistic_subsampled(w, full_mask(w.shape[0]))


def _diagonal(d: np.ndarray, scale: float = 0.0) -> float:
    den = math.fsum(d * d)
    if den <= _zero_floor(d.shape[0], scale):
        raise DegenerateDenominator("diagonal of the residual is identically zero")
    return math.fsum(d) / math.sqrt(den)


def statistic_diagonal(w_hat: SymMatrix) -> float:
    if not isinstance(w_hat, SymMatrix):
        raise InvalidArgument("statistic_diagonal needs a SymMatrix carrying the self-loop flag")
    if not w_hat.has_selfloops:
        raise InvalidVariant("diagonal statistic requires self-loop data; the diagonal was zeroed")
    return _diagonal(np.diagonal(w_hat.entries).copy())


def validate_m(n: int, m: float, theta_hat: float, eps: float) -> list[str]:
    """Check ``m`` against the admissible subsampling windows.

    ``theta_hat`` estimates the largest entry variance (edge density is a
    reasonable proxy for networks).  A bound ``a << m`` counts as satisfied
    when ``10 * a <= m``.  Returns human-readable warnings; never raises for
    an out-of-window ``m``.
    """
    if not m >= 1:
        raise InvalidArgument(f"m must be >= 1, got {m}")
    if not 0 < theta_hat <= 1:
        raise InvalidArgument(f"theta_hat must lie in (0, 1], got {theta_hat}")
    if not eps > 0:
        raise InvalidArgument(f"eps must be positive, got {eps}")
    if n < 2:
        raise InvalidArgument(f"n must be >= 2, got {n}")
    out = []
    if m == 1:
        out.append("m = 1 disables subsampling; the full-sum statistic is not a valid test")
    log_n = math.log(n)
    lo = n**eps / theta_hat * log_n + n ** (eps - 1) * theta_hat**-2 * log_n**2
    hi = n**2 * theta_hat / log_n**2
    lo_s = n ** (1 - eps)
    hi_s = n ** (1 + 2 * eps) / log_n
    for name, a, b in (("general", lo, hi), ("sufficient", lo_s, hi_s)):
        if 10 * a > m:
            out.append(f"m={m:.4g} is not well above the {name} lower bound {a:.4g}")
        if 10 * m > b:
            out.append(f"m={m:.4g} is not well below the {name} upper bound {b:.4g}")
    return out


def _decide(variant, k0, stat, alpha, **extra) -> TestOutcome:
    crit = normal_quantile(1.0 - alpha / 2.0)
    return TestOutcome(
        variant=variant, k0=k0, statistic=float(stat), p_value=two_sided_p(stat),
        alpha=alpha, reject=bool(abs(stat) >= crit), **extra,
    )


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise InvalidArgument(f"alpha must lie in (0, 1), got {alpha}")


def resolve_variant(X: SymMatrix, variant: str) -> str:
    if variant == "auto":
        return "diagonal" if X.has_selfloops else "subsampled"
    if variant not in VARIANTS:
        raise InvalidArgument(f"unknown variant {variant!r}; expected auto or one of {VARIANTS}")
    if variant == "diagonal" and not X.has_selfloops:
        raise InvalidVariant("diagonal statistic requires self-loop data; the diagonal was zeroed")
    return variant


def outcome_from_decomposition(
    X: SymMatrix,
    decomp: SpectralDecomposition,
    k0: int,
    alpha: float,
    variant: str,
    m: float | None = None,
    seed: int | None = None,
) -> TestOutcome:
    """Run one test reusing an existing decomposition of ``X``.

    Raises :class:`DegenerateDenominator` when the statistic is undefined,
    including residuals that vanish up to rounding relative to ``||X||_F``.
    """
    variant = resolve_variant(X, variant)
    scale = decomp.source_norm
    if variant == "diagonal":
        a = np.asarray(X)
        v = decomp.eigenvectors[:, :k0]
        d = np.diagonal(a) - (v * v) @ decomp.eigenvalues[:k0]
        return _decide("diagonal", k0, _diagonal(d, scale), alpha)
    w = residual(X, decomp, k0).entries
    if variant == "fullsum_diagnostic":
        mask = full_mask(X.n)
    else:
        if seed is None:
            raise InvalidArgument("a seed is required for the subsampled statistic")
        mask = sample_mask(X.n, default_m(X.n) if m is None else m, seed)
    stat = _subsampled(w, mask.rows, mask.cols, mask.m, scale)
    return _decide(
        variant, k0, stat, alpha, m=mask.m, seed=mask.seed,
        n_sampled_pairs=mask.n_pairs, empty_mask=mask.n_pairs == 0,
    )


def test_rank(
    X: SymMatrix,
    k0: int,
    alpha: float = 0.05,
    m: float | None = None,
    seed: int | None = None,
    variant: str = "auto",
    decomp: SpectralDecomposition | None = None,
) -> TestOutcome:
    """Test ``H0: rank = k0`` against ``rank > k0`` at level ``alpha``.

    The variant defaults to ``diagonal`` when ``X`` carries self-loops and
    ``subsampled`` otherwise.  ``m`` defaults to ``sqrt(n)``.  Rejects iff
    ``|T| >= z_{1 - alpha/2}``.
    """
    if not isinstance(X, SymMatrix):
        raise InvalidArgument("X must be a SymMatrix")
    _check_alpha(alpha)
    if not isinstance(k0, (int, np.integer)) or not 1 <= k0 < X.n:
        raise InvalidArgument(f"k0 must be an integer in [1, {X.n - 1}], got {k0!r}")
    if decomp is None or decomp.k < k0:
        decomp = eigs_topk(X, int(k0))
    return outcome_from_decomposition(X, decomp, int(k0), alpha, variant, m, seed)


test_rank.__test__ = False
