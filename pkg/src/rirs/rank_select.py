"""Sequential estimation of the rank by repeated testing."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import _check_alpha, _decide, outcome_from_decomposition, resolve_variant, TestOutcome
from .errors import DegenerateDenominator, InvalidArgument
from .seeds import derive_seed
from .spectra import SymMatrix, eigs_topk

DEFAULT_K_MAX = 15


@dataclass(frozen=True)
class RankEstimate:
    k_hat: int | None
    trail: list[TestOutcome] = field(default_factory=list)
    alpha: float = 0.05
    k_max: int = DEFAULT_K_MAX

    @property
    def exhausted(self) -> bool:
        return self.k_hat is None

    def to_dict(self) -> dict:
        return {
            "k_hat": self.k_hat,
            "exhausted": self.exhausted,
            "alpha": self.alpha,
            "k_max": self.k_max,
            "trail": [t.to_dict() for t in self.trail],
        }


def mask_seed(seed: int, k0: int) -> int:
    """Sub-seed of the mask used when testing ``k0`` under master ``seed``."""
    return derive_seed(seed, k0)


def estimate_k(
    X: SymMatrix,
    alpha: float = 0.05,
    k_max: int = DEFAULT_K_MAX,
    m: float | None = None,
    seed: int | None = None,
    variant: str = "auto",
) -> RankEstimate:
    """Test ``k0 = 1, 2, ...`` and return the first ``k0`` not rejected.

    Each ``k0`` gets a fresh mask seeded by ``mask_seed(seed, k0)``.  An
    exactly zero residual at some ``k0`` certifies ``rank <= k0``; the sweep
    stops there with a ``degenerate`` outcome.
    """
    _check_alpha(alpha)
    if not isinstance(k_max, (int, np.integer)) or k_max < 1:
        raise InvalidArgument(f"k_max must be a positive integer, got {k_max!r}")
    if not k_max < X.n:
        raise InvalidArgument(f"k_max must be < n={X.n}, got {k_max}")
    variant = resolve_variant(X, variant)
    if variant == "subsampled" and seed is None:
        raise InvalidArgument("a seed is required for the subsampled statistic")

    decomp = eigs_topk(X, int(k_max))
    trail = []
    for k0 in range(1, k_max + 1):
        sub = None if seed is None else mask_seed(seed, k0)
        try:
            out = outcome_from_decomposition(X, decomp, k0, alpha, variant, m, sub)
        except DegenerateDenominator:
            out = _decide(variant, k0, 0.0, alpha, seed=sub, degenerate=True)
            trail.append(out)
            return RankEstimate(k0, trail, alpha, int(k_max))
        trail.append(out)
        if not out.reject:
            return RankEstimate(k0, trail, alpha, int(k_max))
    return RankEstimate(None, trail, alpha, int(k_max))
