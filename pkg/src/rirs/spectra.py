"""Symmetric matrices and top-k eigendecomposition by eigenvalue magnitude."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import InvalidArgument, NumericalFailure

DEFAULT_TOL = 1e-10


class SymMatrix:
    """Dense symmetric real matrix with a flag for data-bearing diagonals.

    The constructor mirrors one triangle of ``entries`` onto the other, so the
    stored array is exactly symmetric whatever the input.  When
    ``has_selfloops`` is None it is inferred from the diagonal (any nonzero
    entry means True); when it is False the diagonal must already be zero.
    """

    __slots__ = ("_a", "has_selfloops")

    def __init__(self, entries, has_selfloops: bool | None = None, triangle: str = "upper"):
        a = np.array(entries, dtype=float, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidArgument(f"expected a non-empty square matrix, got shape {a.shape}")
        if triangle == "upper":
            a = np.triu(a) + np.triu(a, 1).T
        elif triangle == "lower":
            a = np.tril(a) + np.tril(a, -1).T
        else:
            raise InvalidArgument(f"triangle must be 'upper' or 'lower', got {triangle!r}")
        if not np.all(np.isfinite(a)):
            raise InvalidArgument("matrix entries must be finite")
        diag_zero = not np.any(np.diagonal(a))
        if has_selfloops is None:
            has_selfloops = not diag_zero
        elif not has_selfloops and not diag_zero:
            raise InvalidArgument("has_selfloops=False requires a zero diagonal")
        a.setflags(write=False)
        self._a = a
        self.has_selfloops = bool(has_selfloops)

    @classmethod
    def _wrap(cls, a: np.ndarray, has_selfloops: bool) -> SymMatrix:
        """Adopt an exactly symmetric array without copying.

        Used for derived matrices such as residuals, whose diagonal may be
        nonzero even when the source had no self-loops: the flag then
        records where the data came from, not the diagonal's contents.
        """
        obj = cls.__new__(cls)
        a.setflags(write=False)
        obj._a = a
        obj.has_selfloops = bool(has_selfloops)
        return obj

    @property
    def entries(self) -> np.ndarray:
        return self._a

    @property
    def n(self) -> int:
        return self._a.shape[0]

    def frobenius(self) -> float:
        return float(np.linalg.norm(self._a))

    def __array__(self, dtype=None, copy=None):
        return self._a if dtype is None else self._a.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return self.has_selfloops == other.has_selfloops and np.array_equal(self._a, other._a)

    __hash__ = None

    def __repr__(self):
        return f"SymMatrix(n={self.n}, has_selfloops={self.has_selfloops})"


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Top-k eigenpairs, eigenvalues ordered by decreasing magnitude.

    ``eigenvectors`` is an ``(n, k)`` array whose columns are the unit
    eigenvectors.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source_norm: float

    @property
    def k(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def n(self) -> int:
        return self.eigenvectors.shape[0]

    def truncate(self, k: int) -> SpectralDecomposition:
        if not 0 <= k <= self.k:
            raise InvalidArgument(f"cannot truncate {self.k} pairs to {k}")
        return SpectralDecomposition(self.eigenvalues[:k], self.eigenvectors[:, :k], self.source_norm)


def canonical_sign(v) -> np.ndarray:
    """Flip ``v`` so that its largest-magnitude entry is positive.

    Ties on magnitude go to the smallest index.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0 or not np.any(v):
        raise InvalidArgument("canonical_sign needs a nonzero vector")
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v.copy()


def _magnitude_order(values: np.ndarray) -> np.ndarray:
    # decreasing |value|, positive before negative, then by position
    idx = np.arange(values.size)
    return np.lexsort((idx, values < 0, -np.abs(values)))


def _tred2(a: np.ndarray):
    """Householder reduction to tridiagonal form, accumulating transforms.

    Port of the EISPACK ``tred2`` routine with the inner loops vectorised.
    Returns diagonal ``d``, sub-diagonal ``e`` (``e[0] == 0``) and the
    orthogonal matrix ``V``.
    """
    n = a.shape[0]
    V = a.copy()
    d = V[n - 1].copy()
    e = np.zeros(n)
    for i in range(n - 1, 0, -1):
        scale = np.abs(d[:i]).sum()
        h = 0.0
        if scale == 0.0:
            e[i] = d[i - 1]
            d[:i] = V[i - 1, :i]
            V[i, :i] = 0.0
            V[:i, i] = 0.0
        else:
            d[:i] /= scale
            h = float(d[:i] @ d[:i])
            f = d[i - 1]
            g = math.sqrt(h)
            if f > 0:
                g = -g
            e[i] = scale * g
            h -= f * g
            d[i - 1] = f - g
            dv = d[:i]
            low = np.tril(V[:i, :i])
            V[:i, i] = dv
            ev = low @ dv + low.T @ dv - np.diagonal(low) * dv
            ev /= h
            hh = float(ev @ dv) / (h + h)
            ev -= hh * dv
            V[:i, :i] -= np.tril(np.outer(ev, dv) + np.outer(dv, ev))
            e[:i] = ev
            d[:i] = V[i - 1, :i]
            V[i, :i] = 0.0
        d[i] = h
    for i in range(n - 1):
        V[n - 1, i] = V[i, i]
        V[i, i] = 1.0
        h = d[i + 1]
        if h != 0.0:
            dk = V[: i + 1, i + 1] / h
            g = V[: i + 1, i + 1] @ V[: i + 1, : i + 1]
            V[: i + 1, : i + 1] -= np.outer(dk, g)
        V[: i + 1, i + 1] = 0.0
    d = V[n - 1].copy()
    V[n - 1] = 0.0
    V[n - 1, n - 1] = 1.0
    e[0] = 0.0
    return d, e, V


def _tql2(d: np.ndarray, e: np.ndarray, V: np.ndarray, max_iter: int):
    """Implicit-shift QL on a tridiagonal matrix, rotating ``V`` in place."""
    n = d.size
    e = np.append(e[1:], 0.0)
    f = 0.0
    tst1 = 0.0
    eps = np.finfo(float).eps
    total = 0
    for l in range(n):
        tst1 = max(tst1, abs(d[l]) + abs(e[l]))
        m = l
        while m < n - 1 and abs(e[m]) > eps * tst1:
            m += 1
        if m > l:
            while True:
                total += 1
                if total > max_iter:
                    raise NumericalFailure(
                        f"QL iteration did not converge within {max_iter} sweeps "
                        f"(off-diagonal residual {abs(e[l]):.3e} at index {l})"
                    )
                g = d[l]
                p = (d[l + 1] - g) / (2.0 * e[l])
                r = math.hypot(p, 1.0)
                if p < 0:
                    r = -r
                d[l] = e[l] / (p + r)
                d[l + 1] = e[l] * (p + r)
                dl1 = d[l + 1]
                h = g - d[l]
                d[l + 2:] -= h
                f += h
                p = d[m]
                c = c2 = c3 = 1.0
                el1 = e[l + 1]
                s = s2 = 0.0
                for i in range(m - 1, l - 1, -1):
                    c3 = c2
                    c2 = c
                    s2 = s
                    g = c * e[i]
                    h = c * p
                    r = math.hypot(p, e[i])
                    e[i + 1] = s * r
                    s = e[i] / r
                    c = p / r
                    p = c * d[i] - s * g
                    d[i + 1] = h + s * (c * g + s * d[i])
                    vi = V[:, i].copy()
                    vi1 = V[:, i + 1]
                    V[:, i] = c * vi - s * vi1
                    V[:, i + 1] = s * vi + c * vi1
                p = -s * s2 * c3 * el1 * e[l] / dl1
                e[l] = s * p
                d[l] = c * p
                if abs(e[l]) <= eps * tst1:
                    break
        d[l] += f
        e[l] = 0.0
    return d, V


def eigh_ql(a) -> tuple[np.ndarray, np.ndarray]:
    """Full symmetric eigendecomposition by Householder + implicit QL.

    Eigenvalues come back in ascending order.  Pure numpy, O(n^3) with an
    interpreted inner loop; meant for small matrices and cross-checks.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if n == 1:
        return a[0].copy(), np.ones((1, 1))
    d, e, V = _tred2(a)
    d, V = _tql2(d, e, V, max_iter=50 * n)
    order = np.argsort(d, kind="stable")
    return d[order], V[:, order]


def _lapack_candidates(a: np.ndarray, k: int):
    n = a.shape[0]
    if 2 * k >= n:
        return linalg.eigh(a, check_finite=False)
    lo_w, lo_v = linalg.eigh(a, subset_by_index=[0, k - 1], driver="evr", check_finite=False)
    hi_w, hi_v = linalg.eigh(a, subset_by_index=[n - k, n - 1], driver="evr", check_finite=False)
    return np.concatenate([lo_w, hi_w]), np.hstack([lo_v, hi_v])


def eigs_topk(A, k: int, tol: float = DEFAULT_TOL, method: str = "lapack") -> SpectralDecomposition:
    """Return the ``k`` eigenpairs of ``A`` with largest ``|eigenvalue|``.

    ``method="lapack"`` extracts the ``k`` algebraically smallest and
    largest pairs with the MRRR driver and merges them; ``method="ql"`` runs
    the in-package Householder/QL solver on the full matrix.  Every returned
    pair is checked against ``||A v - d v|| <= 100 * tol * max(1, ||A||_F)``.
    """
    a = np.asarray(A, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgument(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise InvalidArgument(f"k must be an integer in [1, {n}], got {k!r}")
    if not np.all(np.isfinite(a)):
        raise InvalidArgument("matrix entries must be finite")
    if method == "lapack":
        w, v = _lapack_candidates(a, int(k))
    elif method == "ql":
        w, v = eigh_ql(a)
    else:
        raise InvalidArgument(f"unknown eigensolver method {method!r}")

    order = _magnitude_order(w)[:k]
    vals = w[order].copy()
    vecs = np.empty((n, k))
    for j, idx in enumerate(order):
        vecs[:, j] = canonical_sign(v[:, idx])

    norm = float(np.linalg.norm(a))
    bound = 100.0 * tol * max(1.0, norm)
    resid = np.linalg.norm(a @ vecs - vecs * vals, axis=0)
    worst = float(resid.max())
    if not worst <= bound:
        raise NumericalFailure(
            f"eigenpair residual {worst:.3e} exceeds {bound:.3e} "
            f"(method={method}, n={n}, k={k})"
        )
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return SpectralDecomposition(vals, vecs, norm)
