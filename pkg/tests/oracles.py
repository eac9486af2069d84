"""Independent reference computations used only by the tests.

Deliberately slow and literal: a cyclic Jacobi eigensolver and
double-loop evaluations of the statistics.
"""

import math

import numpy as np


def jacobi_eigh(a, tol=1e-15, max_sweeps=100):
    """Cyclic Jacobi rotations; returns (eigenvalues, eigenvectors as columns)."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    for _ in range(max_sweeps):
        off = math.sqrt(sum(a[p, q] ** 2 for p in range(n) for q in range(n) if p != q))
        if off <= tol * max(1.0, np.abs(a).max()):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    return np.diagonal(a).copy(), v


def magnitude_sorted(values):
    values = np.asarray(values)
    order = sorted(range(values.size), key=lambda i: (-abs(values[i]), values[i] < 0, i))
    return values[order], order


def brute_residual(x, k0):
    w, v = jacobi_eigh(x)
    _, order = magnitude_sorted(w)
    n = x.shape[0]
    res = [[x[i][j] for j in range(n)] for i in range(n)]
    for k in order[:k0]:
        for i in range(n):
            for j in range(n):
                res[i][j] -= w[k] * v[i, k] * v[j, k]
    return res


def brute_subsampled(res, y, m):
    n = len(res)
    num = 0.0
    den = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                num += res[i][j] * y[i][j]
                den += res[i][j] ** 2
    return math.sqrt(m) * num / math.sqrt(2.0 * den)


def brute_diagonal(res):
    n = len(res)
    num = sum(res[i][i] for i in range(n))
    den = sum(res[i][i] ** 2 for i in range(n))
    return num / math.sqrt(den)
