"""The test is not specific to networks: a spiked matrix with uniform noise."""

import numpy as np

from rirs import estimate_k, eigs_topk, test_rank
from rirs.models import lowrank_uniform

X, H, V, D = lowrank_uniform(n=300, n1=150, K=2, seed=11)
print("signal eigenvalues:", np.diag(D))
print("top observed eigenvalues:", np.round(eigs_topk(X, 4).eigenvalues, 1))

# the noise has a random diagonal, so the diagonal statistic applies directly
for k0 in (1, 2):
    out = test_rank(X, k0)
    print(f"K0={k0}: {out.variant} T={out.statistic:+.3f} p={out.p_value:.3g}")
print("estimated rank:", estimate_k(X, k_max=5).k_hat)
