"""Networks with self-loops can use the diagonal statistic, which needs no mask."""

import numpy as np

from rirs import InvalidVariant, ModelSpec, strip_selfloops, test_rank

model = ModelSpec("sbm", n=1000, K=3, rho=0.1, r=0.5, selfloops=True)
X = model.generate(seed=3)
print("has self-loops:", X.has_selfloops, "| diagonal entries set:", int(np.diagonal(X.entries).sum()))

for k0 in (2, 3):
    d = test_rank(X, k0)  # auto: diagonal statistic, no seed needed
    s = test_rank(X, k0, seed=9, variant="subsampled")
    print(f"K0={k0}: diagonal T={d.statistic:+.3f} ({'reject' if d.reject else 'accept'}), "
          f"subsampled T={s.statistic:+.3f} ({'reject' if s.reject else 'accept'})")

# once the diagonal is zeroed it carries no randomness and the diagonal test refuses to run
try:
    test_rank(strip_selfloops(X), 3, variant="diagonal")
except InvalidVariant as exc:
    print("stripped matrix:", exc)
