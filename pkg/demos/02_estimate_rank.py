"""Estimating the number of communities by sequential testing."""

from rirs import ModelSpec, estimate_k

# one SBM draw with three communities
X = ModelSpec("sbm", n=800, K=3, rho=0.1, r=0.6).generate(seed=5)
est = estimate_k(X, alpha=0.05, k_max=6, seed=42)
for t in est.trail:
    print(f"K0={t.k0}: T={t.statistic:+.3f} p={t.p_value:.3g} {'reject' if t.reject else 'accept'}")
print("estimated K:", est.k_hat)

# degree heterogeneity and mixed memberships do not change the procedure
X = ModelSpec("dcmm", n=1000, K=2, rho=0.1).generate(seed=6)
print("DCMM estimated K:", estimate_k(X, k_max=6, seed=43).k_hat)

# each K0 gets its own mask, so the whole trail replays from the master seed
assert estimate_k(X, k_max=6, seed=43).to_dict() == estimate_k(X, k_max=6, seed=43).to_dict()
