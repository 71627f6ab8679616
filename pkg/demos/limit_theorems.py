"""Convergence trajectories of the three limit theorems.

For the pinned Markov figure environment this prints, along a geometric
time grid:
  - the law-of-large-numbers deviation max_s |X_n/n - 1/mu| over Monte Carlo
    samples,
  - the Kolmogorov-Smirnov distance of the standardized position law to the
    normal CDF,
  - the sqrt(n)-scaled sup-distance of the pmf to the modulated-Gaussian
    local-limit prediction,
  - the hitting-time Gaussian approximation error k * sup_n |P(T_k=n)-f_k(n)|.

Run:  python3 demos/limit_theorems.py
"""

import frozenwalk as fw
from frozenwalk import analysis

GRID = (2**9, 2**11, 2**13)

env = fw.generate(fw.FIGURE_MARKOV, length=GRID[-1] + 1, seed=43)
params = fw.limit_params(fw.FIGURE_MARKOV)
print(f"mu = {params.mu:.6f}, sigma^2 = {params.sigma2:.6f}, "
      f"sigma~^2 = {params.sigma_tilde2:.6f}\n")

print(f"{'n':>6}  {'LLN dev':>9}  {'CLT KS':>9}  {'LLT error':>9}")
for n in GRID:
    lln = analysis.lln_check(env, params, n, seeds=100)
    ks = analysis.clt_error(env, params, n)
    llt, _ = analysis.llt_error(env, params, n)
    print(f"{n:>6}  {lln:>9.4f}  {ks:>9.4f}  {llt:>9.4f}")

print(f"\n{'k':>6}  {'hitting error':>13}")
for k in (2**6, 2**8, 2**10, 2**12):
    print(f"{k:>6}  {analysis.hitting_llt_error(env, k):>13.4f}")
