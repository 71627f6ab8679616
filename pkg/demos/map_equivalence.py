"""Exact equivalence between the interval map and the walk.

Pushes Uniform[0,1) through n exact applications of the piecewise-affine map
and compares the resulting cell masses with the walk's probability mass
function, in exact rational arithmetic.  The two agree as rationals, term by
term, and every cell keeps an exactly uniform fractional part.

Run:  python3 demos/map_equivalence.py
"""

import frozenwalk as fw

N = 10

env = fw.generate(fw.FIGURE_MARKOV, length=N + 1, seed=43)
law = fw.cell_law(fw.pushforward(env, N))
pmf = fw.walk_pmf(env, N, engine="exact")

print(f"n = {N}, environment entries: {[str(w) for w in env.omega_exact[:N]]}")
print(f"{'cell':>4}  {'map mass':>12}  {'walk mass':>12}  {'equal':>5}  {'uniform':>7}")
for k in range(N + 1):
    m_map = law.masses[k]
    m_walk = pmf.prob(k)
    print(f"{k:>4}  {str(m_map):>12}  {str(m_walk):>12}  "
          f"{str(m_map == m_walk):>5}  {str(law.uniform[k]):>7}")

assert law.mass_vector(N) == list(pmf.masses)
print("\nAll cell masses equal the walk pmf exactly (rational equality).")
