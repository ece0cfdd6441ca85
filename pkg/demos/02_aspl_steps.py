"""The path-length lower bound and its curved-step profile at degree 4.

The bound counts nodes level by level down an idealized BFS tree: 4 at
distance 1, 12 at distance 2, 36 at distance 3... A new level opens each
time N outgrows the tree, which bends the curve at N = 6, 18, 54, 162.
Measured ASPL of generated random regular graphs tracks the bound within
~15% and tightens as N grows.
"""

from topobench import aspl, aspl_lower_bound, gen_rrg
from topobench.bounds import aspl_bound_level

print(f"{'N':>4} {'levels':>6} {'d*':>8} {'measured':>9} {'ratio':>6}")
for n in (10, 20, 35, 50, 80, 110, 170, 250):
    k, rem = aspl_bound_level(n, 4)
    levels = k - 1 + (1 if rem > 0 else 0)
    bound = aspl_lower_bound(n, 4)
    measured = aspl(gen_rrg(n, 4, seed=7))
    print(f"{n:>4} {levels:>6} {bound:>8.4f} {measured:>9.4f} "
          f"{measured / bound:>6.3f}")

boundaries = []
prev = 1
for n in range(6, 300):
    k, rem = aspl_bound_level(n, 4)
    levels = k - 1 + (1 if rem > 0 else 0)
    if levels > prev:
        boundaries.append(n)
    prev = levels
print(f"\nnew distance levels open at N = {boundaries}")
