"""Random regular graphs against the throughput and path-length bounds.

Fixes N=40 switches and sweeps the switch-switch degree r. For each degree
we measure max concurrent flow throughput under a server permutation and
under switch-aggregated all-to-all traffic, then compare against the
degree-based upper bound N*r / (<D> * f). Dense all-to-all instances land
exactly on the bound; that is the headline effect this workbench reproduces.
"""

import numpy as np

from topobench import (
    all_to_all,
    aspl_lower_bound,
    attach_uniform_servers,
    derive_seed,
    gen_rrg,
    homog_throughput_bound,
    random_permutation,
)
from topobench.flow import demand_weighted_distance, formulate, solve

RUNS = 3
print(f"{'r':>3} {'t(a2a)':>12} {'bound(a2a)':>12} {'ratio':>7}   "
      f"{'t(perm5)':>9} {'bound':>7} {'d*':>6}")
for r in (5, 9, 13, 17, 21):
    a2a_ratio = []
    perm_t = []
    for run in range(RUNS):
        seed = derive_seed(101, r, run)
        topo = attach_uniform_servers(gen_rrg(40, r, seed), 5)

        tm = all_to_all(topo, aggregate="switch")
        sol = solve(formulate(topo, tm), min_volume=False)
        bound = homog_throughput_bound(
            40, r, tm.total_demand, demand_weighted_distance(topo, tm)
        )
        a2a_ratio.append((sol.throughput, bound))

        perm = random_permutation(topo, derive_seed(seed, 1))
        perm_t.append(solve(formulate(topo, perm), min_volume=False).throughput)

    t_mean = np.mean([t for t, _ in a2a_ratio])
    b_mean = np.mean([b for _, b in a2a_ratio])
    # Unit NICs cap the permutation bound at 1 per server.
    perm_bound = min(homog_throughput_bound(40, r, 200), 1.0)
    print(f"{r:>3} {t_mean:>12.6f} {b_mean:>12.6f} {t_mean / b_mean:>7.4f}   "
          f"{np.mean(perm_t):>9.4f} {perm_bound:>7.4f} "
          f"{aspl_lower_bound(40, r):>6.3f}")

print("\nAll-to-all throughput sits on the bound once the graph is dense"
      " (r >= 13); the permutation saturates the server NICs instead.")
