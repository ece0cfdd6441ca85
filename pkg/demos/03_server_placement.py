"""Where should servers go when switches differ in port count?

Twenty 30-port switches and forty 10-port switches share 400 servers. The
sweep scales the large-class share around the port-proportional point
(x = 1) and wires whatever ports remain into an unbiased random graph.
Port-proportional placement is the throughput peak; skewing servers either
way starves one side of network ports.

x = 0.4 is absent for a reason: the leftover port degrees at that point
fail the Erdos-Gallai condition, so no simple graph can realize them.
"""

import numpy as np

from topobench import (
    TwoClassConfig,
    derive_seed,
    gen_random_from_ports,
    random_permutation,
    server_distribution_two_class,
)
from topobench.flow import formulate, solve
from topobench.generators import is_graphical

CFG = TwoClassConfig(n_large=20, n_small=40, ports_large=30, ports_small=10,
                     total_servers=400)
CLUSTERS = {i: (0 if i < 20 else 1) for i in range(60)}
RUNS = 3

print(f"{'x':>5} {'per-large':>9} {'per-small':>9} {'throughput':>16}")
for x in (0.4, 0.5, 0.7, 1.0, 1.3, 1.6):
    counts = server_distribution_two_class(CFG, x)
    stubs = [p - s for p, s in zip(CFG.port_counts, counts)]
    if not is_graphical(stubs):
        print(f"{x:>5} {counts[0]:>9} {counts[-1]:>9} {'(not simple-graphable)':>16}")
        continue
    ts = []
    for run in range(RUNS):
        seed = derive_seed(303, int(x * 100), run)
        topo = gen_random_from_ports(CFG.port_counts, counts, seed,
                                     cluster_of=CLUSTERS)
        tm = random_permutation(topo, derive_seed(seed, 1))
        ts.append(solve(formulate(topo, tm), min_volume=False).throughput)
    print(f"{x:>5} {counts[0]:>9} {counts[-1]:>9} "
          f"{np.mean(ts):>10.4f} +/- {np.std(ts):.4f}")
