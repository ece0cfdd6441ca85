"""Permutation, all-to-all, and chunky traffic on a rewired VL2 fabric.

All-to-all spreads load so thin that it is the easiest pattern to route.
Chunky traffic is the opposite extreme: whole racks pair up, funneling 20
units between single ToR pairs, and throughput sags as more of the network
joins the pattern.
"""

import numpy as np

from topobench import RewiredVl2Config, all_to_all, chunky, derive_seed, gen_rewired_vl2, random_permutation
from topobench.flow import formulate, solve

# 15 ToRs is near this fabric's limit: permutations still run at full rate
# while rack-level pairing starts to sag.
DA, DI, TORS = 6, 8, 15
RUNS = 3

def mean_t(make_tm):
    ts = []
    for run in range(RUNS):
        seed = derive_seed(707, run)
        topo = gen_rewired_vl2(RewiredVl2Config(DA, DI, TORS), seed)
        tm = make_tm(topo, derive_seed(seed, 1))
        ts.append(solve(formulate(topo, tm), min_volume=False).throughput)
    return np.mean(ts), np.std(ts)

m, s = mean_t(random_permutation)
print(f"permutation:        t = {m:.4f} +/- {s:.4f}")
m, s = mean_t(lambda topo, seed: all_to_all(topo, aggregate="server"))
print(f"all-to-all (x1/(S-1) NIC share): t = {m:.6f} +/- {s:.6f}")
for x in (40, 60, 80, 100):
    m, s = mean_t(lambda topo, seed, x=x: chunky(topo, x, seed))
    print(f"{x:>3}% chunky:        t = {m:.4f} +/- {s:.4f}")
