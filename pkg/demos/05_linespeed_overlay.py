"""Mixing line-speeds: high-speed ports on the large switches only.

Twenty 40-port and twenty 15-port switches at the base speed, with each
large switch carrying a few extra high-speed ports wired randomly among
the large switches. The sweep varies cross-cluster connectivity for a few
overlay shapes. Extra high-speed capacity raises the plateau but cannot
help once the cross-cluster cut is the bottleneck: the overlay's value
evaporates at the starved end.
"""

import numpy as np

from topobench import (
    LineSpeedOverlayConfig,
    TwoClassConfig,
    derive_seed,
    gen_linespeed_overlay,
    random_permutation,
)
from topobench.flow import formulate, solve

BASE = TwoClassConfig(n_large=20, n_small=20, ports_large=40, ports_small=15,
                      total_servers=20 * 36 + 20 * 7)
COUNTS = [36] * 20 + [7] * 20
RUNS = 3

for high_ports, high_speed in ((0, 10.0), (3, 10.0), (6, 4.0)):
    cfg = LineSpeedOverlayConfig(BASE, high_ports, high_speed)
    label = (f"{high_ports} x {high_speed:g}-unit ports/large switch"
             if high_ports else "no overlay")
    print(f"\n{label}:")
    for x in (0.3, 0.6, 0.9, 1.2):
        ts = []
        for run in range(RUNS):
            seed = derive_seed(505, high_ports, int(high_speed), int(x * 100), run)
            topo = gen_linespeed_overlay(cfg, COUNTS, x, seed)
            tm = random_permutation(topo, derive_seed(seed, 1))
            ts.append(solve(formulate(topo, tm), min_volume=False).throughput)
        print(f"  x_cross={x:<4} t = {np.mean(ts):.4f} +/- {np.std(ts):.4f}")
