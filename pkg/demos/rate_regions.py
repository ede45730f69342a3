"""Inner-bound corners of the erasure MAC and the collapsed region of XOR."""

from byzmac.mac_core import builtin_channel
from byzmac.region import (
    attack_polytope_vertices,
    avmac_rate_region,
    erasure_inner_bound_exact,
    induced_avmac,
    inner_region_sample,
)

for delta in (0.2, 0.1, 0.05, 0.02, 0.01):
    c1, c2 = erasure_inner_bound_exact(delta)
    print(f"delta={delta:<5} corner1=({c1.r1:.4f}, {c1.r2:.4f}) corner2=({c2.r1:.4f}, {c2.r2:.4f})")

erasure = builtin_channel("erasure")
sample = inner_region_sample(erasure, [0.45, 0.55], [0.55, 0.45])
for p in sample.points:
    print(f"solver corner ({p.r1:.6f}, {p.r2:.6f}) [{p.flag}]")

xor = builtin_channel("xor")
verts = attack_polytope_vertices(xor)
print(f"XOR attack polytope: {len(verts)} vertices")
region = avmac_rate_region(induced_avmac(xor, verts), input_grid=4, state_grid=4)
print("largest rate bound on the grid:", max(r["sum_max"] for r in region.rows))
