"""Refine the progression and watch the fitted spiral parameters settle.

Uses the rho_1 trace with dx = 0.001 over x in [50, 100] (50001 points;
the trace itself takes a few seconds).  Prints slope/intercept per filter
index and the everted polygon lengths over filter indices 2^n.
"""

from zvdl import Progression, RaySpec, nearest_fixpoint_to_zero, riemann_zero, trace_ray
from zvdl.spirals import coarsen, coarsening_sweep, eversion_embed, polygon_length

rho = riemann_zero(1)
seq = trace_ray(RaySpec(1), Progression(0.001, 100001), nearest_fixpoint_to_zero(rho), target=rho)
tail = seq.subsequence(50.0)

sweep = coarsening_sweep(tail, None, (512, 256, 128, 64, 32, 16))
print("filter   slope              intercept")
for k, m in sweep.models:
    print(f"{k:6d}   {m.m:+.12f}   {m.b:+.9f}")
print(f"share of decreasing successive differences: {sweep.decreasing_fraction():.0%}")

# coarse filters leave a handful of points and alias the angle step
print("\nfilter   points   polygon length")
prev = None
for n in range(13, -1, -1):
    k = 2 ** n
    sub = coarsen(tail, k)
    length = polygon_length(eversion_embed(sub))
    diff = "" if prev is None else f"   change {abs(length - prev):.3f}"
    print(f"{k:6d}   {len(sub):6d}   {length:12.3f}{diff}")
    prev = length
