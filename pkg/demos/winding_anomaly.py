"""rho_70 barely seems to wind: the angle step per unit x is tiny.

With dx = 1 the step is 2 pi minus (Im rho_70 mod 2 pi), i.e. the step
mod a full turn is about 0.0016 pi, so a full turn takes ~1187 points.
"""

import math

from zvdl import Progression, RaySpec, nearest_fixpoint_to_zero, riemann_zero, trace_ray
from zvdl.harness import anomaly_metrics

for n in (1, 2, 70):
    rho = riemann_zero(n)
    seq = trace_ray(RaySpec(1), Progression(1.0, 1501), nearest_fixpoint_to_zero(rho), target=rho)
    lim, pts = anomaly_metrics(seq)
    step = (rho.imag % (2 * math.pi))
    print(f"rho_{n:<3d} Im = {rho.imag:10.6f}  Im mod 2pi = {step:.6f}  "
          f"delta limit = {lim / math.pi:.7f} pi  points per turn = {pts}")
