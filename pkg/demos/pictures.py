"""Quadrant plots and a basin of attraction, written as PPM files.

fig1.ppm      (s-1)^2 (s-i) (s+1)^5 / (s+i)^3 on [-2, 2]^2: rich junctions at
              the zeros 1 and -1, a pale junction at the pole -i
v1.ppm        V_1(s) - s on [-3, 3]^2: its zeros are fixed points of V_1
basin.ppm     points whose zeta-orbit settles on -0.295905... (black)
"""

import os
import sys

from zvdl.cli import function_from_spec
from zvdl.render import A_PHI, BasinParams, PlotRegion, basin_plot, quadrant_plot, write_ppm

out = sys.argv[1] if len(sys.argv) > 1 else "."
os.makedirs(out, exist_ok=True)

img = quadrant_plot(function_from_spec("fig1"), PlotRegion(0j, 4.0, 4.0, 400, 400))
write_ppm(img, os.path.join(out, "fig1.ppm"))
print("fig1:", sorted(c.name for c in img.neighborhood(-1j)))

img = quadrant_plot(function_from_spec("fixres:1"), PlotRegion(0j, 6.0, 6.0, 400, 400))
write_ppm(img, os.path.join(out, "v1.ppm"))

b = basin_plot(BasinParams(A_PHI), PlotRegion(-1 + 0j, 6.0, 4.0, 300, 200))
write_ppm(b, os.path.join(out, "basin.ppm"))
print(f"basin: {int(b.marked.sum())} of {b.marked.size} pixels in the basin, "
      f"{int(b.unresolved.sum())} hit the pole")
