"""Trace fixed points of V_x (x = 0, 1, ..., 300) from psi down to rho_1.

Prints the spiral statistics that the conjecture checks look at and
writes an everted overlay of the first 40 points to rho1_spiral.ppm.
"""

import sys

from zvdl import Progression, RaySpec, nearest_fixpoint_to_zero, riemann_zero, trace_ray
from zvdl.harness import check_corollary, check_question1, check_theorem1
from zvdl.render import spiral_overlay, write_ppm
from zvdl.spirals import classify_nearly_logarithmic, classify_nearly_uniform, unwrap_theta

out = sys.argv[1] if len(sys.argv) > 1 else "rho1_spiral.ppm"

rho = riemann_zero(1)
seq = trace_ray(RaySpec(1), Progression(1.0, 301), nearest_fixpoint_to_zero(rho), target=rho)
print(f"{len(seq)} points, converged: {seq.converged}")
for x in (0, 1, 2, 5, 10, 20):
    p = seq.points[x]
    print(f"  x = {x:3d}  phi = {p.phi.real:+.10f} {p.phi.imag:+.10f}i")
# past x ~ 20 phi - rho is below double resolution; the log offset keeps going
print(f"  log|phi_300 - rho| = {seq.points[-1].log_offset.real:.3f}")

tr = unwrap_theta(seq)
print(f"\nangle step near the end: {tr.delta[-1]:.6f} rad")
for K in (25, 50, 100):
    ok, rep = classify_nearly_logarithmic(seq, None, K)
    print(f"nearly logarithmic, K = {K:3d}: {ok}  (slope {rep.slope:.3f}, r2 {rep.r_squared:.3f})")
ok, rep = classify_nearly_uniform(seq)
print(f"nearly uniform: {ok}  (slope {rep.slope:.3f}, r2 {rep.r_squared:.3f})")

t1 = check_theorem1(seq)
print(f"\ntheorem check: {t1.verdict}, |zeta(limit)| = {t1.g_at_limit:.1e}")
print(f"corollary: {check_corollary(seq)}, sigma gap: {check_question1(seq).gap_to_half:.1e}")

write_ppm(spiral_overlay(seq.phis[:40], rho), out)
print(f"wrote {out}")
