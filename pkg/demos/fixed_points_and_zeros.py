"""Where the traces start and where they end.

Finds the attracting real fixed point of zeta, the first few nontrivial
zeros, and for each zero the zeta fixed point closest to it.
"""

from zvdl import nearest_fixpoint_to_zero, newton_fixpoint, riemann_zero, zeta

phi = newton_fixpoint(0, -0.3)
print(f"real fixed point of zeta: {phi.real:.12f}  (|zeta(phi) - phi| = {abs(zeta(phi) - phi):.1e})")

print("\n  n   rho_n                     psi_n                              |psi - rho|")
for n in range(1, 6):
    rho = riemann_zero(n)
    psi = nearest_fixpoint_to_zero(rho)
    print(f"{n:3d}   0.5 + {rho.imag:.10f}i   {psi.real:+.8f} {psi.imag:+.8f}i   {abs(psi - rho):.4f}")
