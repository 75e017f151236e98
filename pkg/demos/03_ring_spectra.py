"""Finite rings: momentum quantization, CIR crossings, and the L -> inf limit.

Close the open direction into a ring of L sites.  The scattering phase
shift turns into a shift of the quantized momenta: each allowed root
k_b(U) lives in a branch ((2b-1)pi/L, (2b+1)pi/L) and interpolates
between the free values 2 pi b / L as U sweeps.  At special negative
couplings a root collides with a branch edge (cos(kL/2) = 0): these
crossings accumulate, for large rings, at the infinite-system CIR.

Run:  python3 demos/03_ring_spectra.py
"""

import numpy as np

import q1dscatter as q

spectrum = q.solve_transverse(q.Harmonic(omega=0.1), n_states=21)
L = 50

print(f"ring of L = {L} sites, harmonic trap (curvature 0.1)")
print("\nU = 0 momenta are exactly the free ones:")
for b in (1, 2, 3):
    sol = q.ring_momentum(spectrum, 0.0, L, branch=b)
    print(f"  branch {b}: k = {sol.k:.10f}  (2 pi b / L = "
          f"{2 * np.pi * b / L:.10f})")

print("\nmomentum of branch 1 vs coupling:")
for u in (-20.0, -5.0, -1.0, 0.0, 1.0, 5.0, 20.0):
    sol = q.ring_momentum(spectrum, u, L, branch=1)
    print(f"  U = {u:+6.1f}:  k = {sol.k:.8f}   E = {sol.energy:+.8f}   "
          f"residual {sol.residual:.1e}")

crossings = q.ring_cir_crossings(spectrum, L)
print(f"\nbranch-edge crossings (all attractive): {len(crossings)} found")
for c in crossings[:4]:
    print(f"  level {c.level}: k = {c.k:.6f}  at  U = {c.u:+.6f}")

cir = q.u_cir(spectrum)
print(f"\nlowest crossing vs infinite-system CIR:")
for ring_l in (20, 100, 1000):
    first = q.ring_cir_crossings(spectrum, ring_l)[0]
    print(f"  L = {ring_l:5d}:  U = {first.u:+.8f}   "
          f"(U_CIR = {cir.u_cir:+.8f}, diff {abs(first.u - cir.u_cir):.2e})")

print("\nfinite ring vs asymptotic quantization (k L + 2 delta_k = 2 pi b):")
for ring_l in (20, 100, 1000):
    sol = q.ring_momentum(spectrum, -2.0, ring_l, branch=1)
    ref = q.asymptotic_momentum(spectrum, -2.0, ring_l, branch=1)
    print(f"  L = {ring_l:5d}:  k_ring = {sol.k:.12f}  "
          f"k_asym = {ref.k:.12f}  diff {abs(sol.k - ref.k):.1e}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    us = np.linspace(-30.0, 30.0, 400)
    fig, ax = plt.subplots(figsize=(6, 4))
    for b in (1, 2, 3):
        ks = []
        for u in us:
            try:
                ks.append(q.ring_momentum(spectrum, float(u), L,
                                          branch=b).k)
            except q.NoRootInBranch:
                ks.append(np.nan)
        ax.plot(us, ks, lw=1, label=f"branch {b}")
    for c in crossings[:3]:
        ax.axvline(c.u, color="k", ls=":", lw=0.6)
    ax.set_xlabel("bare coupling U / J")
    ax.set_ylabel("ring momentum k")
    ax.set_title(f"momentum branches on an L = {L} ring")
    ax.legend()
    fig.tight_layout()
    fig.savefig("demo03_ring_spectra.png", dpi=150)
    print("\nwrote demo03_ring_spectra.png")
except ImportError:
    print("\n(matplotlib not installed; skipping the plot)")
