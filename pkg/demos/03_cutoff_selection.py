"""Choosing the local dimension cutoff for lossy Heisenberg evolution.

In the adjoint channel, every lossy gate acts as a photon source, so the
operator needs headroom above the outcome's photon total.  The spillover
bound Delta_gamma(n) combines the binomial gain model with the squeezed
input's pair distribution; the cutoff is the smallest n that pushes it below
a threshold epsilon.
"""

from gbstn import CutoffPolicy, choose_cutoff, delta_gamma, pi_gamma

MODES, R = 4, 0.5
GAMMA, SOURCES = 0.05, 6      # six lossy gates in a 4x4 brickwork layout
TARGET = 4                    # photons in the outcome of interest

policy = CutoffPolicy(gamma=GAMMA, num_sources=SOURCES, num_modes=MODES, r=R, n_tilde=TARGET)

print("binomial gain model pi_gamma(x):")
for x in range(SOURCES + 1):
    print(f"  x = {x}: {pi_gamma(SOURCES, GAMMA, x):.3e}")

print("\nspillover bound as the cutoff candidate grows:")
for n in range(TARGET, TARGET + 12):
    print(f"  Delta_gamma({n:2d}) = {delta_gamma(policy, n):.3e}")

print("\nrecommended cutoffs:")
for epsilon in (1e-3, 1e-6, 1e-9):
    n_c, achieved = choose_cutoff(
        CutoffPolicy(
            gamma=GAMMA, num_sources=SOURCES, num_modes=MODES, r=R,
            n_tilde=TARGET, epsilon=epsilon,
        )
    )
    print(f"  epsilon = {epsilon:.0e}  ->  n_c = {n_c}  (achieved {achieved:.3e})")

print("\nlossless circuits need no headroom at all:")
n_c, _ = choose_cutoff(
    CutoffPolicy(gamma=0.0, num_sources=SOURCES, num_modes=MODES, r=R, n_tilde=TARGET)
)
print(f"  gamma = 0  ->  n_c = {n_c} (the outcome's own photon total)")
