"""Outcome probabilities of a circuit with non-uniform photon losses.

Each gate may feed one of its output modes into a loss channel.  The
probability of an outcome is computed by evolving its projector backward
through the adjoint channel as a matrix product operator, and checked against
brute-force density-matrix evolution.  Losses populate odd photon totals and
pull weight toward the vacuum.
"""

from gbstn import (
    Circuit,
    Gate,
    build_brickwork,
    dense_evolve_density,
    dense_probability,
    dense_squeezed_vacuum,
    heisenberg_probability_lossy,
    outcomes_with_total,
    with_uniform_loss,
)

MODES, DEPTH, SEED = 3, 3, 5
R, CUTOFF = 0.4, 4

# start from a uniform-loss circuit, then make the losses non-uniform by hand
base = with_uniform_loss(build_brickwork(MODES, DEPTH, seed=SEED), 0.05)
layers = []
for layer_index, layer in enumerate(base.layers):
    row = []
    for gate in layer:
        gamma = 0.02 + 0.04 * layer_index          # loss grows with the depth
        row.append(Gate(gate.modes, gate.params, loss_gamma=gamma, lossy_mode=1))
    layers.append(tuple(row))
circuit = Circuit(num_modes=MODES, layers=tuple(layers))
print("per-gate losses:", [round(g.loss_gamma, 3) for g in circuit.gates()])

rho = dense_evolve_density(dense_squeezed_vacuum(R, MODES, CUTOFF).to_density(), circuit)

print(f"\n{'outcome':>10} {'tensor network':>16} {'dense':>16}")
shells = {}
for total in range(4):
    shell = 0.0
    for outcome in outcomes_with_total(MODES, total):
        p_tn, stats = heisenberg_probability_lossy(circuit, outcome, R, CUTOFF)
        p_dense = dense_probability(rho, outcome)
        assert abs(p_tn - p_dense) < 1e-10
        shell += p_tn
        if total <= 2:
            print(f"{str(outcome):>10} {p_tn:16.12f} {p_dense:16.12f}")
    shells[total] = shell

print("\nphoton-total shells (losses feed odd totals, absent without loss):")
for total, weight in shells.items():
    print(f"  P(total = {total}) = {weight:.10f}")
