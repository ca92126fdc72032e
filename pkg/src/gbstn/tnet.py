"""Tensor-train engine: MPS/MPO evolution with SVD truncation.

Probabilities are computed three ways:

* ``schrodinger_probability``: evolve the squeezed input forward, project on
  the outcome.
* ``heisenberg_probability_lossless``: evolve the outcome state through the
  time-reversed circuit (reverse layer order, conjugate-transposed gates) and
  overlap with the unevolved input.  Valid because for unitary circuits the
  evolved projector stays a rank-one dyad.
* ``heisenberg_probability_lossy``: evolve the outcome projector as a genuine
  MPO through the adjoint channel O -> U^dag (sum_mu K_mu^dag O K_mu) U per
  gate, then close with the squeezed input on both sides.

Nothing is renormalized after truncation: probabilities carry the cutoff and
truncation error honestly.  Every evolution reports bond-dimension and
truncation statistics.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .circuit import Circuit, Gate, gate_tensor, kraus_set
from .errors import NumericalFailureError, ResourceLimitError, UnsupportedConfigurationError
from .fockdense import squeeze_values, single_mode_squeezed_vector

__all__ = [
    "TruncationPolicy",
    "EvolutionStats",
    "MPS",
    "MPO",
    "fock_mps",
    "squeezed_mps",
    "fock_projector_mpo",
    "apply_gate_mps",
    "apply_gate_mpo_adjoint",
    "mps_overlap",
    "mpo_expectation",
    "schrodinger_probability",
    "heisenberg_probability_lossless",
    "heisenberg_probability_lossy",
    "batch_probabilities",
]

DENSE_GUARD = 10**7


@dataclass(frozen=True)
class TruncationPolicy:
    """SVD compression policy: drop singular values with s/s_max < threshold,
    then cap the bond at ``max_bond`` (None = unlimited)."""

    max_bond: int | None = None
    svd_threshold: float = 1e-12

    def __post_init__(self):
        if not (0.0 <= self.svd_threshold < 1.0):
            raise ValueError(f"svd_threshold must lie in [0, 1), got {self.svd_threshold}")
        if self.max_bond is not None and self.max_bond < 1:
            raise ValueError(f"max_bond must be positive, got {self.max_bond}")


@dataclass
class EvolutionStats:
    """Instrumentation collected along one evolution.

    ``flop_estimate`` accumulates a chi^3 * chi_o^2 * n_c^2 cost model per
    two-site update, with operator bond chi_o = n_c + 1 for state updates and
    (n_c + 1)^2 for operator updates.  Reported, never asserted.
    """

    max_bond_seen: int = 1
    per_layer_bonds: list[int] = field(default_factory=list)
    truncation_weight: float = 0.0
    flop_estimate: float = 0.0
    raw_probability: float | None = None

    def observe_bond(self, chi: int) -> None:
        if chi > self.max_bond_seen:
            self.max_bond_seen = chi

    def to_dict(self) -> dict:
        return {
            "max_bond_seen": self.max_bond_seen,
            "per_layer_bonds": list(self.per_layer_bonds),
            "truncation_weight": self.truncation_weight,
            "flop_estimate": self.flop_estimate,
            "raw_probability": self.raw_probability,
        }


def _svd(matrix: np.ndarray):
    try:
        return np.linalg.svd(matrix, full_matrices=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails to converge; gesvd is slower but sturdier
        return scipy.linalg.svd(matrix, full_matrices=False, lapack_driver="gesvd")


def _split(matrix: np.ndarray, policy: TruncationPolicy, stats: EvolutionStats):
    """SVD-split with truncation; singular values absorbed as sqrt on each side."""
    u, s, vh = _svd(matrix)
    keep = len(s)
    if keep > 1 and s[0] > 0.0:
        keep = int(np.sum(s > policy.svd_threshold * s[0]))
        keep = max(keep, 1)
    if policy.max_bond is not None:
        keep = min(keep, policy.max_bond)
    stats.truncation_weight += float(np.sum(s[keep:] ** 2))
    root = np.sqrt(s[:keep])
    left = u[:, :keep] * root[None, :]
    right = root[:, None] * vh[:keep]
    stats.observe_bond(keep)
    return left, right, keep


class MPS:
    """Matrix product state: rank-3 site tensors (left bond, physical, right bond)."""

    def __init__(self, tensors: list[np.ndarray]):
        if not tensors:
            raise ValueError("an MPS needs at least one site")
        if tensors[0].shape[0] != 1 or tensors[-1].shape[2] != 1:
            raise ValueError("boundary bonds must have dimension 1")
        for k in range(len(tensors) - 1):
            if tensors[k].shape[2] != tensors[k + 1].shape[0]:
                raise ValueError(f"bond mismatch between sites {k} and {k + 1}")
        self.tensors = tensors

    @property
    def num_modes(self) -> int:
        return len(self.tensors)

    @property
    def local_dim(self) -> int:
        return self.tensors[0].shape[1]

    def max_bond(self) -> int:
        return max(t.shape[2] for t in self.tensors)

    def copy(self) -> "MPS":
        return MPS([t.copy() for t in self.tensors])

    def norm(self) -> float:
        return float(np.sqrt(max(mps_overlap(self, self).real, 0.0)))

    def to_dense(self) -> np.ndarray:
        """Full amplitude array (axis k = mode k); guarded against large spaces."""
        if self.local_dim**self.num_modes > DENSE_GUARD:
            raise ResourceLimitError("dense contraction would exceed the size guard")
        acc = self.tensors[0][0]  # (d, chi)
        for t in self.tensors[1:]:
            acc = np.tensordot(acc, t, axes=([-1], [0]))
        return acc[..., 0]


class MPO:
    """Matrix product operator: rank-4 site tensors (left, out, in, right)."""

    def __init__(self, tensors: list[np.ndarray]):
        if not tensors:
            raise ValueError("an MPO needs at least one site")
        if tensors[0].shape[0] != 1 or tensors[-1].shape[3] != 1:
            raise ValueError("boundary bonds must have dimension 1")
        for k in range(len(tensors) - 1):
            if tensors[k].shape[3] != tensors[k + 1].shape[0]:
                raise ValueError(f"bond mismatch between sites {k} and {k + 1}")
        self.tensors = tensors

    @property
    def num_modes(self) -> int:
        return len(self.tensors)

    @property
    def local_dim(self) -> int:
        return self.tensors[0].shape[1]

    def max_bond(self) -> int:
        return max(t.shape[3] for t in self.tensors)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix over the little-endian flat basis (mode 0 fastest)."""
        d, m = self.local_dim, self.num_modes
        size = d**m
        if size**2 > DENSE_GUARD:
            raise ResourceLimitError("dense contraction would exceed the size guard")
        acc = self.tensors[0][0]  # (out, in, chi)
        for t in self.tensors[1:]:
            acc = np.tensordot(acc, t, axes=([-1], [0]))
        acc = acc[..., 0]  # (out_0, in_0, out_1, in_1, ...)
        acc = np.transpose(acc, list(range(0, 2 * m, 2)) + list(range(1, 2 * m, 2)))
        return acc.reshape((size, size), order="F")


def fock_mps(outcome, local_cutoff: int) -> MPS:
    """Product MPS |n_1, ..., n_M> (all bonds 1)."""
    outcome = tuple(int(n) for n in outcome)
    if any(n < 0 or n > local_cutoff for n in outcome):
        raise ValueError(f"outcome {outcome} lies outside the cutoff {local_cutoff}")
    d = local_cutoff + 1
    tensors = []
    for n in outcome:
        t = np.zeros((1, d, 1), dtype=np.complex128)
        t[0, n, 0] = 1.0
        tensors.append(t)
    return MPS(tensors)


def squeezed_mps(r, num_modes: int, local_cutoff: int) -> MPS:
    """Product MPS of truncated squeezed vacua; norm < 1 is kept, not fixed."""
    values = squeeze_values(r, num_modes)
    tensors = [
        single_mode_squeezed_vector(rk, local_cutoff).reshape(1, local_cutoff + 1, 1)
        for rk in values
    ]
    return MPS(tensors)


def fock_projector_mpo(outcome, local_cutoff: int) -> MPO:
    """|n><n| as a bond-1 MPO."""
    outcome = tuple(int(n) for n in outcome)
    if any(n < 0 or n > local_cutoff for n in outcome):
        raise ValueError(f"outcome {outcome} lies outside the cutoff {local_cutoff}")
    d = local_cutoff + 1
    tensors = []
    for n in outcome:
        t = np.zeros((1, d, d, 1), dtype=np.complex128)
        t[0, n, n, 0] = 1.0
        tensors.append(t)
    return MPO(tensors)


def mps_overlap(bra: MPS, ket: MPS) -> complex:
    """<bra|ket> (bra tensors enter conjugated)."""
    if bra.num_modes != ket.num_modes:
        raise ValueError("mode count mismatch")
    env = np.ones((1, 1), dtype=np.complex128)
    for a, b in zip(bra.tensors, ket.tensors):
        # env (alpha, beta) . conj(a) (alpha, p, alpha') . b (beta, p, beta')
        tmp = np.tensordot(env, a.conj(), axes=([0], [0]))  # (beta, p, alpha')
        env = np.tensordot(tmp, b, axes=([0, 1], [0, 1]))   # (alpha', beta')
    return complex(env[0, 0])


def mpo_expectation(bra: MPS, operator: MPO, ket: MPS) -> complex:
    """<bra| O |ket>."""
    if not (bra.num_modes == operator.num_modes == ket.num_modes):
        raise ValueError("mode count mismatch")
    env = np.ones((1, 1, 1), dtype=np.complex128)
    for a, w, b in zip(bra.tensors, operator.tensors, ket.tensors):
        tmp = np.tensordot(env, a.conj(), axes=([0], [0]))      # (b, c, p, x)
        tmp = np.tensordot(tmp, w, axes=([0, 2], [0, 1]))       # (c, x, q, y)
        env = np.tensordot(tmp, b, axes=([0, 2], [0, 1]))       # (x, y, z)
    return complex(env[0, 0, 0])


def _gate_pair_tensor(gate: Gate, local_cutoff: int, reverse: bool) -> np.ndarray:
    g = gate_tensor(gate.params, local_cutoff)
    if reverse:
        g = g.conj().transpose(2, 3, 0, 1)
    return g


def apply_gate_mps(
    psi: MPS,
    gate: Gate,
    policy: TruncationPolicy | None = None,
    stats: EvolutionStats | None = None,
    reverse: bool = False,
) -> MPS:
    """Contract a two-site gate into the MPS and SVD-split it back.

    ``reverse=True`` applies the conjugate-transposed gate (the time-reversed
    circuit element).  Loss channels cannot act on a pure state; lossy gates
    are rejected here.
    """
    if gate.loss_gamma != 0.0:
        raise UnsupportedConfigurationError(
            "lossy gates cannot be applied to an MPS; use the MPO path"
        )
    policy = policy or TruncationPolicy()
    stats = stats if stats is not None else EvolutionStats()
    i = gate.modes[0]
    if i + 1 >= psi.num_modes:
        raise ValueError(f"gate on modes {gate.modes} does not fit in {psi.num_modes} modes")
    d = psi.local_dim
    g = _gate_pair_tensor(gate, d - 1, reverse)

    a, b = psi.tensors[i], psi.tensors[i + 1]
    chi_l, chi_r = a.shape[0], b.shape[2]
    theta = np.tensordot(a, b, axes=([2], [0]))        # (chi_l, p1, p2, chi_r)
    theta = np.tensordot(g, theta, axes=([2, 3], [1, 2]))  # (o1, o2, chi_l, chi_r)
    theta = theta.transpose(2, 0, 1, 3).reshape(chi_l * d, d * chi_r)

    left, right, keep = _split(theta, policy, stats)
    tensors = list(psi.tensors)
    tensors[i] = left.reshape(chi_l, d, keep)
    tensors[i + 1] = right.reshape(keep, d, chi_r)
    stats.flop_estimate += float(keep) ** 3 * float(d) ** 2 * float(d - 1) ** 2
    return MPS(tensors)


def _evolve_mps(
    psi: MPS,
    circuit: Circuit,
    policy: TruncationPolicy,
    stats: EvolutionStats,
    reverse: bool,
) -> MPS:
    layers = reversed(circuit.layers) if reverse else circuit.layers
    for layer in layers:
        for gate in layer:
            psi = apply_gate_mps(psi, gate, policy, stats, reverse=reverse)
        stats.per_layer_bonds.append(psi.max_bond())
    return psi


def apply_gate_mpo_adjoint(
    operator: MPO,
    gate: Gate,
    policy: TruncationPolicy | None = None,
    stats: EvolutionStats | None = None,
) -> MPO:
    """One step of the adjoint channel: O -> U^dag (sum_mu K_mu^dag O K_mu) U.

    The Kraus sum acts on the gate's lossy site first (it creates photons in
    this direction), then the two sites are conjugated by the gate unitary and
    recompressed.
    """
    policy = policy or TruncationPolicy()
    stats = stats if stats is not None else EvolutionStats()
    i = gate.modes[0]
    if i + 1 >= operator.num_modes:
        raise ValueError(f"gate on modes {gate.modes} does not fit in {operator.num_modes} modes")
    d = operator.local_dim
    tensors = list(operator.tensors)

    if gate.loss_gamma > 0.0:
        s = gate.loss_site
        w = tensors[s]
        out = None
        for k in kraus_set(gate.loss_gamma, d - 1):
            # K^dag O K on the physical legs: conj(K)[a, m] W[l, a, b, r] K[b, n]
            term = np.tensordot(k.conj(), w, axes=([0], [1]))      # (m, l, b, r)
            term = np.tensordot(term, k, axes=([2], [0]))          # (m, l, r, n)
            out = term if out is None else out + term
        tensors[s] = out.transpose(1, 0, 3, 2)

    g = gate_tensor(gate.params, d - 1)
    wa, wb = tensors[i], tensors[i + 1]
    chi_l, chi_r = wa.shape[0], wb.shape[3]
    theta = np.tensordot(wa, wb, axes=([3], [0]))  # (l, m1, n1, m2, n2, r)
    theta = theta.transpose(0, 5, 2, 4, 1, 3)      # (l, r, n1, n2, m1, m2)
    # rows: G^dag O  == contract the gate's out legs with O's out legs
    theta = np.tensordot(theta, g.conj(), axes=([4, 5], [0, 1]))  # (l, r, n1, n2, m1', m2')
    # columns: (.) G  == contract the gate's out legs with O's in legs
    theta = np.tensordot(theta, g, axes=([2, 3], [0, 1]))         # (l, r, m1', m2', n1', n2')
    theta = theta.transpose(0, 2, 4, 3, 5, 1).reshape(chi_l * d * d, d * d * chi_r)

    left, right, keep = _split(theta, policy, stats)
    tensors[i] = left.reshape(chi_l, d, d, keep)
    tensors[i + 1] = right.reshape(keep, d, d, chi_r)
    stats.flop_estimate += float(keep) ** 3 * float(d) ** 4 * float(d - 1) ** 2
    return MPO(tensors)


def _clamp_probability(raw: float) -> float:
    if raw < -1e-9:
        raise NumericalFailureError(f"probability {raw} below the roundoff window")
    return min(max(raw, 0.0), 1.0)


def _require_lossless(circuit: Circuit, path: str) -> None:
    for index, gate in enumerate(circuit.gates()):
        if gate.loss_gamma != 0.0:
            raise UnsupportedConfigurationError(
                f"{path} handles lossless circuits only; gate {index} "
                f"(modes {gate.modes}) has loss {gate.loss_gamma}"
            )


def schrodinger_probability(
    circuit: Circuit,
    outcome,
    r,
    local_cutoff: int,
    policy: TruncationPolicy | None = None,
) -> tuple[float, EvolutionStats]:
    """|<n| U |psi>|^2 by forward evolution of the squeezed input."""
    _require_lossless(circuit, "the Schrodinger state path")
    policy = policy or TruncationPolicy()
    stats = EvolutionStats()
    psi = squeezed_mps(r, circuit.num_modes, local_cutoff)
    psi = _evolve_mps(psi, circuit, policy, stats, reverse=False)
    amp = mps_overlap(fock_mps(outcome, local_cutoff), psi)
    p = _clamp_probability(abs(amp) ** 2)
    stats.raw_probability = abs(amp) ** 2
    return p, stats


def heisenberg_probability_lossless(
    circuit: Circuit,
    outcome,
    r,
    local_cutoff: int,
    policy: TruncationPolicy | None = None,
) -> tuple[float, EvolutionStats]:
    """|<psi| U^dag |n>|^2 by evolving the outcome state through the reversed circuit."""
    _require_lossless(circuit, "the lossless Heisenberg path (use heisenberg_probability_lossy)")
    outcome = tuple(int(n) for n in outcome)
    if sum(outcome) > circuit.num_modes * local_cutoff:
        raise ValueError("outcome carries more photons than the truncated space holds")
    policy = policy or TruncationPolicy()
    stats = EvolutionStats()
    phi = fock_mps(outcome, local_cutoff)
    phi = _evolve_mps(phi, circuit, policy, stats, reverse=True)
    amp = mps_overlap(squeezed_mps(r, circuit.num_modes, local_cutoff), phi)
    p = _clamp_probability(abs(amp) ** 2)
    stats.raw_probability = abs(amp) ** 2
    return p, stats


def _cutoff_recommendation(circuit: Circuit, r, n_tilde: int):
    """Best-effort choose_cutoff lookup; None when the closed form does not apply."""
    values = squeeze_values(r, circuit.num_modes)
    if circuit.num_modes % 2 != 0 or np.ptp(values) > 0.0:
        return None
    from .analysis import CutoffPolicy, choose_cutoff

    policy = CutoffPolicy(
        gamma=circuit.max_loss_gamma,
        num_sources=circuit.num_lossy_gates,
        num_modes=circuit.num_modes,
        r=float(values[0]),
        n_tilde=n_tilde,
    )
    return choose_cutoff(policy)[0]


def heisenberg_probability_lossy(
    circuit: Circuit,
    outcome,
    r,
    local_cutoff: int,
    policy: TruncationPolicy | None = None,
) -> tuple[float, EvolutionStats]:
    """Tr{|psi><psi| E*(P_n)}: the outcome projector evolved through the adjoint channel.

    Works for lossless circuits too (the channel degenerates to conjugation).
    Warns when ``local_cutoff`` is below the choose_cutoff recommendation.
    """
    outcome = tuple(int(n) for n in outcome)
    policy = policy or TruncationPolicy()
    recommended = _cutoff_recommendation(circuit, r, sum(outcome))
    if recommended is not None and local_cutoff < recommended:
        warnings.warn(
            f"local cutoff {local_cutoff} is below the recommended {recommended} "
            "for this loss level; probabilities may be biased",
            stacklevel=2,
        )
    stats = EvolutionStats()
    op = fock_projector_mpo(outcome, local_cutoff)
    for layer in reversed(circuit.layers):
        for gate in layer:
            op = apply_gate_mpo_adjoint(op, gate, policy, stats)
        stats.per_layer_bonds.append(op.max_bond())
    psi = squeezed_mps(r, circuit.num_modes, local_cutoff)
    value = mpo_expectation(psi, op, psi)
    if abs(value.imag) > 1e-8 * max(1.0, abs(value.real)):
        raise NumericalFailureError(f"non-real probability {value!r}")
    stats.raw_probability = value.real
    return _clamp_probability(value.real), stats


def _evaluate(circuit, outcome, r, local_cutoff, policy, picture):
    if picture == "schrodinger":
        return schrodinger_probability(circuit, outcome, r, local_cutoff, policy)
    if picture == "heisenberg":
        if circuit.is_lossless:
            return heisenberg_probability_lossless(circuit, outcome, r, local_cutoff, policy)
        return heisenberg_probability_lossy(circuit, outcome, r, local_cutoff, policy)
    raise ValueError(f"unknown picture {picture!r}")


def batch_probabilities(
    circuit: Circuit,
    outcomes,
    r,
    local_cutoff: int,
    policy: TruncationPolicy | None = None,
    picture: str = "heisenberg",
    workers: int | None = None,
) -> list[tuple[float, EvolutionStats]]:
    """Evaluate many outcomes; results are ordered by input index.

    Each evaluation is an independent pure computation, so the result is
    deterministic regardless of the worker count or schedule.
    """
    outcomes = list(outcomes)
    if workers is not None and workers > 1 and len(outcomes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_evaluate, circuit, n, r, local_cutoff, policy, picture)
                for n in outcomes
            ]
            return [f.result() for f in futures]
    return [_evaluate(circuit, n, r, local_cutoff, policy, picture) for n in outcomes]
