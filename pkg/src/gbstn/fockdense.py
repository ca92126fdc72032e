"""Brute-force dense Fock-space oracle.

Deliberately naive reference engine: state vectors as (d, ..., d) arrays with
axis k = mode k, density matrices as (D, D) matrices over the little-endian
flat basis index  n_0 + n_1 d + n_2 d^2 + ...  (mode 0 varies fastest), with
d = local_cutoff + 1 and D = d**num_modes.  Everything here exists to validate
the tensor-network and Gaussian engines on small instances.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np
import scipy.linalg

from .circuit import Circuit, gate_tensor, kraus_set
from .errors import ResourceLimitError, UnsupportedConfigurationError

__all__ = [
    "DenseState",
    "DenseDensity",
    "single_mode_squeezed_vector",
    "dense_squeezed_vacuum",
    "dense_fock_state",
    "dense_evolve_state",
    "dense_evolve_density",
    "dense_probability",
    "flat_index",
]

FOCK_SIZE_GUARD = 10**7


def _check_size(num_modes: int, local_cutoff: int) -> None:
    size = (local_cutoff + 1) ** num_modes
    if size > FOCK_SIZE_GUARD:
        raise ResourceLimitError(
            f"dense Fock space of {size} amplitudes exceeds the guard "
            f"({FOCK_SIZE_GUARD}); use the tensor-network engine instead"
        )


def flat_index(outcome, local_cutoff: int) -> int:
    """Little-endian flat basis index of a photon-count configuration."""
    d = local_cutoff + 1
    idx = 0
    for k, n in enumerate(outcome):
        if not (0 <= n <= local_cutoff):
            raise ValueError(f"occupation {n} on mode {k} outside [0, {local_cutoff}]")
        idx += int(n) * d**k
    return idx


@dataclass
class DenseState:
    """Pure state as an array of shape (d,)*M with axis k = mode k."""

    amplitudes: np.ndarray
    num_modes: int
    local_cutoff: int

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def vector(self) -> np.ndarray:
        """Flat state vector in the little-endian basis."""
        return self.amplitudes.reshape(-1, order="F")

    def to_density(self) -> "DenseDensity":
        v = self.vector()
        return DenseDensity(
            matrix=np.outer(v, v.conj()),
            num_modes=self.num_modes,
            local_cutoff=self.local_cutoff,
        )


@dataclass
class DenseDensity:
    """Density matrix over the little-endian flat basis."""

    matrix: np.ndarray
    num_modes: int
    local_cutoff: int

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def _tensor(self) -> np.ndarray:
        d = self.local_cutoff + 1
        return self.matrix.reshape((d,) * (2 * self.num_modes), order="F")

    @staticmethod
    def _from_tensor(tensor: np.ndarray, num_modes: int, local_cutoff: int) -> "DenseDensity":
        size = (local_cutoff + 1) ** num_modes
        return DenseDensity(
            matrix=tensor.reshape((size, size), order="F"),
            num_modes=num_modes,
            local_cutoff=local_cutoff,
        )


@lru_cache(maxsize=512)
def _squeezed_vector_cached(r: float, local_cutoff: int, pad: int) -> np.ndarray:
    dim = local_cutoff + 1 + pad
    a = np.diag(np.sqrt(np.arange(1.0, dim)), 1)
    generator = 0.5 * r * (a @ a - a.T @ a.T)
    column = scipy.linalg.expm(generator)[:, 0]
    vector = column[: local_cutoff + 1].astype(np.complex128)
    vector.flags.writeable = False
    return vector


def single_mode_squeezed_vector(r: float, local_cutoff: int, pad: int = 20) -> np.ndarray:
    """Truncated squeezed-vacuum amplitudes <n|S(r)|0>, n = 0..local_cutoff.

    S(r) = exp{ r (a^2 - a*^2) / 2 } is exponentiated at cutoff
    local_cutoff + pad so the retained amplitudes are free of edge effects;
    the result is then truncated and NOT renormalized: the missing tail mass
    is the honest cutoff error of every engine built on top of this vector.
    The returned array is cached and read-only.
    """
    return _squeezed_vector_cached(float(r), int(local_cutoff), int(pad))


def squeeze_values(r, num_modes: int | None = None) -> np.ndarray:
    """Normalize a scalar-or-sequence squeezing argument to a per-mode array."""
    values = np.atleast_1d(np.asarray(r, dtype=float))
    if values.ndim != 1:
        raise ValueError("squeezing must be a scalar or a 1-d sequence")
    if not np.all(np.isfinite(values)):
        raise ValueError("squeezing parameters must be finite")
    if num_modes is not None:
        if values.size == 1:
            values = np.full(num_modes, values[0])
        elif values.size != num_modes:
            raise ValueError(f"expected {num_modes} squeezing values, got {values.size}")
    return values


def dense_squeezed_vacuum(r, num_modes: int | None = None, local_cutoff: int = 10) -> DenseState:
    """Product of single-mode squeezed vacua as a dense state.

    Warns when the per-mode truncation tail exceeds 1e-12; callers that need
    tail-free states should raise the cutoff.
    """
    values = squeeze_values(r, num_modes)
    m = values.size
    if m < 1:
        raise ValueError("need at least one mode")
    _check_size(m, local_cutoff)
    vectors = [single_mode_squeezed_vector(rk, local_cutoff) for rk in values]
    worst_tail = max(1.0 - float(np.vdot(v, v).real) for v in vectors)
    if worst_tail > 1e-12:
        warnings.warn(
            f"squeezed-vacuum tail mass up to {worst_tail:.2e} beyond cutoff "
            f"{local_cutoff}; amplitudes with per-mode occupation <= {local_cutoff} "
            "are still exact",
            stacklevel=2,
        )
    amplitudes = reduce(np.multiply.outer, vectors)
    return DenseState(amplitudes=amplitudes, num_modes=m, local_cutoff=local_cutoff)


def dense_fock_state(outcome, local_cutoff: int) -> DenseState:
    outcome = tuple(int(n) for n in outcome)
    m = len(outcome)
    _check_size(m, local_cutoff)
    d = local_cutoff + 1
    amplitudes = np.zeros((d,) * m, dtype=np.complex128)
    amplitudes[outcome] = 1.0
    return DenseState(amplitudes=amplitudes, num_modes=m, local_cutoff=local_cutoff)


def _apply_gate_state(amps: np.ndarray, tensor: np.ndarray, site: int) -> np.ndarray:
    moved = np.tensordot(tensor, amps, axes=([2, 3], [site, site + 1]))
    return np.moveaxis(moved, [0, 1], [site, site + 1])


def dense_evolve_state(psi: DenseState, circuit: Circuit) -> DenseState:
    """Apply a lossless circuit gate by gate to a pure state."""
    if circuit.num_modes != psi.num_modes:
        raise ValueError("mode count mismatch between state and circuit")
    amps = psi.amplitudes
    for index, gate in enumerate(circuit.gates()):
        if gate.loss_gamma != 0.0:
            raise UnsupportedConfigurationError(
                f"gate {index} is lossy; use dense_evolve_density for lossy circuits"
            )
        tensor = gate_tensor(gate.params, psi.local_cutoff)
        amps = _apply_gate_state(amps, tensor, gate.modes[0])
    return DenseState(amplitudes=amps, num_modes=psi.num_modes, local_cutoff=psi.local_cutoff)


def dense_evolve_density(rho: DenseDensity, circuit: Circuit) -> DenseDensity:
    """Apply a (possibly lossy) circuit to a density matrix.

    Per gate: unitary conjugation, then the Kraus sum of the loss channel on
    the gate's designated output mode.
    """
    if circuit.num_modes != rho.num_modes:
        raise ValueError("mode count mismatch between density and circuit")
    m, cutoff = rho.num_modes, rho.local_cutoff
    tensor = rho._tensor()
    for gate in circuit.gates():
        site = gate.modes[0]
        g = gate_tensor(gate.params, cutoff)
        # rows: rho -> U rho, columns: -> (U rho) U^dag
        tensor = np.moveaxis(
            np.tensordot(g, tensor, axes=([2, 3], [site, site + 1])), [0, 1], [site, site + 1]
        )
        col = m + site
        tensor = np.moveaxis(
            np.tensordot(g.conj(), tensor, axes=([2, 3], [col, col + 1])), [0, 1], [col, col + 1]
        )
        if gate.loss_gamma > 0.0:
            s = gate.loss_site
            out = None
            for k in kraus_set(gate.loss_gamma, cutoff):
                term = np.moveaxis(np.tensordot(k, tensor, axes=([1], [s])), 0, s)
                term = np.moveaxis(np.tensordot(k.conj(), term, axes=([1], [m + s])), 0, m + s)
                out = term if out is None else out + term
            tensor = out
    return DenseDensity._from_tensor(tensor, m, cutoff)


def dense_probability(state, outcome) -> float:
    """Probability of a photon-count outcome from a DenseState or DenseDensity."""
    outcome = tuple(int(n) for n in outcome)
    if len(outcome) != state.num_modes:
        raise ValueError("outcome length does not match the mode count")
    if any(n < 0 or n > state.local_cutoff for n in outcome):
        raise ValueError(f"outcome {outcome} lies outside the cutoff {state.local_cutoff}")
    if isinstance(state, DenseState):
        return float(np.abs(state.amplitudes[outcome]) ** 2)
    if isinstance(state, DenseDensity):
        idx = flat_index(outcome, state.local_cutoff)
        return float(state.matrix[idx, idx].real)
    raise TypeError(f"expected DenseState or DenseDensity, got {type(state)!r}")
