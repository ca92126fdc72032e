import json

import numpy as np
import pytest

from gbstn.circuit import (
    Circuit,
    Gate,
    GateParams,
    build_brickwork,
    circuit_to_mode_unitary,
    gate_tensor,
    gate_unitary_fock,
    kraus_set,
    load_circuit,
    save_circuit,
    single_photon_block,
    with_uniform_loss,
)
from gbstn.errors import UnsupportedConfigurationError


class TestTypes:
    def test_gate_modes_must_be_adjacent(self):
        with pytest.raises(ValueError):
            Gate(modes=(0, 2), params=GateParams(0.1, 0.2, 0.3))

    def test_gate_loss_range(self):
        with pytest.raises(ValueError):
            Gate(modes=(0, 1), params=GateParams(0.1, 0.2, 0.3), loss_gamma=1.0)
        with pytest.raises(ValueError):
            Gate(modes=(0, 1), params=GateParams(0.1, 0.2, 0.3), loss_gamma=-0.1)

    def test_angles_must_be_finite(self):
        with pytest.raises(ValueError):
            GateParams(np.inf, 0.0, 0.0)

    def test_layer_overlap_rejected(self):
        g1 = Gate(modes=(0, 1), params=GateParams(0.1, 0.0, 0.0))
        g2 = Gate(modes=(1, 2), params=GateParams(0.1, 0.0, 0.0))
        with pytest.raises(ValueError):
            Circuit(num_modes=3, layers=((g1, g2),))

    def test_min_modes(self):
        with pytest.raises(ValueError):
            Circuit(num_modes=1, layers=())


class TestBrickwork:
    def test_smallest_layout(self):
        c = build_brickwork(2, 1, angles=[(np.pi / 4, 0.0, 0.0)])
        assert c.num_gates == 1
        (gate,) = c.layers[0]
        assert gate.modes == (0, 1)
        assert gate.params.theta == np.pi / 4

    def test_even_mode_gate_counts(self):
        c = build_brickwork(4, 4, seed=7)
        assert [len(layer) for layer in c.layers] == [2, 1, 2, 1]

    def test_odd_mode_gate_counts(self):
        # (M-1)/2 gates in every layer for odd M
        c = build_brickwork(5, 5, seed=7)
        assert [len(layer) for layer in c.layers] == [2, 2, 2, 2, 2]

    def test_offsets(self):
        c = build_brickwork(6, 2, seed=0)
        assert [g.modes for g in c.layers[0]] == [(0, 1), (2, 3), (4, 5)]
        assert [g.modes for g in c.layers[1]] == [(1, 2), (3, 4)]

    def test_seed_determinism(self):
        a = build_brickwork(5, 5, seed=123)
        b = build_brickwork(5, 5, seed=123)
        assert a == b
        assert a != build_brickwork(5, 5, seed=124)

    def test_angle_ranges(self):
        c = build_brickwork(6, 10, seed=3)
        for g in c.gates():
            assert 0.0 <= g.params.theta < np.pi / 2
            assert 0.0 <= g.params.varphi < 2 * np.pi
            assert 0.0 <= g.params.phi < 2 * np.pi
            assert g.loss_gamma == 0.0

    def test_explicit_angle_count_checked(self):
        with pytest.raises(ValueError):
            build_brickwork(4, 4, angles=[(0.1, 0.2, 0.3)] * 5)

    def test_too_few_modes(self):
        with pytest.raises(ValueError):
            build_brickwork(1, 1, seed=0)


class TestUniformLoss:
    def test_zero_is_identity(self):
        c = build_brickwork(4, 4, seed=7)
        assert with_uniform_loss(c, 0.0) == c

    def test_every_gate_carries_gamma(self):
        c = with_uniform_loss(build_brickwork(4, 4, seed=7), 0.05)
        assert all(g.loss_gamma == 0.05 and g.lossy_mode == 1 for g in c.gates())

    def test_lossy_gate_count(self):
        # (2,1,2,1) layout -> 6 gates
        c = with_uniform_loss(build_brickwork(4, 4, seed=7), 0.1)
        assert c.num_lossy_gates == 6

    def test_gamma_range(self):
        c = build_brickwork(2, 1, seed=0)
        with pytest.raises(ValueError):
            with_uniform_loss(c, 1.0)


class TestGateUnitary:
    def test_identity_at_zero_angles(self):
        g = gate_unitary_fock(GateParams(0.0, 0.0, 0.0), 3)
        assert np.allclose(g, np.eye(16), atol=1e-14)

    def test_full_swap_of_single_photon(self):
        t = gate_tensor(GateParams(np.pi / 2, 0.0, 0.0), 2)
        assert abs(abs(t[0, 1, 1, 0]) - 1.0) < 1e-12   # |<0,1|G|1,0>| = 1
        assert abs(t[1, 0, 1, 0]) < 1e-12

    def test_hong_ou_mandel_null(self):
        t = gate_tensor(GateParams(np.pi / 4, 0.0, 0.0), 3)
        assert abs(t[1, 1, 1, 1]) < 1e-12

    @pytest.mark.parametrize("params", [
        GateParams(0.3, 1.1, 0.7),
        GateParams(1.2, 5.9, 2.4),
        GateParams(np.pi / 4, 0.0, np.pi),
    ])
    def test_block_unitarity(self, params):
        cutoff = 4
        t = gate_tensor(params, cutoff)
        for total in range(cutoff + 1):
            basis = [(m, total - m) for m in range(total + 1)]
            block = np.array(
                [[t[a[0], a[1], b[0], b[1]] for b in basis] for a in basis]
            )
            assert np.linalg.norm(block.conj().T @ block - np.eye(len(basis))) < 1e-12

    def test_photon_number_conservation(self):
        t = gate_tensor(GateParams(0.7, 0.3, 1.9), 3)
        for m1 in range(4):
            for m2 in range(4):
                for n1 in range(4):
                    for n2 in range(4):
                        if m1 + m2 != n1 + n2:
                            assert t[m1, m2, n1, n2] == 0.0

    def test_matches_single_photon_closed_form(self):
        params = GateParams(0.9, 2.2, 4.1)
        t = gate_tensor(params, 2)
        block = np.array([[t[1, 0, 1, 0], t[1, 0, 0, 1]], [t[0, 1, 1, 0], t[0, 1, 0, 1]]])
        assert np.allclose(block, single_photon_block(params), atol=1e-13)

    def test_cutoff_validated(self):
        with pytest.raises(ValueError):
            gate_unitary_fock(GateParams(0.1, 0.1, 0.1), 0)


class TestModeUnitary:
    def test_identity_gate(self):
        c = build_brickwork(3, 1, angles=[(0.0, 0.0, 0.0)])
        assert np.allclose(circuit_to_mode_unitary(c), np.eye(3), atol=1e-14)

    def test_full_swap_moduli(self):
        c = build_brickwork(2, 1, angles=[(np.pi / 2, 0.0, 0.0)])
        u = circuit_to_mode_unitary(c)
        assert abs(abs(u[0, 1]) - 1) < 1e-12 and abs(abs(u[1, 0]) - 1) < 1e-12
        assert abs(u[0, 0]) < 1e-12 and abs(u[1, 1]) < 1e-12

    def test_column_norms(self):
        u = circuit_to_mode_unitary(build_brickwork(7, 7, seed=9))
        assert np.allclose(np.linalg.norm(u, axis=0), 1.0, atol=1e-12)

    def test_unitarity(self):
        u = circuit_to_mode_unitary(build_brickwork(6, 6, seed=42))
        assert np.linalg.norm(u.conj().T @ u - np.eye(6)) < 1e-12

    def test_composition_law(self):
        a = build_brickwork(4, 2, seed=1)
        b = build_brickwork(4, 3, seed=2)
        combined = Circuit(num_modes=4, layers=a.layers + b.layers)
        ua, ub = circuit_to_mode_unitary(a), circuit_to_mode_unitary(b)
        assert np.linalg.norm(circuit_to_mode_unitary(combined) - ub @ ua) < 1e-12

    def test_reversed_circuit_gives_adjoint(self):
        # reverse the layer order and conjugate-transpose every gate block
        c = build_brickwork(5, 4, seed=8)
        u = circuit_to_mode_unitary(c)
        ur = np.eye(5, dtype=np.complex128)
        for layer in reversed(c.layers):
            layer_u = np.eye(5, dtype=np.complex128)
            for g in layer:
                i = g.modes[0]
                layer_u[i : i + 2, i : i + 2] = single_photon_block(g.params).conj().T
            ur = layer_u @ ur
        assert np.linalg.norm(ur - u.conj().T) < 1e-12

    def test_lossy_circuit_rejected(self):
        c = with_uniform_loss(build_brickwork(4, 4, seed=7), 0.1)
        with pytest.raises(UnsupportedConfigurationError):
            circuit_to_mode_unitary(c)


class TestKraus:
    def test_zero_loss(self):
        ks = kraus_set(0.0, 3)
        assert np.allclose(ks[0], np.eye(4), atol=1e-14)
        for k in ks[1:]:
            assert np.allclose(k, 0.0, atol=1e-14)

    def test_single_photon_element(self):
        ks = kraus_set(0.5, 3)
        assert abs(abs(ks[1][0, 1]) - np.sqrt(0.5)) < 1e-12

    @pytest.mark.parametrize("gamma", [0.0, 0.05, 0.3, 0.9])
    def test_completeness(self, gamma):
        cutoff = 4
        ks = kraus_set(gamma, cutoff)
        acc = sum(k.conj().T @ k for k in ks)
        assert np.linalg.norm(acc - np.eye(cutoff + 1)) < 1e-12

    def test_lowering_structure(self):
        ks = kraus_set(0.2, 4)
        for mu, k in enumerate(ks):
            for m in range(5):
                for n in range(5):
                    if m != n - mu:
                        assert k[m, n] == 0.0

    def test_gamma_range(self):
        with pytest.raises(ValueError):
            kraus_set(1.0, 3)


class TestSerialization:
    def test_round_trip_exact(self, tmp_path):
        c = with_uniform_loss(build_brickwork(5, 5, seed=31), 0.07)
        path = tmp_path / "c.json"
        save_circuit(c, path, seed=31)
        assert load_circuit(path) == c

    def test_header_records_seed(self, tmp_path):
        path = tmp_path / "c.json"
        save_circuit(build_brickwork(2, 1, seed=5), path, seed=5)
        data = json.loads(path.read_text())
        assert data["seed"] == 5
        assert "num_modes" in data and "layers" in data

    def test_angles_survive_byte_exactly(self, tmp_path):
        c = build_brickwork(4, 4, seed=1)
        path = tmp_path / "c.json"
        save_circuit(c, path)
        loaded = load_circuit(path)
        for a, b in zip(c.gates(), loaded.gates()):
            assert a.params.theta == b.params.theta
            assert a.params.varphi == b.params.varphi
            assert a.params.phi == b.params.phi
