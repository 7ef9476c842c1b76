import json

import numpy as np
import pytest

from wbures.distances import bures_length, commutator_derivative, fisher_speed, hamiltonian_variance, seminorm
from wbures.errors import DimensionMismatch, InvalidGate, ParseError
from wbures.linalg import propagator
from wbures.resource import (
    Circuit,
    GateSpec,
    audit_bound,
    intermediate_tau,
    random_circuit,
    resource_cost,
    simulate_circuit,
    trajectory,
)
from wbures.states import basis, ghz, mixed, product

from conftest import random_density, random_hermitian, random_unitary

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
PLUS = np.full((2, 2), 0.5, dtype=complex)


def spectrum(m):
    return np.linalg.eigvalsh(m)


class TestCost:
    def test_single_gate(self):
        c = Circuit(1, (GateSpec((0,), Z, np.pi / 4),))
        assert resource_cost(c)[0] == pytest.approx(np.pi / 4, abs=1e-15)

    def test_empty(self):
        assert resource_cost(Circuit(2))[0] == 0.0

    def test_two_gates(self):
        c = Circuit(2, (GateSpec((0,), Z, 1.0), GateSpec((0, 1), np.diag([2.0, 0, 0, -2.0]), 0.5)))
        total, per_gate = resource_cost(c)
        assert total == pytest.approx(3.0, abs=1e-15)
        assert [g.cost for g in per_gate] == pytest.approx([1.0, 2.0])
        assert [g.size for g in per_gate] == [1, 2]

    def test_energy_shift_is_free(self):
        c1 = Circuit(1, (GateSpec((0,), Z, 1.0),))
        c2 = Circuit(1, (GateSpec((0,), Z + 5 * np.eye(2), 1.0),))
        assert resource_cost(c1)[0] == resource_cost(c2)[0]


class TestGateValidation:
    @pytest.mark.parametrize(
        "targets,h,t",
        [
            ((), Z, 1.0),
            ((0, 0), np.eye(4), 1.0),
            ((0,), np.eye(4), 1.0),
            ((0,), np.array([[0, 1], [0, 0]]), 1.0),
            ((0,), Z, 0.0),
            ((0,), Z, float("nan")),
        ],
    )
    def test_invalid(self, targets, h, t):
        with pytest.raises(InvalidGate):
            GateSpec(targets, h, t)

    def test_out_of_range(self):
        with pytest.raises(InvalidGate):
            Circuit(1, (GateSpec((1,), Z, 1.0),))


class TestSimulate:
    def test_empty_circuit(self, rng):
        rho = random_density(2, rng)
        assert np.array_equal(simulate_circuit(Circuit(2), rho).mat, rho)

    def test_x_like_gate(self):
        out = simulate_circuit(Circuit(1, (GateSpec((0,), X, np.pi / 2),)), product(basis("0")))
        assert np.max(np.abs(out.mat - np.diag([0.0, 1.0]))) < 1e-15

    @pytest.mark.parametrize("a,b", [(0.6, 0.8), (1 / np.sqrt(2), 1 / np.sqrt(2))])
    def test_ghz_preparation(self, a, b):
        minus = np.array([1, -1]) / np.sqrt(2)
        entangler = np.kron(np.diag([0.0, 1.0]), np.outer(minus, minus))
        c = Circuit(2, (GateSpec((0,), Y, np.arctan2(b, a)), GateSpec((0, 1), entangler, np.pi)))
        out = simulate_circuit(c, product(basis("00")))
        assert np.max(np.abs(out.mat - product(ghz(2, a, b)).mat)) < 1e-9

    def test_target_order_matters(self):
        # the first listed target is the most significant factor of the gate Hamiltonian
        h = np.kron(X, np.eye(2))
        out = simulate_circuit(Circuit(2, (GateSpec((1, 0), h, np.pi / 2),)), product(basis("00")))
        assert out.mat[1, 1] == pytest.approx(1.0)

    def test_spectrum_preserved(self, rng):
        rho = random_density(3, rng)
        c = random_circuit(3, 6, rng)
        assert np.max(np.abs(spectrum(simulate_circuit(c, rho).mat) - spectrum(rho))) < 1e-10

    def test_trajectory_length(self, rng):
        c = random_circuit(2, 4, rng)
        assert len(trajectory(c, random_density(2, rng))) == 5

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            simulate_circuit(Circuit(2), random_density(3, rng))


class TestIntermediateTau:
    def test_unitary_equivalent_nondegenerate(self, rng):
        rho = random_density(2, rng)
        u = random_unitary(4, rng)
        tau = intermediate_tau(rho, u @ rho @ u.conj().T)
        assert np.max(np.abs(tau.mat - rho)) < 1e-10

    def test_pure_to_mixed(self):
        tau = intermediate_tau(np.diag([1.0, 0.0]), np.eye(2) / 2)
        assert np.max(np.abs(tau.mat - np.eye(2) / 2)) < 1e-15

    def test_spectrum_and_basis(self, rng):
        for _ in range(10):
            rho, sigma = random_density(2, rng), random_density(2, rng, 2)
            tau = intermediate_tau(rho, sigma).mat
            assert np.max(np.abs(spectrum(tau) - spectrum(sigma))) < 1e-10
            # commutes with rho: shares its eigenbasis
            assert np.max(np.abs(tau @ rho - rho @ tau)) < 1e-10

    def test_descending_pairing(self):
        tau = intermediate_tau(np.diag([0.2, 0.8]), np.diag([0.9, 0.1]))
        assert np.allclose(np.diag(tau.mat), [0.1, 0.9], atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            intermediate_tau(np.eye(2) / 2, np.eye(4) / 4)


class TestAudit:
    def test_empty_circuit(self, rng):
        r = audit_bound(Circuit(2), random_density(2, rng))
        assert r.r_u == 0.0
        assert r.d_b == 0.0
        assert r.holds
        assert r.margin == 0.0

    @pytest.mark.parametrize("x,t", [(1.0, np.pi / 2), (0.5, 1.0), (2.0, 0.3)])
    def test_saturation(self, x, t):
        r = audit_bound(Circuit(1, (GateSpec((0,), np.diag([x, -x]), t),)), PLUS)
        assert r.r_u == pytest.approx(x * t, abs=1e-15)
        assert r.d_b == pytest.approx(x * t, abs=1e-9)
        assert abs(r.margin) < 1e-6
        assert r.holds

    def test_random_circuits_hold(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 4))
            c = random_circuit(n, int(rng.integers(1, 5)), rng)
            r = audit_bound(c, random_density(n, rng, int(rng.integers(1, 2**n + 1))))
            assert r.holds
            assert r.margin >= -1e-9

    def test_per_gate_chain(self, rng):
        for _ in range(10):
            c = random_circuit(3, 4, rng)
            r = audit_bound(c, random_density(3, rng, 1))
            for cost, step in zip(r.per_gate, r.per_gate_bures):
                assert cost.cost >= cost.size * step - 1e-9

    def test_cost_is_sum(self, rng):
        r = audit_bound(random_circuit(3, 5, rng), product(basis("000")))
        assert r.r_u == pytest.approx(sum(g.cost for g in r.per_gate), abs=1e-12)

    def test_tau_of_unitary_audit(self, rng):
        rho = random_density(2, rng)
        r = audit_bound(random_circuit(2, 3, rng), rho)
        assert not r.tau_degenerate
        assert r.d_b_tau == pytest.approx(r.d_b, abs=1e-9)

    def test_degenerate_input_flagged(self, rng):
        assert audit_bound(random_circuit(2, 2, rng), product(mixed(2))).tau_degenerate

    def test_report_json(self, rng):
        r = audit_bound(random_circuit(2, 2, rng), product(basis("01")))
        d = json.loads(json.dumps(r.to_dict()))
        assert {"r_u", "d_b", "margin", "holds", "per_gate", "tau"} <= set(d)
        assert len(d["per_gate"]) == 2


class TestDynamics:
    def test_seminorm_bounds_variance_along_circuit(self, rng):
        for _ in range(10):
            c = random_circuit(3, 4, rng)
            states = trajectory(c, random_density(3, rng, 2))
            for g, pre in zip(c.gates, states):
                assert seminorm(g.hamiltonian) ** 2 >= hamiltonian_variance(_embed(g, 3), pre) - 1e-12

    def test_speed_constant_along_gate(self, rng):
        rho = random_density(2, rng)
        g = GateSpec((1, 0), random_hermitian(4, rng), 1.0)
        h = _embed(g, 2)
        speeds = []
        for t in np.linspace(0.0, 1.0, 5):
            u = propagator(h, t)
            state = u @ rho @ u.conj().T
            speeds.append(fisher_speed(state, commutator_derivative(h, state)))
        assert max(speeds) == pytest.approx(min(speeds), rel=1e-4)


def _embed(gate, n):
    """Full-register Hamiltonian for ``gate`` built from explicit Kronecker products."""
    k = gate.size
    rest = [q for q in range(n) if q not in gate.targets]
    order = list(gate.targets) + rest
    big = np.kron(gate.hamiltonian, np.eye(1 << (n - k)))
    # permute tensor legs from `order` to 0..n-1
    t = big.reshape([2] * (2 * n))
    perm = [order.index(q) for q in range(n)]
    t = t.transpose(perm + [p + n for p in perm])
    return t.reshape(1 << n, 1 << n)


class TestCircuitJson:
    def test_roundtrip(self, rng):
        c = random_circuit(3, 3, rng)
        again = Circuit.parse(json.dumps(c.to_dict()))
        assert again.n == c.n
        for g1, g2 in zip(c.gates, again.gates):
            assert g1.targets == g2.targets
            assert np.array_equal(g1.hamiltonian, g2.hamiltonian)
            assert g1.duration == g2.duration

    def test_example_document(self):
        doc = {"n": 2, "gates": [{"targets": [1], "h": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]], "t": 0.5}]}
        c = Circuit.parse(doc)
        assert c.gates[0].targets == (1,)
        assert resource_cost(c)[0] == pytest.approx(0.5)

    @pytest.mark.parametrize(
        "doc",
        [
            "{",
            {"n": 0, "gates": []},
            {"n": 13, "gates": []},
            {"n": 1, "gates": [{"targets": [0], "h": [[[1, 0]]], "t": 1}]},
            {"n": 1, "gates": [{"targets": [0], "h": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]], "t": -1}]},
            {"n": 1, "gates": [], "extra": 1},
        ],
    )
    def test_parse_errors(self, doc):
        with pytest.raises(ParseError):
            Circuit.parse(doc)


def test_random_circuit_is_seeded():
    a = random_circuit(3, 4, np.random.default_rng(5)).to_dict()
    b = random_circuit(3, 4, np.random.default_rng(5)).to_dict()
    assert a == b


def test_bures_step_matches_direct(rng):
    c = random_circuit(2, 2, rng)
    rho = random_density(2, rng)
    r = audit_bound(c, rho)
    states = trajectory(c, rho)
    assert r.per_gate_bures[0] == bures_length(states[0], states[1]).length
