"""Gate-sequence cost and the audit of ``R_U >= D_B``.

Units: hbar = 1, so energies and durations are dimensionless and only their
products enter the cost. Circuit files look like::

    {"n": 4, "gates": [{"targets": [0, 1], "h": [[[re, im], ...], ...], "t": 0.5}]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .distances import bures_length, seminorm
from .errors import DimensionMismatch, InvalidGate, ParseError
from .linalg import (
    HERMITIAN_TOL,
    as_matrix,
    conjugate_local,
    hermitian_eig,
    hermiticity_residual,
    propagator,
)
from .states import DensityMatrix
from .weighted import MAX_QUBITS, WeightedResult, weighted_distance

#: Slack allowed on ``R_U >= D_B`` before an audit is declared violated.
BOUND_TOL = 1e-9
#: Eigenvalue gap under which the spectrum of the input counts as degenerate.
DEGENERACY_GAP = 1e-10


@dataclass(frozen=True, eq=False)
class GateSpec:
    targets: tuple[int, ...]
    hamiltonian: np.ndarray
    duration: float

    def __post_init__(self):
        targets = tuple(int(q) for q in self.targets)
        if not targets or len(set(targets)) != len(targets):
            raise InvalidGate(f"gate targets must be distinct and nonempty, got {targets}")
        try:
            h = as_matrix(self.hamiltonian)
        except (DimensionMismatch, ValueError) as exc:
            raise InvalidGate(str(exc)) from exc
        if h.shape[0] != 1 << len(targets):
            raise InvalidGate(
                f"Hamiltonian of dim {h.shape[0]} does not act on {len(targets)} qubit(s)"
            )
        if hermiticity_residual(h) > HERMITIAN_TOL:
            raise InvalidGate("gate Hamiltonian is not Hermitian")
        if not self.duration > 0 or not np.isfinite(self.duration):
            raise InvalidGate(f"gate duration must be positive, got {self.duration}")
        h = h.copy()
        h.flags.writeable = False
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "duration", float(self.duration))

    @property
    def size(self) -> int:
        return len(self.targets)

    def unitary(self) -> np.ndarray:
        return propagator(self.hamiltonian, self.duration)


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[GateSpec, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise InvalidGate("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.targets) >= self.n or min(g.targets) < 0:
                raise InvalidGate(f"gate targets {g.targets} out of range for {self.n} qubits")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "gates": [
                {
                    "targets": list(g.targets),
                    "h": [[[z.real, z.imag] for z in row] for row in g.hamiltonian],
                    "t": g.duration,
                }
                for g in self.gates
            ],
        }

    @classmethod
    def parse(cls, data) -> "Circuit":
        """Build from a dict or JSON text; malformed input raises :class:`ParseError`."""
        try:
            if isinstance(data, (str, bytes)):
                data = json.loads(data)
            model = _CircuitModel.model_validate(data)
            gates = [
                GateSpec(
                    tuple(g.targets),
                    np.array([[complex(*z) for z in row] for row in g.h], dtype=np.complex128),
                    g.t,
                )
                for g in model.gates
            ]
            return cls(model.n, tuple(gates))
        except (ValidationError, json.JSONDecodeError, InvalidGate, TypeError, ValueError) as exc:
            raise ParseError(str(exc)) from exc


class _GateModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    targets: list[int] = Field(min_length=1)
    h: list[list[tuple[float, float]]]
    t: float


class _CircuitModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=1, le=MAX_QUBITS)
    gates: list[_GateModel] = []


@dataclass(frozen=True)
class GateCost:
    size: int
    energy: float
    duration: float
    cost: float


def gate_cost(gate: GateSpec) -> GateCost:
    e = seminorm(gate.hamiltonian)
    return GateCost(gate.size, e, gate.duration, gate.size * e * gate.duration)


def resource_cost(circuit: Circuit) -> tuple[float, list[GateCost]]:
    """Total cost ``sum_l k_l E_l T_l`` and its per-gate breakdown."""
    per_gate = [gate_cost(g) for g in circuit.gates]
    return float(sum(g.cost for g in per_gate)), per_gate


def _check_input(circuit: Circuit, rho0) -> np.ndarray:
    m = as_matrix(rho0)
    if m.shape[0] != 1 << circuit.n:
        raise DimensionMismatch(
            f"state of dim {m.shape[0]} does not match a {circuit.n}-qubit circuit"
        )
    return m


def apply_gate(gate: GateSpec, rho) -> np.ndarray:
    return conjugate_local(gate.unitary(), rho, gate.targets)


def trajectory(circuit: Circuit, rho0) -> list[np.ndarray]:
    """States before the first gate and after each gate, in order."""
    states = [_check_input(circuit, rho0)]
    for g in circuit.gates:
        states.append(apply_gate(g, states[-1]))
    return states


def simulate_circuit(circuit: Circuit, rho0) -> DensityMatrix:
    out = trajectory(circuit, rho0)[-1]
    return DensityMatrix(circuit.n, 0.5 * (out + out.conj().T))


def has_degenerate_spectrum(rho, gap: float = DEGENERACY_GAP) -> bool:
    w = hermitian_eig(rho).eigenvalues
    return bool(np.any(np.diff(w) < gap))


def intermediate_tau(rho, sigma) -> DensityMatrix:
    """Spectrum of ``sigma`` placed on the eigenbasis of ``rho``.

    Both spectra are sorted in descending order and paired index by index.
    Within a degenerate eigenspace of ``rho`` the basis is whatever the
    eigen-solver returns.
    """
    a, b = as_matrix(rho), as_matrix(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch(f"states have dims {a.shape[0]} and {b.shape[0]}")
    v = hermitian_eig(a).eigenvectors[:, ::-1]
    lam = hermitian_eig(b).eigenvalues[::-1]
    tau = (v * lam) @ v.conj().T
    tau = 0.5 * (tau + tau.conj().T)
    return DensityMatrix.from_matrix(tau, check=False)


@dataclass(frozen=True, eq=False)
class BoundReport:
    r_u: float
    d_b: float
    d_b_tau: float
    tau: DensityMatrix
    sigma: DensityMatrix
    per_gate: tuple[GateCost, ...]
    per_gate_bures: tuple[float, ...]
    weighted: WeightedResult
    tau_degenerate: bool
    holds: bool = field(init=False)
    margin: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "margin", self.r_u - self.d_b)
        object.__setattr__(self, "holds", self.r_u >= self.d_b - BOUND_TOL)

    def to_dict(self) -> dict:
        return {
            "r_u": self.r_u,
            "d_b": self.d_b,
            "d_b_tau": self.d_b_tau,
            "margin": self.margin,
            "holds": self.holds,
            "tau_degenerate": self.tau_degenerate,
            "per_gate": [
                {
                    "k": g.size,
                    "energy": g.energy,
                    "duration": g.duration,
                    "cost": g.cost,
                    "bures_step": b,
                }
                for g, b in zip(self.per_gate, self.per_gate_bures)
            ],
            "partition": list(self.weighted.partition.blocks),
            "tau": [[[z.real, z.imag] for z in row] for row in self.tau.mat],
        }


def audit_bound(circuit: Circuit, rho0, workers: int = 1) -> BoundReport:
    """Simulate ``circuit`` on ``rho0`` and check ``R_U >= D_B(rho0, sigma)``.

    The general-process form ``D_B(tau, sigma)`` is reported alongside; for a
    unitary circuit ``tau`` coincides with ``rho0`` up to degenerate-subspace
    freedom.
    """
    states = trajectory(circuit, rho0)
    rho = states[0]
    sigma = simulate_circuit(circuit, rho)
    r_u, per_gate = resource_cost(circuit)
    step_bures = tuple(
        bures_length(pre, post).length for pre, post in zip(states[:-1], states[1:])
    )
    weighted = weighted_distance(rho, sigma.mat, workers=workers)
    tau = intermediate_tau(rho, sigma.mat)
    d_b_tau = weighted_distance(tau.mat, sigma.mat, workers=workers).value
    return BoundReport(
        r_u=r_u,
        d_b=weighted.value,
        d_b_tau=d_b_tau,
        tau=tau,
        sigma=sigma,
        per_gate=tuple(per_gate),
        per_gate_bures=step_bures,
        weighted=weighted,
        tau_degenerate=has_degenerate_spectrum(rho),
    )


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (g + g.conj().T)


def random_circuit(
    n: int,
    n_gates: int,
    rng: np.random.Generator,
    max_k: int = 2,
    max_duration: float = np.pi,
) -> Circuit:
    """Random circuit: gates on 1..max_k distinct qubits, Gaussian Hermitian H, T in (0, max_duration]."""
    gates = []
    for _ in range(n_gates):
        k = int(rng.integers(1, min(max_k, n) + 1))
        targets = tuple(int(q) for q in rng.choice(n, size=k, replace=False))
        h = random_hermitian(1 << k, rng)
        t = float(max_duration * (1.0 - rng.random()))
        gates.append(GateSpec(targets, h, t))
    return Circuit(n, tuple(gates))
