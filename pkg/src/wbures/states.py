"""Named many-qubit states and their tensor compositions.

A :class:`StateSpec` lists factors left to right; the built state is their
tensor product under the package bit convention (first factor on the lowest
qubit indices). The JSON form is::

    {"factors": [{"type": "ghz", "k": 2, "a": [0.6, 0.0], "b": [0.8, 0.0]},
                 {"type": "basis", "bits": "00"}]}

Complex numbers are ``[re, im]`` pairs; a bare real number is also accepted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import DimensionTooLarge, InvalidAmplitudes, InvalidState, ParseError
from .linalg import HERMITIAN_TOL, PSD_TOL, as_matrix, hermiticity_residual, num_qubits

MAX_QUBITS = 12
AMPLITUDE_TOL = 1e-10
TRACE_TOL = 1e-10


def _to_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError("complex numbers are written as [re, im]")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


class _Factor(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def qubits(self) -> int:
        raise NotImplementedError

    def matrix(self) -> np.ndarray:
        raise NotImplementedError


class Basis(_Factor):
    type: Literal["basis"] = "basis"
    bits: str = Field(pattern=r"^[01]+$")

    @property
    def qubits(self) -> int:
        return len(self.bits)

    def matrix(self) -> np.ndarray:
        dim = 1 << len(self.bits)
        m = np.zeros((dim, dim), dtype=np.complex128)
        idx = int(self.bits, 2)
        m[idx, idx] = 1.0
        return m


class _TwoLevel(_Factor):
    k: int = Field(ge=1)
    a: complex
    b: complex

    @field_validator("a", "b", mode="before")
    @classmethod
    def _parse_complex(cls, v):
        return _to_complex(v)

    @property
    def qubits(self) -> int:
        return self.k

    def _check_norm(self) -> None:
        norm = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm - 1.0) > AMPLITUDE_TOL:
            raise InvalidAmplitudes(f"|a|^2 + |b|^2 = {norm!r}, expected 1")

    def _ghz_matrix(self) -> np.ndarray:
        self._check_norm()
        psi = np.zeros(1 << self.k, dtype=np.complex128)
        psi[0] += self.a
        psi[-1] += self.b
        return np.outer(psi, psi.conj())


class GHZ(_TwoLevel):
    """``a|0...0> + b|1...1>`` on ``k`` qubits."""

    type: Literal["ghz"] = "ghz"

    def matrix(self) -> np.ndarray:
        return self._ghz_matrix()


class Classical(_TwoLevel):
    """``|a|^2 |0..0><0..0| + |b|^2 |1..1><1..1|``, the dephased GHZ state."""

    type: Literal["class"] = "class"

    def matrix(self) -> np.ndarray:
        return np.diag(np.diag(self._ghz_matrix()))


class Dicke(_Factor):
    type: Literal["dicke"] = "dicke"
    n: int = Field(ge=1)
    k: int = Field(ge=0)

    @property
    def qubits(self) -> int:
        return self.n

    def matrix(self) -> np.ndarray:
        if self.k > self.n:
            raise InvalidState(f"Dicke state needs 0 <= k <= n, got k={self.k}, n={self.n}")
        dim = 1 << self.n
        psi = np.zeros(dim, dtype=np.complex128)
        weight = np.array([bin(i).count("1") for i in range(dim)])
        psi[weight == self.k] = 1.0 / np.sqrt(comb(self.n, self.k))
        return np.outer(psi, psi.conj())


class Mixed(_Factor):
    type: Literal["mixed"] = "mixed"
    k: int = Field(ge=1)

    @property
    def qubits(self) -> int:
        return self.k

    def matrix(self) -> np.ndarray:
        dim = 1 << self.k
        return np.eye(dim, dtype=np.complex128) / dim


class Raw(_Factor):
    type: Literal["raw"] = "raw"
    matrix_: list = Field(alias="matrix")

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    @property
    def qubits(self) -> int:
        return num_qubits(len(self.matrix_))

    def matrix(self) -> np.ndarray:
        rows = [[_to_complex(x) for x in row] for row in self.matrix_]
        return as_matrix(rows)


Factor = Annotated[
    Union[Basis, GHZ, Classical, Dicke, Mixed, Raw], Field(discriminator="type")
]


class StateSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    factors: list[Factor] = Field(min_length=1)

    @property
    def qubits(self) -> int:
        return sum(f.qubits for f in self.factors)

    @classmethod
    def parse(cls, data) -> "StateSpec":
        """Build from a dict or JSON text, raising :class:`ParseError` on bad input."""
        try:
            if isinstance(data, (str, bytes)):
                data = json.loads(data)
            return cls.model_validate(data)
        except (ValidationError, json.JSONDecodeError, ValueError) as exc:
            raise ParseError(str(exc)) from exc


def basis(bits: str) -> Basis:
    return Basis(bits=bits)


def ghz(k: int, a: complex, b: complex) -> GHZ:
    return GHZ(k=k, a=a, b=b)


def classical(k: int, a: complex, b: complex) -> Classical:
    return Classical(k=k, a=a, b=b)


def dicke(n: int, k: int) -> Dicke:
    return Dicke(n=n, k=k)


def mixed(k: int) -> Mixed:
    return Mixed(k=k)


def raw(matrix) -> Raw:
    m = as_matrix(matrix)
    return Raw(matrix=[[[z.real, z.imag] for z in row] for row in m])


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    n: int
    mat: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.mat)
        if m.shape[0] != 1 << self.n:
            raise InvalidState(f"matrix of dim {m.shape[0]} does not describe {self.n} qubits")
        if m is self.mat:
            m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "mat", m)

    @classmethod
    def from_matrix(cls, m, check: bool = True) -> "DensityMatrix":
        m = as_matrix(m)
        rho = cls(num_qubits(m.shape[0]), m)
        if check:
            report = validate(rho)
            if not report.passed:
                raise InvalidState(f"not a density matrix: {report}")
        return rho

    @property
    def dim(self) -> int:
        return 1 << self.n

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(self.n + other.n, np.kron(self.mat, other.mat))


@dataclass(frozen=True)
class ValidationReport:
    hermiticity_residual: float
    trace_deviation: float
    min_eigenvalue: float

    @property
    def passed(self) -> bool:
        return (
            self.hermiticity_residual <= HERMITIAN_TOL
            and self.trace_deviation <= TRACE_TOL
            and self.min_eigenvalue >= -PSD_TOL
        )


def validate(rho) -> ValidationReport:
    m = as_matrix(rho)
    herm = hermiticity_residual(m)
    tr_dev = abs(np.trace(m) - 1.0)
    lam_min = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
    return ValidationReport(herm, float(tr_dev), lam_min)


def build_state(spec: StateSpec, max_qubits: int = MAX_QUBITS) -> DensityMatrix:
    if isinstance(spec, (list, tuple)):
        spec = StateSpec(factors=list(spec))
    n = spec.qubits
    if n > max_qubits:
        raise DimensionTooLarge(f"{n} qubits exceeds the maximum of {max_qubits}")
    mat = np.ones((1, 1), dtype=np.complex128)
    for factor in spec.factors:
        mat = np.kron(mat, factor.matrix())
    rho = DensityMatrix(n, mat)
    report = validate(rho)
    if not report.passed:
        raise InvalidState(f"spec does not describe a density matrix: {report}")
    return rho


def product(*factors: _Factor, max_qubits: int = MAX_QUBITS) -> DensityMatrix:
    """Shorthand for ``build_state(StateSpec(factors=[...]))``."""
    return build_state(StateSpec(factors=list(factors)), max_qubits=max_qubits)


def zeros(n: int) -> DensityMatrix:
    return product(basis("0" * n))
