"""Closed-form case studies: computed Bures and weighted Bures lengths next to their formulas.

Each row compares a reference state against one of the standard many-qubit
families (flipped bits, GHZ, dephased GHZ, Dicke, maximally mixed blocks) and
records the closed form, the absolute deviation, and whether the row is one of
the cells whose closed form does not follow the root-fidelity convention.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterator

import numpy as np

from .errors import InvalidAmplitudes, ParameterOutOfRange
from .states import basis, classical, dicke, ghz, mixed, product, zeros
from .weighted import cache_from_fidelities, subset_fidelities, weighted_distance_from_cache

#: Deviation from the closed form above which a row is flagged.
MATCH_TOL = 1e-9
MIN_N, MAX_N = 2, 10

BALANCED = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class Table1Row:
    case: str
    n: int
    k: int | None
    l: int | None
    a: float
    b: float
    bures: float
    weighted: float
    weighted_squared: float
    closed_bures: float
    closed_weighted: float
    bures_deviation: float
    weighted_deviation: float
    bures_flag: bool
    weighted_flag: bool
    open_question: str
    partition: tuple[int, ...]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["partition"] = list(self.partition)
        return d


@dataclass(frozen=True)
class _Case:
    case: str
    k: int | None
    l: int | None
    a: float
    b: float
    rho: object
    sigma: object
    closed_bures: float
    closed_weighted: float
    open_question: str = ""


def _pad(n: int, used: int) -> list:
    return [basis("0" * (n - used))] if n > used else []


def _is_balanced(a: float, b: float) -> bool:
    return abs(abs(a) - BALANCED) < 1e-12 and abs(abs(b) - BALANCED) < 1e-12


def cases(n: int, a: float, b: float) -> Iterator[_Case]:
    """Every table case that can be instantiated on ``n`` qubits."""
    ab, bb = abs(a), abs(b)
    ref = zeros(n)
    for k in range(1, n + 1):
        yield _Case(
            "flip", k, None, a, b, ref,
            product(basis("1" * k), *_pad(n, k)),
            np.pi / 2, k * np.pi / 2,
        )
    for family, make in (("ghz", ghz), ("class", classical)):
        for k in range(1, n + 1):
            yield _Case(
                family, k, None, a, b, ref,
                product(make(k, a, b), *_pad(n, k)),
                np.arccos(ab), k * np.arccos(ab),
            )
        for k in range(1, n + 1):
            for l in range(1, n // k + 1):
                yield _Case(
                    f"{family}_power", k, l, a, b, ref,
                    product(*[make(l, a, b)] * k, *_pad(n, k * l)),
                    np.arccos(ab**k), k * l * np.arccos(ab),
                )
    for k in range(1, n + 1):
        yield _Case(
            "dicke", k, None, a, b, ref, product(dicke(n, k)),
            np.pi / 2, n * np.arccos(1 - k / n), open_question="weighted",
        )
    for k in range(1, n + 1):
        yield _Case(
            "mixed", k, None, a, b, ref,
            product(mixed(k), *_pad(n, k)),
            np.arccos(1 / np.sqrt(2**k)), k * np.arccos(BALANCED),
        )
    noise = product(mixed(n))
    if not _is_balanced(a, b):
        yield _Case(
            "ghz_identity", None, None, a, b, product(ghz(n, a, b)), noise,
            np.arccos((ab + bb) / np.sqrt(2**n)), n * np.arccos((ab + bb) / np.sqrt(2)),
            open_question="bures",
        )
        yield _Case(
            "class_identity", None, None, a, b, product(classical(n, a, b)), noise,
            np.arccos((ab + bb) / np.sqrt(2**n)), n * np.arccos((ab + bb) / np.sqrt(2)),
        )
    if n % 2 == 0:
        s = BALANCED
        yield _Case(
            "ghz_identity_balanced", None, None, s, s, product(ghz(n, s, s)), noise,
            np.arccos(1 / np.sqrt(2 ** (n - 1))), n * np.pi / 16, open_question="bures",
        )
        yield _Case(
            "class_identity_balanced", None, None, s, s, product(classical(n, s, s)), noise,
            np.arccos(1 / np.sqrt(2 ** (n - 1))), n * np.pi / 16,
        )
    closed = np.arccos(np.sqrt(ab**4 + bb**4))
    yield _Case(
        "class_ghz", None, None, a, b, product(classical(n, a, b)), product(ghz(n, a, b)),
        closed, closed / n,
    )


def evaluate(case: _Case, n: int, workers: int = 1) -> Table1Row:
    fids = subset_fidelities(case.rho, case.sigma, workers=workers)
    root = weighted_distance_from_cache(cache_from_fidelities(n, fids, "root"))
    squared = weighted_distance_from_cache(cache_from_fidelities(n, fids, "squared"))
    bures = float(np.arccos(fids[(1 << n) - 1]))
    dev_b = float(abs(bures - case.closed_bures))
    dev_w = float(abs(root.value - case.closed_weighted))
    return Table1Row(
        case=case.case,
        n=n,
        k=case.k,
        l=case.l,
        a=float(case.a),
        b=float(case.b),
        bures=bures,
        weighted=root.value,
        weighted_squared=squared.value,
        closed_bures=float(case.closed_bures),
        closed_weighted=float(case.closed_weighted),
        bures_deviation=dev_b,
        weighted_deviation=dev_w,
        bures_flag=dev_b > MATCH_TOL,
        weighted_flag=dev_w > MATCH_TOL,
        open_question=case.open_question,
        partition=root.partition.blocks,
    )


def check_parameters(n: int, a: float, b: float) -> None:
    if not MIN_N <= n <= MAX_N:
        raise ParameterOutOfRange(f"n must lie in [{MIN_N}, {MAX_N}], got {n}")
    norm = abs(a) ** 2 + abs(b) ** 2
    if abs(norm - 1.0) > 1e-10:
        raise InvalidAmplitudes(f"|a|^2 + |b|^2 = {norm!r}, expected 1")


def table1(n: int, a: float, b: float, workers: int = 1) -> list[Table1Row]:
    check_parameters(n, a, b)
    return [evaluate(c, n, workers=workers) for c in cases(n, a, b)]
