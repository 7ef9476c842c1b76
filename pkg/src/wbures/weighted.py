"""Weighted Bures length: maximum over measurement partitions of inverse-size weighted sums.

Blocks are qubit subsets encoded as integer masks (bit ``i`` set means qubit
``i`` is in the block). The production path is an exact dynamic program over
subsets, ``O(3**n)`` block visits; :func:`weighted_distance_bruteforce`
enumerates every set partition and is kept as an independent check.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import islice
from typing import Iterator, Mapping

import numpy as np

from .distances import bures_length, uhlmann_fidelity
from .errors import DimensionMismatch, DimensionTooLarge, InvalidPartition, TooLarge
from .linalg import as_matrix, marginals, num_qubits, qubits_of

MAX_QUBITS = 12
MAX_ENUMERATE = 10
MAX_BRUTEFORCE = 8
#: Partition values closer than this are treated as tied.
TIE_TOL = 1e-12

CONVENTIONS = ("root", "squared")


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class Partition:
    n: int
    blocks: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(sorted(int(b) for b in self.blocks)))
        seen = 0
        for b in self.blocks:
            if b <= 0 or b >> self.n:
                raise InvalidPartition(f"block {b:#b} is empty or outside {self.n} qubits")
            if seen & b:
                raise InvalidPartition("blocks overlap")
            seen |= b
        if seen != (1 << self.n) - 1:
            raise InvalidPartition("blocks do not cover every qubit")

    @classmethod
    def from_qubit_lists(cls, n: int, blocks) -> "Partition":
        return cls(n, tuple(sum(1 << q for q in block) for block in blocks))

    def as_qubit_lists(self) -> list[list[int]]:
        return [qubits_of(b) for b in self.blocks]

    def __len__(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class BlockDistanceCache:
    """Bures length of the marginals on every nonempty qubit subset."""

    n: int
    values: Mapping[int, float]
    fidelities: Mapping[int, float] = field(default_factory=dict)

    def __getitem__(self, mask: int) -> float:
        return self.values[mask]


@dataclass(frozen=True)
class BlockContribution:
    mask: int
    size: int
    bures: float
    contribution: float


@dataclass(frozen=True)
class WeightedResult:
    value: float
    partition: Partition
    contributions: tuple[BlockContribution, ...]

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "blocks": [
                {"mask": c.mask, "size": c.size, "bures": c.bures, "contribution": c.contribution}
                for c in self.contributions
            ],
            "partition": list(self.partition.blocks),
        }


def _check_pair(rho, sigma, max_qubits: int) -> tuple[np.ndarray, np.ndarray, int]:
    a, b = as_matrix(rho), as_matrix(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch(f"states have dims {a.shape[0]} and {b.shape[0]}")
    n = num_qubits(a.shape[0])
    if n > max_qubits:
        raise DimensionTooLarge(f"{n} qubits exceeds the maximum of {max_qubits}")
    if n < 1:
        raise DimensionMismatch("states must have at least one qubit")
    return a, b, n


def subset_fidelities(rho, sigma, workers: int = 1, max_qubits: int = MAX_QUBITS) -> dict[int, float]:
    """Uhlmann fidelity of the marginals on every nonempty subset, keyed by mask.

    With ``workers > 1`` the fidelities are evaluated on a thread pool in
    fixed-size chunks; results are merged by mask, so the output does not
    depend on scheduling.
    """
    a, b, n = _check_pair(rho, sigma, max_qubits)
    pairs = ((ma, ra, rb) for (ma, ra), (_, rb) in zip(marginals(a), marginals(b)))
    out: dict[int, float] = {}
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            while chunk := list(islice(pairs, 8 * workers)):
                fids = pool.map(lambda p: uhlmann_fidelity(p[1], p[2]), chunk)
                out.update(zip((p[0] for p in chunk), fids))
    else:
        for mask, ra, rb in pairs:
            out[mask] = uhlmann_fidelity(ra, rb)
    return dict(sorted(out.items()))


def cache_from_fidelities(n: int, fidelities: Mapping[int, float], convention: str = "root") -> BlockDistanceCache:
    """Turn subset fidelities into block distances.

    ``"root"`` is the Bures length ``arccos F``. ``"squared"`` uses
    ``arccos F**2`` and is only offered as a diagnostic for comparing against
    values computed with the squared-fidelity convention.
    """
    if convention == "root":
        values = {m: float(np.arccos(f)) for m, f in fidelities.items()}
    elif convention == "squared":
        values = {m: float(np.arccos(f * f)) for m, f in fidelities.items()}
    else:
        raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")
    return BlockDistanceCache(n, values, dict(fidelities))


def subset_distance_cache(
    rho, sigma, workers: int = 1, max_qubits: int = MAX_QUBITS, convention: str = "root"
) -> BlockDistanceCache:
    n = num_qubits(as_matrix(rho).shape[0])
    fids = subset_fidelities(rho, sigma, workers=workers, max_qubits=max_qubits)
    return cache_from_fidelities(n, fids, convention)


def weighted_sum(partition: Partition, cache: BlockDistanceCache) -> float:
    if partition.n != cache.n:
        raise InvalidPartition(f"partition is over {partition.n} qubits, cache over {cache.n}")
    return float(sum(cache[b] / popcount(b) for b in partition.blocks))


def _result(partition: Partition, cache: BlockDistanceCache) -> WeightedResult:
    contribs = tuple(
        BlockContribution(b, popcount(b), cache[b], cache[b] / popcount(b))
        for b in partition.blocks
    )
    return WeightedResult(float(sum(c.contribution for c in contribs)), partition, contribs)


def _better(value: float, blocks: tuple[int, ...], best_value: float, best_blocks) -> bool:
    if best_blocks is None or value > best_value + TIE_TOL:
        return True
    if value < best_value - TIE_TOL:
        return False
    if len(blocks) != len(best_blocks):
        return len(blocks) < len(best_blocks)
    return blocks < best_blocks


def weighted_distance_from_cache(cache: BlockDistanceCache) -> WeightedResult:
    """Exact maximization over set partitions by subset DP.

    ``f(S) = max_{B subset S, B contains lowbit(S)} cache[B]/|B| + f(S \\ B)``.
    Near-ties (within ``TIE_TOL``) go to fewer blocks, then to the smaller
    sorted tuple of block masks.
    """
    n = cache.n
    full = (1 << n) - 1
    weight = {m: v / popcount(m) for m, v in cache.values.items()}
    best_val = [0.0] * (full + 1)
    best_blocks: list[tuple[int, ...] | None] = [None] * (full + 1)
    best_blocks[0] = ()
    for s in range(1, full + 1):
        low = s & -s
        rest = s ^ low
        bv, bb = 0.0, None
        sub = rest
        while True:
            block = sub | low
            remainder = s ^ block
            val = weight[block] + best_val[remainder]
            if bb is None or val >= bv - TIE_TOL:
                cand = tuple(sorted(best_blocks[remainder] + (block,)))
                if _better(val, cand, bv, bb):
                    bv, bb = val, cand
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best_val[s], best_blocks[s] = bv, bb
    return _result(Partition(n, best_blocks[full]), cache)


def weighted_distance(
    rho, sigma, workers: int = 1, max_qubits: int = MAX_QUBITS, convention: str = "root"
) -> WeightedResult:
    """Weighted Bures length ``D_B(rho, sigma)`` with its maximizing partition."""
    cache = subset_distance_cache(
        rho, sigma, workers=workers, max_qubits=max_qubits, convention=convention
    )
    return weighted_distance_from_cache(cache)


def restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    """All restricted growth strings of length ``n`` in lexicographic order."""
    if n < 1:
        raise InvalidPartition("need at least one element")
    a = [0] * n
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0:
            if a[i] <= max(a[:i]):
                break
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, n):
            a[j] = 0


def enumerate_partitions(n: int) -> Iterator[Partition]:
    """Every set partition of ``n`` qubits exactly once (Bell(n) of them)."""
    if n > MAX_ENUMERATE:
        raise TooLarge(f"refusing to enumerate partitions of {n} > {MAX_ENUMERATE} elements")
    for rgs in restricted_growth_strings(n):
        blocks = [0] * (max(rgs) + 1)
        for q, label in enumerate(rgs):
            blocks[label] |= 1 << q
        yield Partition(n, tuple(blocks))


def weighted_distance_bruteforce(rho, sigma, cache: BlockDistanceCache | None = None) -> WeightedResult:
    if cache is None:
        a, b, n = _check_pair(rho, sigma, MAX_QUBITS)
        if n > MAX_BRUTEFORCE:
            raise TooLarge(f"brute force is limited to {MAX_BRUTEFORCE} qubits")
        cache = subset_distance_cache(a, b)
    if cache.n > MAX_BRUTEFORCE:
        raise TooLarge(f"brute force is limited to {MAX_BRUTEFORCE} qubits")
    best, best_val = None, 0.0
    for p in enumerate_partitions(cache.n):
        val = weighted_sum(p, cache)
        if best is None or _better(val, p.blocks, best_val, best.blocks):
            best, best_val = p, val
    return _result(best, cache)


def sandwich_bounds(rho, sigma, bures: float | None = None) -> tuple[float, float]:
    """``(B/n, n*B)``, which bracket the weighted Bures length."""
    a, b, n = _check_pair(rho, sigma, MAX_QUBITS)
    if bures is None:
        bures = bures_length(a, b).length
    return bures / n, n * bures
