import numpy as np
import pytest


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    dim = 1 << n
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(n: int, rng: np.random.Generator) -> np.ndarray:
    return random_density(n, rng, rank=1)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + g.conj().T)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_kraus(rng: np.random.Generator, count: int = 3) -> list[np.ndarray]:
    """Kraus operators of a random single-qubit channel, from a random isometry."""
    v = random_unitary(2 * count, rng)[:, :2]
    return [v[2 * i : 2 * i + 2, :] for i in range(count)]


def local_unitary_product(n: int, rng: np.random.Generator) -> np.ndarray:
    u = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        u = np.kron(u, random_unitary(2, rng))
    return u


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# per-criterion verdicts for the acceptance module
_criteria: dict[int, dict] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            num, title = mark.args
            entry = _criteria.setdefault(num, {"title": title, "ids": set(), "seen": set(), "failed": []})
            entry["ids"].add(item.nodeid)


def pytest_runtest_logreport(report):
    for entry in _criteria.values():
        if report.nodeid not in entry["ids"]:
            continue
        entry["seen"].add(report.nodeid)
        if report.failed and report.nodeid not in entry["failed"]:
            entry["failed"].append(report.nodeid)


def pytest_terminal_summary(terminalreporter):
    ran = {num: e for num, e in _criteria.items() if e["seen"]}
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ran):
        entry = ran[num]
        total, bad = len(entry["seen"]), len(entry["failed"])
        verdict = "PASS" if bad == 0 else "FAIL"
        terminalreporter.write_line(
            f"criterion {num} ({entry['title']}): {verdict} ({total - bad}/{total} checks)"
        )
        for nodeid in entry["failed"]:
            terminalreporter.write_line(f"    failed: {nodeid.split('::', 1)[-1]}")
