import numpy as np
import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    def _report(criterion: str, ok: bool, detail: str) -> None:
        _ACCEPTANCE_LINES.append(f"{criterion}: {'PASS' if ok else 'FAIL'}  {detail}")

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def corrupted_projector(monkeypatch):
    """Flip the sign of the n n term in the transverse projector."""
    from cbsduality import scattering

    def flipped(n, first, second):
        dyad = np.einsum("ijk,ikl->jl", second, first)
        n_second = np.einsum("...i,ijk->...jk", n, second)
        n_first = np.einsum("...i,ijk->...jk", n, first)
        return dyad + n_second @ n_first

    monkeypatch.setattr(scattering, "_middle_factor", flipped)
    return flipped


def random_hermitian(rng, size=4, scale=1.0):
    a = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return scale * (a + a.conj().T) / 2


X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Y2 = np.array([[0, -1j], [1j, 0]])
Z2 = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)
