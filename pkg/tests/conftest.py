import numpy as np
import pytest

import qmoney
from qmoney.rng import make_rng


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    prev = qmoney.set_backend(request.param)
    yield request.param
    qmoney.set_backend(prev)


def random_gentle_instance(n, epsilon, rng, k=1):
    """Random rho and ``k`` gentle measurements each passing w.p. >= 1 - epsilon.

    rho = (1-d)|psi><psi| + d tau and each projector's range holds a vector
    w with |<w|U(psi x 0)>|^2 >= 1 - e, where d + e <= epsilon.
    """
    from qmoney import core

    psi = core.random_state(n, rng)
    tau = core.random_density(n, rng)
    a, b = rng.random(2)
    d, e = epsilon * a * b, epsilon * (1 - a) * b
    rho = core.DensityMatrix.from_matrix((1 - d) * np.outer(psi.amps, psi.amps.conj()) + d * tau.mat)
    ms = []
    for _ in range(k):
        anc = int(rng.integers(0, 2))
        dim = 1 << (n + anc)
        u = core.random_unitary(dim, rng)
        good = u @ np.kron(psi.amps, np.eye(1, 1 << anc, 0).reshape(-1))
        perp = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        perp -= np.vdot(good, perp) * good
        perp /= np.linalg.norm(perp)
        w = np.sqrt(1 - e) * good + np.sqrt(e) * perp
        extra = int(rng.integers(0, dim // 2))
        cols = [w] + [rng.normal(size=dim) + 1j * rng.normal(size=dim) for _ in range(extra)]
        q, _ = np.linalg.qr(np.array(cols).T)
        ms.append(core.GentleMeasurement(anc, core.Unitary(u), q @ q.conj().T))
    return rho, ms


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
