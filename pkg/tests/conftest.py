import sys

import numpy as np
import pytest

from belab.catalog import DensityMatrix, edge_state, gentiles2_4x3_upb, tiles_upb


# Independent oracle for the Choi detector: explicit Kronecker conjugation,
# an explicit block loop applying the printed 3x3 formula, and LAPACK eigvalsh.
# Shares no code with belab.maps / belab.linalg.
def oracle_choi_u(mat, d1):
    u = np.array([[0.5, np.sqrt(3) / 2, 0], [-np.sqrt(3) / 2, 0.5, 0], [0, 0, 1]])
    big = np.kron(np.eye(d1), u)
    r = big @ mat @ big.T
    out = np.zeros_like(r)
    for i in range(d1):
        for j in range(d1):
            a = r[3 * i : 3 * i + 3, 3 * j : 3 * j + 3]
            out[3 * i : 3 * i + 3, 3 * j : 3 * j + 3] = 0.5 * np.array(
                [
                    [a[0, 0] + a[1, 1], -a[0, 1], -a[0, 2]],
                    [-a[1, 0], a[1, 1] + a[2, 2], -a[1, 2]],
                    [-a[2, 0], -a[2, 1], a[2, 2] + a[0, 0]],
                ]
            )
    return np.linalg.eigvalsh(0.5 * (out + out.T))[0]


def bell_state():
    psi = np.array([1.0, 0, 0, 1.0]) / np.sqrt(2)
    return DensityMatrix(np.outer(psi, psi), (2, 2), label="bell")


def random_unit(rng, d):
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


@pytest.fixture(scope="session")
def tiles():
    return tiles_upb()


@pytest.fixture(scope="session")
def gentiles2():
    return gentiles2_4x3_upb()


@pytest.fixture(scope="session")
def tiles_edge(tiles):
    return edge_state(tiles)


@pytest.fixture(scope="session")
def gentiles2_edge(gentiles2):
    return edge_state(gentiles2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
