import numpy as np
import pytest

# A weighted antisymmetric matrix, its sign pattern B, and a signed
# permutation P with P^T B P = G.
WEIGHTED_A = np.array(
    [
        [0, 2, -3, 1],
        [-2, 0, 4, -5],
        [3, -4, 0, 6],
        [-1, 5, -6, 0],
    ],
    dtype=float,
)
SIGN_B = np.array(
    [
        [0, 1, -1, 1],
        [-1, 0, 1, -1],
        [1, -1, 0, 1],
        [-1, 1, -1, 0],
    ],
    dtype=float,
)
SIGNED_P = np.array(
    [
        [0, 0, 1, 0],
        [0, -1, 0, 0],
        [1, 0, 0, 0],
        [0, 0, 0, 1],
    ],
    dtype=float,
)

# A small 4x4 target and its exponential rounded to two decimals.
SMALL_A = np.array(
    [
        [0.0, 0.4, 0.3, -0.35],
        [-0.4, 0.0, 0.19, -0.1],
        [-0.3, -0.19, 0.0, -0.27],
        [0.35, 0.1, 0.27, 0.0],
    ]
)
ROUNDED_U = np.array(
    [
        [0.82, 0.33, 0.26, -0.38],
        [-0.42, 0.9, 0.11, -0.04],
        [-0.28, -0.25, 0.9, -0.2],
        [0.27, 0.13, 0.32, 0.9],
    ]
)

_ACCEPTANCE = {}


@pytest.fixture
def record_criterion():
    """Record ``(number, passed, detail)`` for the acceptance summary."""

    def record(number, passed, detail):
        _ACCEPTANCE[number] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
