import math
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewcirc.circuit import (
    GateKind,
    GateOp,
    ParamVector,
    apply_gates,
    assemble_u,
    block_identity,
    build_d_block,
    build_kron_rz,
    build_lambda_block,
    build_p_block,
    build_param_qft,
    eigenbasis,
    kron_rz_phases,
    lambda_angles,
    p_block_gates,
    p_count,
    qft_gates,
    random_params,
    reconstruct_generator,
    standard_qft_angles,
    total_count,
    warm_start,
)
from skewcirc.errors import LayoutError, SingularityError
from skewcirc.linalg import expm_pade
from skewcirc.optimize import loss_antisym
from skewcirc.rng import SplitMix64
from skewcirc.spectral import build_g, dft_matrix

# --- independent full-matrix gate oracle ------------------------------------

I2 = np.eye(2)
P0 = np.diag([1.0, 0.0])
P1 = np.diag([0.0, 1.0])
H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def ry(phi):
    return np.array([[math.cos(phi / 2), -math.sin(phi / 2)], [math.sin(phi / 2), math.cos(phi / 2)]])


def embed(ops, n):
    """Kronecker product with ``ops[q]`` on qubit q (qubit 0 leftmost)."""
    return reduce(np.kron, [ops.get(q, I2) for q in range(n)])


def controlled(gate, control, target, n):
    return embed({control: P0}, n) + embed({control: P1, target: gate}, n)


def swap(a, b, n):
    big = 2**n
    m = np.zeros((big, big))
    for j in range(big):
        bits = [(j >> (n - 1 - q)) & 1 for q in range(n)]
        bits[a], bits[b] = bits[b], bits[a]
        m[sum(bit << (n - 1 - q) for q, bit in enumerate(bits)), j] = 1
    return m


def oracle_unitary(gates, params, n):
    u = np.eye(2**n, dtype=complex)
    for op in gates:
        if op.kind is GateKind.HADAMARD:
            g = embed({op.target: H}, n)
        elif op.kind is GateKind.RY:
            g = embed({op.target: ry(params[op.param_slot])}, n)
        elif op.kind is GateKind.CRY:
            g = controlled(ry(params[op.param_slot]), op.control, op.target, n)
        elif op.kind is GateKind.CPHASE:
            g = controlled(np.diag([1, np.exp(1j * params[op.param_slot])]), op.control, op.target, n)
        elif op.kind is GateKind.BITREV_SWAP:
            g = swap(op.target, op.control, n)
        else:
            raise AssertionError(op)
        u = g @ u
    return u


def rand_params(n, seed):
    return random_params(n, SplitMix64(seed))


# --- counts -------------------------------------------------------------------


@pytest.mark.parametrize("n,expected", [(6, 17), (3, 8), (1, 2)])
def test_p_count(n, expected):
    assert p_count(n) == expected
    assert len(p_block_gates(n)) == expected


@pytest.mark.parametrize("n,expected", [(3, 17), (2, 10), (1, 4)])
def test_total_count(n, expected):
    assert total_count(n) == expected
    assert rand_params(n, 0).flat().shape == (expected,)


def test_p_layout_matches_layers():
    kinds = [op.kind for op in p_block_gates(6)]
    assert kinds == [GateKind.RY] * 6 + [GateKind.CRY] * 3 + [GateKind.RY] * 6 + [GateKind.CRY] * 2
    cry = [(op.control, op.target) for op in p_block_gates(6) if op.kind is GateKind.CRY]
    assert cry == [(0, 1), (2, 3), (4, 5), (1, 2), (3, 4)]


def test_gateop_validation():
    with pytest.raises(LayoutError):
        GateOp(GateKind.CRY, 1, control=1, param_slot=0)
    with pytest.raises(LayoutError):
        GateOp(GateKind.HADAMARD, 0, param_slot=0)
    with pytest.raises(LayoutError):
        GateOp(GateKind.RY, 0)
    with pytest.raises(LayoutError):
        GateOp(GateKind.RY, 3, param_slot=0).check(2)


# --- P block --------------------------------------------------------------------


def test_p_block_identity():
    np.testing.assert_array_equal(build_p_block(np.zeros(p_count(3)), 3), np.eye(8))


def test_p_block_single_qubit():
    np.testing.assert_allclose(build_p_block([math.pi, 0.0], 1), [[0, -1], [1, 0]], atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_p_block_against_oracle(n):
    theta = np.random.default_rng(n).uniform(-math.pi, math.pi, p_count(n))
    p = build_p_block(theta, n)
    assert p.dtype == np.float64
    np.testing.assert_allclose(p, oracle_unitary(p_block_gates(n), theta, n).real, atol=1e-13)
    assert np.linalg.norm(p.T @ p - np.eye(2**n)) <= 1e-12


def test_p_block_wrong_count():
    with pytest.raises(LayoutError):
        build_p_block(np.zeros(3), 2)


# --- diagonal blocks ----------------------------------------------------------


def test_kron_rz_single():
    phi = 0.7
    np.testing.assert_allclose(build_kron_rz([phi]), np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)]))


def test_kron_rz_two_qubit_phases():
    np.testing.assert_array_equal(build_kron_rz([0.0, 0.0]), np.eye(4))
    a, b = 0.3, -1.1
    np.testing.assert_allclose(kron_rz_phases([a, b]), [-(a + b) / 2, (-a + b) / 2, (a - b) / 2, (a + b) / 2])


@pytest.mark.parametrize("n", [1, 3, 5])
def test_kron_rz_matches_kron(n):
    angles = np.linspace(-2, 3, n)
    rz = [np.diag([np.exp(-0.5j * a), np.exp(0.5j * a)]) for a in angles]
    np.testing.assert_allclose(build_kron_rz(angles), reduce(np.kron, rz), atol=1e-14)
    np.testing.assert_array_equal(build_d_block(angles), build_kron_rz(angles))


def test_lambda_block_examples():
    np.testing.assert_allclose(build_lambda_block([math.pi / 2]), np.eye(2), atol=1e-15)
    np.testing.assert_allclose(build_lambda_block([math.pi / 4]), np.diag([np.exp(-0.5j), np.exp(0.5j)]), atol=1e-15)
    phases = np.angle(np.diag(build_lambda_block([math.pi / 4, 3 * math.pi / 4])))
    np.testing.assert_allclose(phases, [0, -1, 1, 0], atol=1e-15)


def test_lambda_singularity_guard():
    with pytest.raises(SingularityError) as info:
        build_lambda_block([1.0, 0.0])
    assert info.value.index == 1
    with pytest.raises(SingularityError):
        build_lambda_block([math.pi])
    clamped = lambda_angles([0.0, 1e-9, -1e-9], strict=False)
    assert np.all(np.abs(clamped) <= 1 / math.tan(1e-6))


# --- parameterized QFT --------------------------------------------------------


def test_qft_single_qubit_is_hadamard():
    np.testing.assert_allclose(build_param_qft([], 1), H, atol=1e-15)
    np.testing.assert_allclose(build_param_qft([], 1), dft_matrix(2), atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_qft_standard_angles_give_dft(n):
    assert np.linalg.norm(build_param_qft(standard_qft_angles(n), n) - dft_matrix(2**n)) <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_qft_negated_angles_give_adjoint(n):
    f = dft_matrix(2**n)
    np.testing.assert_allclose(f.conj(), f.conj().T, atol=1e-15)
    assert np.linalg.norm(build_param_qft(-standard_qft_angles(n), n) - f.conj().T) <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_qft_against_oracle(n):
    theta = np.random.default_rng(7 * n).uniform(-3, 3, n * (n - 1) // 2)
    np.testing.assert_allclose(build_param_qft(theta, n), oracle_unitary(qft_gates(n), theta, n), atol=1e-13)


# --- assembled circuit ---------------------------------------------------------


def test_assemble_block_identity():
    for n in (1, 2, 3):
        np.testing.assert_allclose(assemble_u(block_identity(n)), np.eye(2**n), atol=1e-15)
        np.testing.assert_allclose(reconstruct_generator(block_identity(n)), 0, atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_assemble_against_blockwise_product(n):
    p = rand_params(n, 11 + n)
    pb = build_p_block(p.theta_p, n)
    db = build_d_block(p.theta_d)
    fb = build_param_qft(p.theta_f, n)
    lb = build_lambda_block(p.theta_lambda)
    dag = lambda m: m.conj().T  # noqa: E731
    expected = dag(pb) @ dag(db) @ dag(fb) @ lb @ fb @ db @ pb
    np.testing.assert_allclose(assemble_u(p), expected, atol=1e-13)


def test_warm_start_reproduces_expg():
    assert np.linalg.norm(assemble_u(warm_start(2)) - expm_pade(build_g(2))) <= 1e-6
    assert np.linalg.norm(reconstruct_generator(warm_start(2)) - build_g(2)) <= 1e-6


def test_warm_start_losses():
    assert loss_antisym(warm_start(1), build_g(1).real) <= 1e-10
    assert loss_antisym(warm_start(2), build_g(2).real) <= 1e-6
    warm = loss_antisym(warm_start(3), build_g(3).real)
    random_losses = [loss_antisym(rand_params(3, s), build_g(3).real) for s in range(20)]
    assert 0 < warm <= np.median(random_losses)


def test_param_vector_roundtrip_and_layout():
    p = rand_params(3, 5)
    q = ParamVector.from_flat(3, p.flat())
    np.testing.assert_array_equal(p.flat(), q.flat())
    assert ParamVector.from_dict(p.to_dict()).flat().tolist() == p.flat().tolist()
    with pytest.raises(LayoutError):
        ParamVector(2, np.zeros(4), np.zeros(2), np.zeros(1), np.ones(2))
    with pytest.raises(LayoutError):
        ParamVector.from_flat(2, np.zeros(9))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 3), st.integers(0, 2**64 - 1))
def test_structural_invariants(n, seed):
    p = rand_params(n, seed)
    u = assemble_u(p)
    a = reconstruct_generator(p)
    big = 2**n
    assert np.linalg.norm(u.conj().T @ u - np.eye(big)) <= 1e-12
    assert np.linalg.norm(a + a.conj().T) <= 1e-12
    assert abs(np.trace(a)) <= 1e-12
    assert np.linalg.norm(expm_pade(a) - u) <= 1e-9


def test_diagonal_scaling_matches_dense_product():
    # numpy's complex kernels differ in the last bit between elementwise and
    # matmul paths, so the comparison is at a few ulp rather than bit-exact.
    p = rand_params(3, 3)
    w = eigenbasis(p)
    d = np.exp(1j * kron_rz_phases(p.theta_d))
    for scaled, dense in ((d[:, None] * w, np.diag(d) @ w), (w * d[None, :], w @ np.diag(d))):
        assert np.max(np.abs(scaled - dense)) <= 4 * np.finfo(float).eps * np.max(np.abs(dense))


def test_apply_gates_in_place_order():
    # gate list order is circuit order: later gates multiply from the left
    gates = (GateOp(GateKind.RY, 0, param_slot=0), GateOp(GateKind.HADAMARD, 0))
    m = apply_gates(np.eye(2, dtype=complex), gates, [0.4], 1)
    np.testing.assert_allclose(m, H @ ry(0.4), atol=1e-15)
