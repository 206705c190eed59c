import math

import numpy as np
import pytest

from skewcirc.circuit import ParamVector, assemble_u, block_identity, warm_start
from skewcirc.errors import DimensionError, NotUnitaryError, NumericError
from skewcirc.matgen import Family, MatrixFamily, random_antisym
from skewcirc.optimize import (
    LossMode,
    OptConfig,
    antisym_objective,
    finite_diff_grad,
    loss_antisym,
    loss_unitary,
    minimize,
    seeded_start,
    unitary_distance,
    unitary_objective,
)
from skewcirc.spectral import build_g

from .conftest import SMALL_A

G4 = build_g(2).real


def negated_warm_start(n):
    p = warm_start(n)
    return ParamVector(n, p.theta_p, p.theta_d, p.theta_f, math.pi - p.theta_lambda)


def test_loss_antisym_examples():
    assert loss_antisym(warm_start(2), G4) <= 1e-6
    assert loss_antisym(block_identity(2), G4) == pytest.approx(math.sqrt(12), abs=1e-12)
    assert loss_antisym(negated_warm_start(2), G4) == pytest.approx(2 * math.sqrt(12), abs=1e-12)


def test_loss_antisym_dimension_mismatch():
    with pytest.raises(DimensionError):
        loss_antisym(warm_start(2), build_g(3).real)


def test_loss_antisym_zero_iff_equal():
    p = seeded_start(2, 4)
    from skewcirc.circuit import reconstruct_generator

    a = reconstruct_generator(p)
    assert loss_antisym(p, a) == 0.0
    assert loss_antisym(p, a + 1e-6 * np.eye(4)) > 0


def test_loss_unitary_exact_match():
    p = seeded_start(2, 1)
    u = assemble_u(p)
    for mode in LossMode:
        assert loss_unitary(p, u, mode) <= 1e-14


@pytest.mark.parametrize("alpha", [math.pi / 3, 1.0])
def test_fidelity_global_phase_invariance(alpha):
    p = seeded_start(2, 2)
    u = assemble_u(p)
    assert loss_unitary(p, np.exp(1j * alpha) * u, LossMode.FIDELITY) <= 1e-14
    other = assemble_u(seeded_start(2, 3))
    base = loss_unitary(p, other, LossMode.FIDELITY)
    assert loss_unitary(p, np.exp(1j * alpha) * other, LossMode.FIDELITY) == pytest.approx(base, abs=1e-14)


def test_unitary_distance_identity_vs_minus_identity():
    i4 = np.eye(4)
    assert unitary_distance(i4, -i4, LossMode.FROBENIUS) == pytest.approx(4.0)
    # |tr(I^dag (-I))| / 4 = 1: -I is I up to the global phase e^{i pi}
    assert unitary_distance(i4, -i4, LossMode.FIDELITY) == pytest.approx(0.0)


def test_loss_unitary_rejects_non_unitary():
    with pytest.raises(NotUnitaryError):
        loss_unitary(warm_start(2), 2 * np.eye(4))


def test_finite_diff_constant_and_quadratic():
    np.testing.assert_array_equal(finite_diff_grad(lambda x: 3.0, np.zeros(4), 1e-6), np.zeros(4))
    g = finite_diff_grad(lambda x: x[0] ** 2, np.array([0.3]), 1e-6)
    assert g[0] == pytest.approx(0.6, abs=1e-6)
    with pytest.raises(ValueError):
        finite_diff_grad(lambda x: 0.0, np.zeros(1), 0.0)


@pytest.mark.parametrize("seed", range(5))
def test_finite_diff_is_descent_direction(seed):
    a = random_antisym(2, MatrixFamily(Family.UNIFORM_REAL), seed)
    loss = antisym_objective(a)
    p = seeded_start(2, 100 + seed)
    g = finite_diff_grad(loss, p, 1e-6)
    moved = ParamVector.from_flat(2, p.flat() - 1e-4 * g)
    assert loss(moved) <= loss(p) + 1e-10


def test_minimize_from_warm_start():
    trace = minimize(antisym_objective(G4), warm_start(2), OptConfig())
    assert trace.converged
    assert len(trace.losses) - 1 <= 5
    assert trace.final_loss <= 1e-6


def test_minimize_small_target_random_start():
    trace = minimize(antisym_objective(SMALL_A), seeded_start(2, 0), OptConfig(seed=0))
    assert trace.final_loss <= 0.05
    assert trace.restarts_used <= 3


def test_minimize_quadratic():
    cfg = OptConfig(max_restarts=0)
    trace = minimize(lambda x: (x[0] - 1.25) ** 2, np.array([-0.5]), cfg)
    assert abs(trace.final_params[0] - 1.25) <= 1e-8
    assert len(trace.losses) - 1 <= 20


def test_minimize_rosenbrock():
    rosen = lambda x: (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2  # noqa: E731
    trace = minimize(rosen, np.array([-1.2, 1.0]), OptConfig(max_iters=2000, loss_tol=0.0, max_restarts=0))
    np.testing.assert_allclose(trace.final_params, [1.0, 1.0], atol=1e-4)


def test_trace_invariants_and_determinism():
    a = random_antisym(2, MatrixFamily(Family.PM1_DENSE), 9)
    cfg = OptConfig(seed=9, max_iters=60)
    t1 = minimize(antisym_objective(a), seeded_start(2, 9), cfg)
    t2 = minimize(antisym_objective(a), seeded_start(2, 9), cfg)
    assert t1.losses == t2.losses
    assert t1.history == t2.history
    np.testing.assert_array_equal(t1.final_params.flat(), t2.final_params.flat())
    for losses in t1.history:
        assert losses
        assert all(b <= a_ for a_, b in zip(losses, losses[1:]))
    assert t1.losses[-1] == min(t1.losses)
    assert t1.losses == t1.history[t1.best_restart]


def test_restarts_keep_best_run():
    # an unreachable threshold forces every restart to run
    a = random_antisym(2, MatrixFamily(Family.UNIFORM_REAL), 2)
    trace = minimize(antisym_objective(a), seeded_start(2, 2), OptConfig(max_restarts=2, success_threshold=0.0, max_iters=30))
    assert trace.restarts_used == 2
    assert len(trace.history) == 3
    assert trace.final_loss == min(h[-1] for h in trace.history)
    assert not trace.converged or trace.final_loss == 0.0


def test_nan_loss_aborts():
    with pytest.raises(NumericError, match="parameters"):
        minimize(lambda x: float("nan"), np.zeros(2))


def test_representable_targets_from_random_seeds():
    for n in (1, 2):
        g = build_g(n).real
        hits = 0
        for seed in range(10):
            cfg = OptConfig(seed=seed, max_restarts=0)
            hits += minimize(antisym_objective(g), seeded_start(n, seed), cfg).final_loss <= 1e-4
        assert hits >= 8, (n, hits)


def test_unitary_objective_fidelity_descends():
    from .conftest import ROUNDED_U

    u, _, vh = np.linalg.svd(ROUNDED_U)
    target = u @ vh
    trace = minimize(unitary_objective(target, LossMode.FIDELITY), seeded_start(2, 0), OptConfig())
    assert trace.final_loss <= 0.5 * trace.losses[0]


def test_optconfig_validation():
    with pytest.raises(ValueError):
        OptConfig(max_iters=0)
    with pytest.raises(ValueError):
        OptConfig(grad_step=0)
    with pytest.raises(ValueError):
        OptConfig(seed=-1)
