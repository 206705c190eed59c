"""Losses, finite-difference gradients and a restarting L-BFGS loop."""

import enum
import math
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .circuit import ParamVector, assemble_u, random_params, reconstruct_generator
from .errors import DimensionError, NotUnitaryError, NumericError
from .linalg import as_complex_dense, frobenius_distance
from .rng import SplitMix64, derive_seed

MEMORY = 10
ARMIJO_C1 = 1e-4
MAX_BACKTRACKS = 40
UNITARY_TOL = 1e-8


class LossMode(enum.Enum):
    FROBENIUS = "frobenius"
    FIDELITY = "fidelity"


@dataclass
class OptConfig:
    max_iters: int = 500
    grad_step: float = 1e-6
    loss_tol: float = 1e-9
    max_restarts: int = 3
    success_threshold: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not self.grad_step > 0:
            raise ValueError("grad_step must be positive")
        if self.loss_tol < 0 or self.success_threshold < 0 or self.max_restarts < 0:
            raise ValueError("loss_tol, success_threshold and max_restarts must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass
class OptTrace:
    """Result of :func:`minimize`.

    ``losses`` belongs to the best restart; ``history`` keeps every restart's
    losses in the order they were run.
    """

    run_id: str
    losses: list
    final_params: object
    restarts_used: int
    converged: bool
    wall_time: float
    best_restart: int = 0
    history: list = field(default_factory=list)

    @property
    def final_loss(self):
        return self.losses[-1]


# ---------------------------------------------------------------------------
# losses


def _check_dim(params, m):
    if m.shape != (2**params.n_qubits, 2**params.n_qubits):
        raise DimensionError(
            f"target is {m.shape[0]}x{m.shape[1]} but the circuit acts on {2**params.n_qubits} states"
        )


def loss_antisym(params, target):
    """Unnormalized Frobenius distance between ``target`` and the circuit's generator."""
    target = np.asarray(target)
    _check_dim(params, target)
    return frobenius_distance(target, reconstruct_generator(params, strict=False))


def check_unitary(u, tol=UNITARY_TOL):
    u = as_complex_dense(u)
    defect = np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]))
    if defect > tol:
        raise NotUnitaryError(f"target is not unitary: |U^dag U - I|_F = {defect:.3e}")
    return u


def unitary_distance(target_u, u, mode=LossMode.FROBENIUS):
    mode = LossMode(mode)
    if mode is LossMode.FROBENIUS:
        return frobenius_distance(target_u, u)
    n = target_u.shape[0]
    return 1.0 - abs(np.vdot(target_u, u)) / n


def loss_unitary(params, target_u, mode=LossMode.FROBENIUS):
    target_u = check_unitary(target_u)
    _check_dim(params, target_u)
    return unitary_distance(target_u, assemble_u(params, strict=False), mode)


def antisym_objective(target):
    """``loss_antisym`` with the target fixed, for handing to :func:`minimize`."""
    target = np.asarray(target, dtype=np.float64)
    return lambda p: loss_antisym(p, target)


def unitary_objective(target_u, mode=LossMode.FROBENIUS):
    target_u = check_unitary(target_u)
    mode = LossMode(mode)

    def loss(p):
        _check_dim(p, target_u)
        return unitary_distance(target_u, assemble_u(p, strict=False), mode)

    return loss


# ---------------------------------------------------------------------------
# gradients


def _flat_fn(loss, template):
    if isinstance(template, ParamVector):
        n = template.n_qubits
        return lambda x: loss(ParamVector.from_flat(n, x)), template.flat()
    return loss, np.asarray(template, dtype=np.float64).reshape(-1)


def _central_diff(f, x, step):
    g = np.empty_like(x)
    xp = x.copy()
    for i in range(x.shape[0]):
        xp[i] = x[i] + step
        up = f(xp)
        xp[i] = x[i] - step
        down = f(xp)
        xp[i] = x[i]
        g[i] = (up - down) / (2.0 * step)
    return g


def finite_diff_grad(loss, params, step=1e-6):
    """Central-difference gradient over the flattened parameter vector."""
    if not step > 0:
        raise ValueError("step must be positive")
    f, x = _flat_fn(loss, params)
    return _central_diff(f, x, step)


# ---------------------------------------------------------------------------
# L-BFGS


def _two_loop(g, mem):
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(mem):
        a = rho * (s @ q)
        alphas.append(a)
        q -= a * y
    s, y, _ = mem[-1]
    q *= (s @ y) / (y @ y)
    for (s, y, rho), a in zip(mem, reversed(alphas)):
        b = rho * (y @ q)
        q += (a - b) * s
    return q


def _guarded(f):
    def wrapped(x):
        v = f(x)
        if not math.isfinite(v):
            raise NumericError(f"loss returned {v} at parameters {x.tolist()}")
        return float(v)

    return wrapped


def _lbfgs(f, x0, cfg):
    """Minimize ``f`` from ``x0``; returns (x, losses)."""
    x = x0.copy()
    fx = f(x)
    losses = [fx]
    g = _central_diff(f, x, cfg.grad_step)
    mem = deque(maxlen=MEMORY)

    for _ in range(cfg.max_iters):
        if np.max(np.abs(g)) <= 1e-14:
            break
        d = -_two_loop(g, mem) if mem else -g
        gd = g @ d
        if not gd < 0:
            mem.clear()
            d = -g
            gd = g @ d
        alpha = 1.0 if mem else min(1.0, 1.0 / np.linalg.norm(g))
        for _ in range(MAX_BACKTRACKS):
            xn = x + alpha * d
            fn = f(xn)
            if fn <= fx + ARMIJO_C1 * alpha * gd:
                break
            alpha *= 0.5
        else:
            if mem:
                mem.clear()
                continue
            break

        gn = _central_diff(f, xn, cfg.grad_step)
        s = xn - x
        y = gn - g
        sy = s @ y
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            mem.append((s, y, 1.0 / sy))
        decrease = fx - fn
        x, fx, g = xn, fn, gn
        losses.append(fx)
        if decrease <= cfg.loss_tol:
            break
    return x, losses


def seeded_start(n_qubits, seed):
    """The restart-0 draw matching :func:`minimize`'s restart seeding."""
    return random_params(n_qubits, SplitMix64(derive_seed(seed, 0)))


def minimize(loss, initial, cfg=None, run_id=""):
    """Restarting L-BFGS on ``loss`` starting from ``initial``.

    ``initial`` is a ParamVector (restarts draw fresh circuit parameters) or a
    plain vector (restarts draw uniformly from [-pi, pi]). Restart ``r`` is
    seeded with ``derive_seed(cfg.seed, r)``. The best restart is kept.
    """
    cfg = cfg or OptConfig()
    start = time.perf_counter()
    f, x0 = _flat_fn(loss, initial)
    f = _guarded(f)
    is_params = isinstance(initial, ParamVector)

    history = []
    best = None
    restart = 0
    for restart in range(cfg.max_restarts + 1):
        if restart > 0:
            rng = SplitMix64(derive_seed(cfg.seed, restart))
            if is_params:
                x0 = random_params(initial.n_qubits, rng).flat()
            else:
                x0 = np.array([rng.uniform(-np.pi, np.pi) for _ in range(x0.shape[0])])
        x, losses = _lbfgs(f, x0, cfg)
        history.append(losses)
        if best is None or losses[-1] < best[1][-1]:
            best = (x, losses, restart)
        if best[1][-1] <= cfg.success_threshold:
            break

    x, losses, best_restart = best
    final = ParamVector.from_flat(initial.n_qubits, x) if is_params else x
    return OptTrace(
        run_id=run_id,
        losses=list(losses),
        final_params=final,
        restarts_used=restart,
        converged=losses[-1] <= cfg.success_threshold,
        wall_time=time.perf_counter() - start,
        best_restart=best_restart,
        history=history,
    )
