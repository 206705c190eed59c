"""Parameterized circuit ``U = P^T D^dag F^dag Lambda F D P`` as dense matrices.

Qubit 0 is the most significant bit of a basis index. Every block is
described by a list of :class:`GateOp` and built by applying those gates to
the rows of a dense matrix, which keeps the cost at O(N^2) per gate.
"""

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import LayoutError, SingularityError, SizeError
from .rng import SplitMix64
from .spectral import MAX_QUBITS

SIN_GUARD = 1e-6
COT_LIMIT = 1.0 / math.tan(SIN_GUARD)


class GateKind(enum.Enum):
    HADAMARD = "HADAMARD"
    RY = "RY"
    CRY = "CRY"
    RZ = "RZ"
    CPHASE = "CPHASE"
    BITREV_SWAP = "BITREV-SWAP"


_PARAMETERIZED = {GateKind.RY, GateKind.CRY, GateKind.RZ, GateKind.CPHASE}
_TWO_QUBIT = {GateKind.CRY, GateKind.CPHASE, GateKind.BITREV_SWAP}


@dataclass(frozen=True)
class GateOp:
    """One gate of a block.

    For BITREV-SWAP, ``control`` holds the swap partner.
    """

    kind: GateKind
    target: int
    control: int | None = None
    param_slot: int | None = None

    def __post_init__(self):
        if self.kind in _TWO_QUBIT:
            if self.control is None or self.control == self.target:
                raise LayoutError(f"{self.kind.value} needs a distinct second qubit")
        elif self.control is not None:
            raise LayoutError(f"{self.kind.value} takes no control qubit")
        if (self.kind in _PARAMETERIZED) != (self.param_slot is not None):
            raise LayoutError(f"{self.kind.value} has the wrong parameter arity")

    def check(self, n_qubits):
        qubits = [self.target] + ([self.control] if self.control is not None else [])
        if any(not 0 <= q < n_qubits for q in qubits):
            raise LayoutError(f"{self} addresses a qubit outside [0, {n_qubits})")


def _check_n(n_qubits):
    if not isinstance(n_qubits, (int, np.integer)) or not 1 <= n_qubits <= MAX_QUBITS:
        raise SizeError(f"n_qubits must be an integer in [1, {MAX_QUBITS}], got {n_qubits!r}")
    return int(n_qubits)


# ---------------------------------------------------------------------------
# parameter layout


def p_count(n_qubits):
    n = int(n_qubits)
    if n < 1:
        raise SizeError("n_qubits must be >= 1")
    return 2 * n + n // 2 + (n - 1) // 2


def total_count(n_qubits):
    n = int(n_qubits)
    return p_count(n) + n + n * (n - 1) // 2 + n


def _block_sizes(n):
    return (p_count(n), n, n * (n - 1) // 2, n)


@dataclass(frozen=True)
class ParamVector:
    n_qubits: int
    theta_p: np.ndarray
    theta_d: np.ndarray
    theta_f: np.ndarray
    theta_lambda: np.ndarray

    def __post_init__(self):
        n = _check_n(self.n_qubits)
        for name, size in zip(("theta_p", "theta_d", "theta_f", "theta_lambda"), _block_sizes(n)):
            arr = np.asarray(getattr(self, name), dtype=np.float64).reshape(-1)
            if arr.shape[0] != size:
                raise LayoutError(f"{name} needs {size} entries for n={n}, got {arr.shape[0]}")
            object.__setattr__(self, name, arr)

    def flat(self):
        return np.concatenate([self.theta_p, self.theta_d, self.theta_f, self.theta_lambda])

    @classmethod
    def from_flat(cls, n_qubits, x):
        x = np.asarray(x, dtype=np.float64)
        sizes = _block_sizes(int(n_qubits))
        if x.shape != (sum(sizes),):
            raise LayoutError(f"expected {sum(sizes)} parameters, got shape {x.shape}")
        cuts = np.cumsum(sizes)[:-1]
        return cls(int(n_qubits), *np.split(x, cuts))

    def check_guard(self):
        """Raise SingularityError if any theta_lambda is within 1e-6 of a cot pole."""
        for i, t in enumerate(self.theta_lambda):
            if abs(math.sin(t)) < SIN_GUARD:
                raise SingularityError(i, float(t))

    def to_dict(self):
        return {
            "n_qubits": self.n_qubits,
            "theta_p": self.theta_p.tolist(),
            "theta_d": self.theta_d.tolist(),
            "theta_f": self.theta_f.tolist(),
            "theta_lambda": self.theta_lambda.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["n_qubits"], d["theta_p"], d["theta_d"], d["theta_f"], d["theta_lambda"])


def block_identity(n_qubits):
    """Parameters at which every block is the identity."""
    n = _check_n(n_qubits)
    p, d, f, lam = _block_sizes(n)
    return ParamVector(n, np.zeros(p), np.zeros(d), np.zeros(f), np.full(lam, np.pi / 2))


def random_params(n_qubits, rng):
    """Fresh random draw: angles uniform in [-pi, pi], theta_lambda in [0.15, pi - 0.15]."""
    if not isinstance(rng, SplitMix64):
        rng = SplitMix64(rng)
    n = _check_n(n_qubits)
    p, d, f, lam = _block_sizes(n)
    angles = [rng.uniform(-np.pi, np.pi) for _ in range(p + d + f)]
    lams = [rng.uniform(0.15, np.pi - 0.15) for _ in range(lam)]
    return ParamVector.from_flat(n, np.array(angles + lams))


# ---------------------------------------------------------------------------
# gate lists


@lru_cache(maxsize=None)
def p_block_gates(n_qubits):
    """RY layer, CRY on (0,1),(2,3)..., RY layer, CRY on (1,2),(3,4)..."""
    gates = []
    slot = 0
    for first in (0, 1):
        for q in range(n_qubits):
            gates.append(GateOp(GateKind.RY, q, param_slot=slot))
            slot += 1
        for c in range(first, n_qubits - 1, 2):
            gates.append(GateOp(GateKind.CRY, c + 1, control=c, param_slot=slot))
            slot += 1
    return tuple(gates)


@lru_cache(maxsize=None)
def rz_layer_gates(n_qubits):
    return tuple(GateOp(GateKind.RZ, q, param_slot=q) for q in range(n_qubits))


@lru_cache(maxsize=None)
def qft_gates(n_qubits):
    """Textbook QFT: H then controlled phases from every lower qubit, then bit reversal."""
    gates = []
    slot = 0
    for q in range(n_qubits):
        gates.append(GateOp(GateKind.HADAMARD, q))
        for c in range(q + 1, n_qubits):
            gates.append(GateOp(GateKind.CPHASE, q, control=c, param_slot=slot))
            slot += 1
    for q in range(n_qubits // 2):
        gates.append(GateOp(GateKind.BITREV_SWAP, q, control=n_qubits - 1 - q))
    return tuple(gates)


def standard_qft_angles(n_qubits):
    return np.array(
        [np.pi / 2 ** (c - q) for q in range(n_qubits) for c in range(q + 1, n_qubits)]
    )


# ---------------------------------------------------------------------------
# dense gate application


@lru_cache(maxsize=None)
def _bits(n_qubits):
    j = np.arange(2**n_qubits)
    return np.stack([(j >> (n_qubits - 1 - q)) & 1 for q in range(n_qubits)], axis=1)


@lru_cache(maxsize=None)
def _pair_rows(n_qubits, target, control):
    """Row indices (r0, r1) differing only in ``target`` bit (0 vs 1), control bit set."""
    bits = _bits(n_qubits)
    mask = bits[:, target] == 0
    if control is not None:
        mask &= bits[:, control] == 1
    r0 = np.flatnonzero(mask)
    return r0, r0 + (1 << (n_qubits - 1 - target))


@lru_cache(maxsize=None)
def _both_set(n_qubits, a, b):
    bits = _bits(n_qubits)
    return np.flatnonzero((bits[:, a] == 1) & (bits[:, b] == 1))


@lru_cache(maxsize=None)
def _sign_table(n_qubits):
    """s[j, b] = +1 if bit b of j is set, else -1."""
    return 2.0 * _bits(n_qubits) - 1.0


def _ry(phi):
    c, s = math.cos(phi / 2), math.sin(phi / 2)
    return c, -s, s, c


_H = (1 / math.sqrt(2), 1 / math.sqrt(2), 1 / math.sqrt(2), -1 / math.sqrt(2))


def _apply_2x2(mat, g, r0, r1):
    x0 = mat[r0]
    x1 = mat[r1]
    mat[r0] = g[0] * x0 + g[1] * x1
    mat[r1] = g[2] * x0 + g[3] * x1


def apply_gates(mat, gates, params, n_qubits):
    """Left-multiply ``mat`` in place by the gates in circuit order."""
    for op in gates:
        k = op.kind
        if k is GateKind.HADAMARD:
            _apply_2x2(mat, _H, *_pair_rows(n_qubits, op.target, None))
        elif k is GateKind.RY:
            _apply_2x2(mat, _ry(params[op.param_slot]), *_pair_rows(n_qubits, op.target, None))
        elif k is GateKind.CRY:
            _apply_2x2(mat, _ry(params[op.param_slot]), *_pair_rows(n_qubits, op.target, op.control))
        elif k is GateKind.CPHASE:
            rows = _both_set(n_qubits, op.target, op.control)
            mat[rows] *= np.exp(1j * params[op.param_slot])
        elif k is GateKind.RZ:
            phi = params[op.param_slot]
            r0, r1 = _pair_rows(n_qubits, op.target, None)
            mat[r0] *= np.exp(-0.5j * phi)
            mat[r1] *= np.exp(0.5j * phi)
        elif k is GateKind.BITREV_SWAP:
            # rows with (target, partner) bits (1, 0) trade places with (0, 1)
            bits = _bits(n_qubits)
            rows = np.flatnonzero((bits[:, op.target] == 1) & (bits[:, op.control] == 0))
            shift = (1 << (n_qubits - 1 - op.target)) - (1 << (n_qubits - 1 - op.control))
            mat[[*rows, *(rows - shift)]] = mat[[*(rows - shift), *rows]]
        else:  # pragma: no cover
            raise LayoutError(f"unknown gate kind {k}")
    return mat


# ---------------------------------------------------------------------------
# blocks


def build_p_block(theta_p, n_qubits):
    """Real orthogonal P block."""
    n = _check_n(n_qubits)
    theta_p = np.asarray(theta_p, dtype=np.float64)
    if theta_p.shape != (p_count(n),):
        raise LayoutError(f"theta_p needs {p_count(n)} entries for n={n}, got {theta_p.shape}")
    return apply_gates(np.eye(2**n), p_block_gates(n), theta_p, n)


def kron_rz_phases(angles):
    """Phases psi_j of RZ(a_0) (x) ... (x) RZ(a_{n-1}); the block is diag(exp(1j*psi))."""
    angles = np.asarray(angles, dtype=np.float64).reshape(-1)
    return _sign_table(angles.shape[0]) @ angles / 2.0


def build_kron_rz(angles):
    return np.diag(np.exp(1j * kron_rz_phases(angles)))


def build_d_block(theta_d):
    return build_kron_rz(theta_d)


def lambda_angles(theta_lambda, strict=True):
    """Gate angles ``cot(theta)`` of the Lambda block, clamped to +-cot(1e-6)."""
    theta_lambda = np.asarray(theta_lambda, dtype=np.float64).reshape(-1)
    if strict:
        for i, t in enumerate(theta_lambda):
            if abs(math.sin(t)) < SIN_GUARD:
                raise SingularityError(i, float(t))
    with np.errstate(divide="ignore"):
        cot = np.cos(theta_lambda) / np.sin(theta_lambda)
    return np.clip(np.nan_to_num(cot, posinf=COT_LIMIT, neginf=-COT_LIMIT), -COT_LIMIT, COT_LIMIT)


def build_lambda_block(theta_lambda, strict=True):
    return build_kron_rz(lambda_angles(theta_lambda, strict))


def build_param_qft(theta_f, n_qubits):
    n = _check_n(n_qubits)
    theta_f = np.asarray(theta_f, dtype=np.float64)
    if theta_f.shape != (n * (n - 1) // 2,):
        raise LayoutError(f"theta_f needs {n * (n - 1) // 2} entries for n={n}, got {theta_f.shape}")
    return apply_gates(np.eye(2**n, dtype=np.complex128), qft_gates(n), theta_f, n)


def eigenbasis(params):
    """``W = F(theta_F) D(theta_D) P(theta_P)``; U = W^dag Lambda W."""
    n = params.n_qubits
    w = build_p_block(params.theta_p, n).astype(np.complex128)
    w *= np.exp(1j * kron_rz_phases(params.theta_d))[:, None]
    return apply_gates(w, qft_gates(n), params.theta_f, n)


def assemble_u(params, strict=True):
    w = eigenbasis(params)
    lam = np.exp(1j * kron_rz_phases(lambda_angles(params.theta_lambda, strict)))
    return w.conj().T @ (lam[:, None] * w)


def reconstruct_generator(params, strict=True):
    """Analytic logarithm ``W^dag diag(1j*psi) W`` of the assembled circuit."""
    w = eigenbasis(params)
    psi = kron_rz_phases(lambda_angles(params.theta_lambda, strict))
    return w.conj().T @ ((1j * psi)[:, None] * w)


def warm_start(n_qubits):
    """Parameters reproducing e^G exactly for n <= 2 and by least squares above."""
    n = _check_n(n_qubits)
    big_n = 2**n
    theta_d = np.array([-(2 ** (n - 1 - b)) * np.pi / big_n for b in range(n)])
    theta_f = -standard_qft_angles(n)
    k = np.arange(big_n)
    targets = 1.0 / np.tan((2 * k + 1) * np.pi / (2 * big_n))
    x, *_ = np.linalg.lstsq(_sign_table(n) / 2.0, targets, rcond=None)
    theta_lambda = np.pi / 2 - np.arctan(x)
    return ParamVector(n, np.zeros(p_count(n)), theta_d, theta_f, theta_lambda)
