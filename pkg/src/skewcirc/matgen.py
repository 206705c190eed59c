"""Random antisymmetric test matrices, sign patterns and signed permutations."""

import enum
import graphlib
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, SizeError
from .linalg import check_antisym
from .rng import SplitMix64
from .spectral import MAX_QUBITS

MAX_CANONICAL_DIM = 8


class Family(enum.Enum):
    PM1_DENSE = "PM1_DENSE"
    PM1_SPARSE = "PM1_SPARSE"
    UNIFORM_REAL = "UNIFORM_REAL"


@dataclass(frozen=True)
class MatrixFamily:
    tag: Family = Family.UNIFORM_REAL
    sparsity: float = 1.0 / 3.0

    def __post_init__(self):
        object.__setattr__(self, "tag", Family(self.tag))
        # sparsity 1 is allowed: it yields the all-zero pattern
        if not 0.0 <= self.sparsity <= 1.0:
            raise ValueError(f"sparsity must lie in [0, 1], got {self.sparsity}")

    def draw(self, rng):
        u = rng.random()
        if self.tag is Family.UNIFORM_REAL:
            return 2.0 * u - 1.0
        if self.tag is Family.PM1_DENSE:
            return 1.0 if u < 0.5 else -1.0
        if u < self.sparsity:
            return 0.0
        return 1.0 if (u - self.sparsity) / (1.0 - self.sparsity) < 0.5 else -1.0


def random_antisym(n_qubits, family, seed=0):
    """Antisymmetric 2^n matrix; the upper triangle is drawn row by row from SplitMix64."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise SizeError(f"n_qubits must lie in [1, {MAX_QUBITS}]")
    if not isinstance(family, MatrixFamily):
        family = MatrixFamily(family)
    n = 2**n_qubits
    rng = SplitMix64(seed)
    a = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            v = family.draw(rng)
            a[i, j] = v
            a[j, i] = -v
    return a + 0.0  # normalize -0.0 entries


def sign_matrix(a):
    return np.sign(check_antisym(a)) + 0.0


def check_signed_perm(p):
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise DimensionError(f"signed permutation must be square, got {p.shape}")
    nz = p != 0
    if not (np.all(np.isin(p, (-1.0, 0.0, 1.0))) and np.all(nz.sum(0) == 1) and np.all(nz.sum(1) == 1)):
        raise ValueError("not a signed permutation matrix")
    return p


def signed_perm_matrix(perm, signs):
    """Matrix with ``P[perm[j], j] = signs[j]``."""
    n = len(perm)
    p = np.zeros((n, n))
    p[list(perm), np.arange(n)] = signs
    return p


def random_signed_perm(n, seed=0):
    rng = SplitMix64(seed)
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    signs = [1.0 if rng.random() < 0.5 else -1.0 for _ in range(n)]
    return signed_perm_matrix(perm, signs)


def apply_signed_perm(b, p):
    """``P^T B P``."""
    b = np.asarray(b, dtype=np.float64)
    p = check_signed_perm(p)
    if b.shape != p.shape:
        raise DimensionError(f"shape mismatch: {b.shape} vs {p.shape}")
    return p.T @ b @ p


def _check_sign_pattern(b):
    b = check_antisym(b)
    if not np.all(np.isin(b, (-1.0, 0.0, 1.0))):
        raise ValueError("expected a sign pattern with entries in {-1, 0, +1}")
    return b


def is_transitive(b):
    """True iff the edges i -> j with b[i, j] = +1 admit a topological order."""
    b = _check_sign_pattern(b)
    n = b.shape[0]
    ts = graphlib.TopologicalSorter({j: set(np.flatnonzero(b[:, j] > 0).tolist()) for j in range(n)})
    try:
        ts.prepare()
    except graphlib.CycleError:
        return False
    return True


def find_canonical_perm(b):
    """Search for a signed permutation P with ``P^T B P = G``.

    Candidates are ordered by permutation (lexicographic in ``perm`` where
    ``P[perm[j], j] = s_j``), then by signs with +1 before -1. Fixing ``perm``
    and ``s_0`` determines every other sign (``s_k = s_0 * B[perm[0], perm[k]]``),
    so the search only branches over permutations and prunes on partial
    prefixes. Returns None when no such P exists.

    Not every dense sign pattern is switching-equivalent to G: already at
    N = 4 a quarter of the tournaments have no canonical form.
    """
    b = _check_sign_pattern(b)
    n = b.shape[0]
    if n > MAX_CANONICAL_DIM:
        raise SizeError(
            f"exhaustive canonicalization is limited to N <= {MAX_CANONICAL_DIM}; "
            "use the variational P block for larger matrices"
        )
    if np.any((b == 0) & ~np.eye(n, dtype=bool)):
        return None

    perm = []
    signs = []
    used = [False] * n

    def extend():
        k = len(perm)
        if k == n:
            return True
        for v in range(n):
            if used[v]:
                continue
            s = 1.0 if k == 0 else signs[0] * b[perm[0], v]
            if all(signs[j] * s * b[perm[j], v] == 1.0 for j in range(k)):
                perm.append(v)
                signs.append(s)
                used[v] = True
                if extend():
                    return True
                perm.pop()
                signs.pop()
                used[v] = False
        return False

    if not extend():
        return None
    return signed_perm_matrix(perm, signs)
