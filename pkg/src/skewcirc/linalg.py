"""Dense complex linear algebra and the two reference oracles.

``expm_pade`` and ``hermitian_eig`` are deliberately self-contained: they are
used to check the closed-form spectrum and the circuit model, so neither may
lean on the code paths they verify.
"""

import math

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionError,
    NotAntisymmetricError,
    NotHermitianError,
    NumericError,
)

# Diagonal [13/13] Pade coefficients for exp.
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)

SCALE_THRESHOLD = 0.5
MAX_SWEEPS = 100


def as_complex_dense(x):
    """Validate ``x`` as a finite square matrix and return it as complex128."""
    m = np.asarray(x, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericError("matrix contains NaN or infinite entries")
    return m


def check_antisym(x, tol=0.0):
    """Return ``x`` as a real float array after checking antisymmetry.

    Raises NotAntisymmetricError naming the first (row-major) violating pair.
    The diagonal counts as the pair (i, i).
    """
    a = np.asarray(x)
    if np.iscomplexobj(a):
        if np.any(a.imag != 0):
            raise DimensionError("antisymmetric matrices must be real")
        a = a.real
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    bad = np.abs(a + a.T) > tol
    if np.any(bad):
        i, j = map(int, np.argwhere(bad)[0])
        raise NotAntisymmetricError(i, j, float(a[i, j]), float(a[j, i]))
    return a


def frobenius_distance(x, y):
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise DimensionError(f"shape mismatch: {x.shape} vs {y.shape}")
    d = x - y
    return float(np.sqrt(np.sum(d.real**2 + d.imag**2)))


def frobenius_norm(x):
    x = np.asarray(x)
    return float(np.sqrt(np.sum(np.abs(x) ** 2)))


def expm_pade(m):
    """Matrix exponential by scaling and squaring with a [13/13] Pade approximant.

    The input is scaled by 2**-s so that its 1-norm is at most 0.5, the
    rational approximant is evaluated, and the result is squared s times.
    """
    a = as_complex_dense(m)
    n = a.shape[0]
    norm1 = float(np.max(np.sum(np.abs(a), axis=0)))
    if norm1 == 0.0:
        return np.eye(n, dtype=np.complex128)
    s = 0
    if norm1 > SCALE_THRESHOLD:
        s = int(math.ceil(math.log2(norm1 / SCALE_THRESHOLD)))
    a = a / (2.0**s)

    b = _PADE13
    ident = np.eye(n, dtype=np.complex128)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    r = np.linalg.solve(v - u, v + u)

    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(s):
            r = r @ r
    if not np.all(np.isfinite(r)):
        raise NumericError(f"overflow while squaring back ({s} squarings)")
    return r


def _hermitian_defect(h):
    return frobenius_norm(h - h.conj().T)


def hermitian_eig(h, tol=1e-13, max_sweeps=MAX_SWEEPS):
    """Eigen-decompose a Hermitian matrix with cyclic complex Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and the
    eigenvectors as the columns of a unitary matrix.
    """
    a = as_complex_dense(h).copy()
    n = a.shape[0]
    scale = frobenius_norm(a)
    if _hermitian_defect(a) > 1e-12 * max(1.0, scale):
        raise NotHermitianError(f"input is not Hermitian (defect {_hermitian_defect(a):.3e})")
    # Symmetrize so rounding in the input cannot accumulate.
    a = 0.5 * (a + a.conj().T)
    w = np.eye(n, dtype=np.complex128)
    target = tol * scale
    offdiag = ~np.eye(n, dtype=bool)

    for _ in range(max_sweeps + 1):
        if frobenius_norm(a[offdiag]) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                c = a[p, q]
                r = abs(c)
                if r == 0.0 or r < 1e-300:
                    continue
                # Phase-rotate (p, q) to a real symmetric block, then a real Jacobi rotation.
                phase = c / r
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                cs = 1.0 / math.sqrt(1.0 + t * t)
                sn = t * cs
                rot = np.array([[cs, sn], [-sn * np.conj(phase), cs * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                w[:, idx] = w[:, idx] @ rot
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    else:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")

    vals = np.diag(a).real.copy()
    order = np.argsort(vals, kind="stable")
    return vals[order], w[:, order]
