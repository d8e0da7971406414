"""Constant-coefficient elliptic symbol L(ξ) = Σ aᵢⱼ ξᵢ ξⱼ and its propagator phase.

The coefficient matrix a must be real symmetric positive definite, so that
M₁|ξ|² ≤ L(ξ) ≤ M₂|ξ|² with M₁, M₂ the extreme eigenvalues of a.  The free
evolution multiplies each Fourier mode by exp(-i t L(ξ)): plugging a plane
wave exp(i(ξ·x - L(ξ)t)) into i∂ₜu + Lu = 0 cancels exactly, which the test
suite checks by a finite-difference residual.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatchError, NotEllipticError, NotSymmetricError

SYMMETRY_TOL = 1e-12
ELLIPTICITY_FLOOR = 1e-12
_JACOBI_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 100


class EllipticSymbol:
    """Validated quadratic form: coefficients plus its ellipticity bounds."""

    __slots__ = ("a", "m1", "m2")

    def __init__(self, a: np.ndarray, m1: float, m2: float):
        self.a = a
        self.m1 = m1
        self.m2 = m2

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def __repr__(self):
        return f"EllipticSymbol(n={self.n}, m1={self.m1:.6g}, m2={self.m2:.6g})"


def _eigenvalues_symmetric(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of a small real symmetric matrix, ascending.

    Closed form for n ≤ 2; cyclic Jacobi sweeps otherwise.  Adequate for the
    spatial dimensions this package targets.
    """
    n = a.shape[0]
    if n == 1:
        return np.array([a[0, 0]])
    if n == 2:
        half_tr = 0.5 * (a[0, 0] + a[1, 1])
        disc = math.hypot(0.5 * (a[0, 0] - a[1, 1]), a[0, 1])
        return np.array([half_tr - disc, half_tr + disc])

    m = a.astype(float).copy()
    scale = np.linalg.norm(m)
    if scale == 0.0:
        return np.zeros(n)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = math.sqrt(sum(m[p, q] ** 2 for p in range(n) for q in range(n) if p != q))
        if off <= _JACOBI_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(m[p, q]) <= _JACOBI_TOL * scale / n:
                    continue
                tau = (m[q, q] - m[p, p]) / (2.0 * m[p, q])
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                m = rot.T @ m @ rot
    return np.sort(np.diag(m))


def validate_symbol(a) -> EllipticSymbol:
    """Check symmetry and positivity of the coefficient matrix.

    Accepts anything convertible to a square real matrix.  Asymmetry beyond
    1e-12 (absolute) raises NotSymmetricError; a smallest eigenvalue at or
    below 1e-12 raises NotEllipticError.  The stored matrix is symmetrized so
    aᵢⱼ = aⱼᵢ holds exactly afterwards.
    """
    arr = np.asarray(a)
    if np.iscomplexobj(arr):
        if np.any(arr.imag != 0.0):
            raise NotSymmetricError("coefficient matrix must be real")
        arr = arr.real
    arr = np.asarray(arr, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise NotSymmetricError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NotSymmetricError("coefficient matrix entries must be finite")
    asym = np.max(np.abs(arr - arr.T))
    if asym > SYMMETRY_TOL:
        raise NotSymmetricError(f"asymmetry {asym:.3e} exceeds {SYMMETRY_TOL:.0e}")
    sym = 0.5 * (arr + arr.T)
    sym.flags.writeable = False
    eigs = _eigenvalues_symmetric(sym)
    if eigs[0] <= ELLIPTICITY_FLOOR:
        raise NotEllipticError(
            f"smallest eigenvalue {eigs[0]:.3e} is at or below {ELLIPTICITY_FLOOR:.0e}"
        )
    return EllipticSymbol(sym, float(eigs[0]), float(eigs[-1]))


def eval_symbol(sym: EllipticSymbol, xi) -> float:
    """Quadratic form L(ξ) = Σ aᵢⱼ ξᵢ ξⱼ at a single frequency vector."""
    v = np.asarray(xi, dtype=float)
    if v.shape != (sym.n,):
        raise DimensionMismatchError(f"expected frequency of length {sym.n}, got shape {v.shape}")
    return float(v @ sym.a @ v)


def propagator_multiplier(sym: EllipticSymbol, t: float, xi) -> complex:
    """Unimodular phase exp(-i t L(ξ)) of the free evolution."""
    if not math.isfinite(t):
        raise ValueError("time must be finite")
    return complex(np.exp(-1j * t * eval_symbol(sym, xi)))
