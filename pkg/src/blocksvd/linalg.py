"""Dense complex linear algebra for small square blocks.

Blocks at level l have side O(l^{d-1}) and stay tiny at desk scale, so
everything here is dense.  Sides 1 and 2 (the whole 1-d torus case) use
closed forms; larger sides go through LAPACK.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import SingularMatrixError

__all__ = ["spectral_norm", "invert", "inverse_norm", "singular_values"]

# A pivot (smallest singular value) below this fraction of the largest
# entry magnitude counts as numerically singular.
REL_SINGULAR_TOL = 1e-14


def _as_square(M) -> np.ndarray:
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def _sv_extremes_2x2(M: np.ndarray) -> tuple[float, float]:
    """(sigma_max, sigma_min) of a 2x2 via the Gram matrix closed form.

    sigma_min comes from |det M| / sigma_max, which avoids the
    cancellation of the direct (tr - disc)/2 branch near singularity.
    """
    a, b = M[0, 0], M[0, 1]
    c, d = M[1, 0], M[1, 1]
    g11 = (a.real * a.real + a.imag * a.imag) + (c.real * c.real + c.imag * c.imag)
    g22 = (b.real * b.real + b.imag * b.imag) + (d.real * d.real + d.imag * d.imag)
    g12 = a.conjugate() * b + c.conjugate() * d
    disc = math.hypot(g11 - g22, 2.0 * abs(g12))
    smax_sq = 0.5 * (g11 + g22 + disc)
    smax = math.sqrt(smax_sq)
    det = abs(a * d - b * c)
    smin = det / smax if smax > 0.0 else 0.0
    return smax, smin


def singular_values(M) -> np.ndarray:
    """All singular values, descending."""
    arr = _as_square(M)
    n = arr.shape[0]
    if n == 1:
        return np.array([abs(arr[0, 0])])
    if n == 2:
        smax, smin = _sv_extremes_2x2(arr)
        return np.array([smax, smin])
    return np.linalg.svd(arr, compute_uv=False)


def spectral_norm(M) -> float:
    """Largest singular value (operator norm)."""
    arr = _as_square(M)
    n = arr.shape[0]
    if n == 1:
        return abs(arr[0, 0])
    if n == 2:
        return _sv_extremes_2x2(arr)[0]
    return float(np.linalg.svd(arr, compute_uv=False)[0])


def invert(M) -> np.ndarray:
    """Matrix inverse; raises SingularMatrixError when numerically singular."""
    arr = _as_square(M)
    n = arr.shape[0]
    scale = float(np.max(np.abs(arr))) if arr.size else 0.0
    if n == 1:
        if abs(arr[0, 0]) <= REL_SINGULAR_TOL * scale:
            raise SingularMatrixError("1x1 block is numerically singular")
        return np.array([[1.0 / arr[0, 0]]])
    if n == 2:
        _, smin = _sv_extremes_2x2(arr)
        if smin <= REL_SINGULAR_TOL * scale:
            raise SingularMatrixError("2x2 block is numerically singular")
        a, b = arr[0, 0], arr[0, 1]
        c, d = arr[1, 0], arr[1, 1]
        det = a * d - b * c
        return np.array([[d, -b], [-c, a]]) / det
    sv = np.linalg.svd(arr, compute_uv=False)
    if sv[-1] <= REL_SINGULAR_TOL * scale:
        raise SingularMatrixError(f"{n}x{n} block is numerically singular")
    return np.linalg.inv(arr)


def inverse_norm(M) -> float:
    """Operator norm of the inverse, i.e. 1 / sigma_min.

    Raises SingularMatrixError on numerically singular input; callers
    gating block inversions treat that as an infinite inverse norm.
    """
    arr = _as_square(M)
    sv = singular_values(arr)
    smin = float(sv[-1])
    scale = float(np.max(np.abs(arr))) if arr.size else 0.0
    if smin <= REL_SINGULAR_TOL * scale:
        raise SingularMatrixError("block is numerically singular")
    return 1.0 / smin
