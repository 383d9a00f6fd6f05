"""Numerical kernels: panel Gauss-Legendre quadrature, vectorised bisection,
log-log regression and a small dense eigenvalue solver."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DegenerateFit, EigenFailure, QuadratureFailure

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration window and accuracy targets for :func:`integrate`.

    ``oscillation_scale`` is the shortest oscillation period of the integrand
    in k; the initial uniform partition places ``panels_per_period`` panels
    inside one such period.
    """

    k_max: float
    oscillation_scale: float
    k_min: float = 1e-8
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    panels_per_period: int = 8
    max_levels: int = 18

    def __post_init__(self):
        if not self.k_min < self.k_max:
            raise ValueError(f"k_min={self.k_min} must be below k_max={self.k_max}")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.oscillation_scale <= 0:
            raise ValueError("oscillation_scale must be positive")
        if self.panels_per_period < 8:
            raise ValueError("need at least 8 panels per oscillation period")


class QuadResult(NamedTuple):
    value: float
    error: float


def _gl_panels(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid[:, None] + half[:, None] * _GL_NODES
    vals = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    return half * (vals @ _GL_WEIGHTS)


def integrate(f: Callable[[np.ndarray], np.ndarray], spec: QuadratureSpec) -> QuadResult:
    """Composite 15-point Gauss-Legendre integral of ``f`` over [k_min, k_max].

    ``f`` must accept and return 1-D float arrays. Each panel is compared with
    the sum over its two halves; panels whose difference exceeds their share
    of the tolerance are bisected, at most ``spec.max_levels`` times.
    """
    width = spec.k_max - spec.k_min
    panel = spec.oscillation_scale / spec.panels_per_period
    n = max(1, math.ceil(width / panel))
    edges = np.linspace(spec.k_min, spec.k_max, n + 1)
    a, b = edges[:-1], edges[1:]
    whole = _gl_panels(f, a, b)

    values, errors = [], []
    tol = None
    for _ in range(spec.max_levels + 1):
        mid = 0.5 * (a + b)
        left = _gl_panels(f, a, mid)
        right = _gl_panels(f, mid, b)
        halves = left + right
        err = np.abs(halves - whole)
        if tol is None:
            tol = max(spec.rel_tol * abs(np.sum(halves)), spec.abs_tol)
        budget = tol * (b - a) / width
        # roundoff floor so panels already at machine precision are not split forever
        floor = 64 * _EPS * (np.abs(left) + np.abs(right))
        ok = err <= np.maximum(budget, floor)
        values.append(halves[ok])
        errors.append(err[ok])
        if ok.all():
            break
        bad = ~ok
        a, b = np.concatenate([a[bad], mid[bad]]), np.concatenate([mid[bad], b[bad]])
        whole = np.concatenate([left[bad], right[bad]])
    else:
        raise QuadratureFailure(
            f"{a.size} panels unconverged after {spec.max_levels} refinement levels"
        )

    value = float(np.sum(np.concatenate(values)))
    error = float(np.sum(np.concatenate(errors)))
    if error > max(spec.rel_tol * abs(value), spec.abs_tol, tol):
        raise QuadratureFailure(f"error estimate {error:.3e} exceeds tolerance for value {value:.6e}")
    return QuadResult(value, error)


def bisect_increasing(f, target, lo, hi, rtol=1e-12, max_iter=200):
    """Solve ``f(x) = target`` for increasing ``f`` on brackets ``[lo, hi]``.

    All arguments broadcast; iteration stops once every bracket is narrower
    than ``rtol * hi`` (or has collapsed to adjacent floats).
    """
    target, lo, hi = np.broadcast_arrays(
        np.asarray(target, float), np.asarray(lo, float), np.asarray(hi, float)
    )
    lo, hi = lo.copy(), hi.copy()
    for _ in range(max_iter):
        width = hi - lo
        if np.all(width <= rtol * np.abs(hi) + 4 * _EPS * np.abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        below = f(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


class LogLogFit(NamedTuple):
    slope: float
    intercept: float
    residual: float


def fit_loglog(xs, ys) -> LogLogFit:
    """Least-squares line through (log x, log y); residual is the RMS log misfit."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise DegenerateFit("xs and ys must be 1-D arrays of equal length")
    if xs.size < 8:
        raise DegenerateFit(f"need at least 8 points, got {xs.size}")
    if np.any(xs <= 0) or np.any(ys <= 0) or not np.all(np.isfinite(ys)):
        raise DegenerateFit("log-log fit requires strictly positive finite data")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return LogLogFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))))


def hessenberg(m) -> np.ndarray:
    """Unitary similarity reduction to upper Hessenberg form (Householder)."""
    h = np.array(m, dtype=complex)
    n = h.shape[0]
    for j in range(n - 2):
        x = h[j + 1 :, j].copy()
        nx = np.linalg.norm(x)
        if nx == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * nx
        v /= np.linalg.norm(v)
        h[j + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ h[j + 1 :, :])
        h[:, j + 1 :] -= 2.0 * np.outer(h[:, j + 1 :] @ v, v.conj())
        h[j + 2 :, j] = 0.0
    return h


def _wilkinson(a, b, c, d):
    half_tr = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c)
    mu1, mu2 = half_tr + disc, half_tr - disc
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def _qr_step(h, shift):
    """One shifted QR sweep on a Hessenberg block, in place, via Givens rotations."""
    n = h.shape[0]
    idx = np.arange(n)
    h[idx, idx] -= shift
    rots = []
    for k in range(n - 1):
        x, y = h[k, k], h[k + 1, k]
        r = math.hypot(abs(x), abs(y))
        if r == 0.0:
            c, s = 1.0, 0.0
        else:
            c, s = x / r, y / r
        rows = h[k : k + 2, k:].copy()
        h[k, k:] = np.conj(c) * rows[0] + np.conj(s) * rows[1]
        h[k + 1, k:] = -s * rows[0] + c * rows[1]
        rots.append((c, s))
    for k, (c, s) in enumerate(rots):
        cols = h[: k + 2, k : k + 2].copy()
        h[: k + 2, k] = c * cols[:, 0] + s * cols[:, 1]
        h[: k + 2, k + 1] = -np.conj(s) * cols[:, 0] + np.conj(c) * cols[:, 1]
    h[idx, idx] += shift


def eig4(m, max_iter: int = 200, check_tol: float = 1e-8) -> np.ndarray:
    """Eigenvalues of a small dense complex matrix (Hessenberg + shifted QR).

    Written for the 4x4 case but valid for any square size. Raises
    :class:`EigenFailure` when iterations run out or when some eigenvalue
    leaves ``|det(m - lam I)| / ||m||^n`` above ``check_tol``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("eig4 needs a square matrix")
    if not np.all(np.isfinite(m)):
        raise EigenFailure("matrix has non-finite entries")
    n = m.shape[0]
    scale = np.linalg.norm(m)
    if scale == 0.0:
        return np.zeros(n, dtype=complex)

    h = hessenberg(m / scale)
    eigs = np.empty(n, dtype=complex)
    hi = n - 1
    its = total = 0
    while hi >= 0:
        if hi == 0:
            eigs[0] = h[0, 0]
            break
        l = hi
        while l > 0:
            s = abs(h[l, l]) + abs(h[l - 1, l - 1])
            if s == 0.0:
                s = 1.0
            if abs(h[l, l - 1]) <= _EPS * s:
                h[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            eigs[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        total += 1
        its += 1
        if total > max_iter:
            raise EigenFailure(f"shifted QR did not converge in {max_iter} iterations")
        if its % 10 == 0:
            shift = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            shift = _wilkinson(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        block = h[l : hi + 1, l : hi + 1]
        _qr_step(block, shift)
        h[l : hi + 1, l : hi + 1] = block

    eigs *= scale
    resid = eig_residual(m, eigs)
    if resid > check_tol:
        raise EigenFailure(f"eigenvalue residual {resid:.2e} exceeds {check_tol:.0e}")
    return eigs


def eig_residual(m, eigs) -> float:
    """Largest ``|det(m - lam I)| / ||m||_F^n`` over the supplied eigenvalues."""
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    scale = np.linalg.norm(m)
    if scale == 0.0:
        return float(np.max(np.abs(eigs))) if len(eigs) else 0.0
    eye = np.eye(n)
    return max(abs(np.linalg.det((m - lam * eye) / scale)) for lam in eigs)
