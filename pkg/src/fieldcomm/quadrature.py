"""Oscillation-aware quadrature for semi-infinite Fourier-type integrals.

The mode integrals of this package all have the form

    int_a^inf  w(k) * F(k) * e^{iku} dk

with w(k) a power weight, F(k) a product of piecewise-linear-profile
Fourier transforms (bounded oscillation frequency, k^{-2} decay per
factor), and u a fixed light-cone offset. The scheme:

  * truncate at K where the integrand envelope has fallen below 1e-13
    of its peak (the integrands decay like k^-3 or faster),
  * split [a, K] into panels no wider than pi / (4 * max frequency),
  * integrate each panel with Gauss-Legendre, refining panels where a
    higher-order rule disagrees, until the summed discrepancy is below
    the relative tolerance,
  * add the closed-form tail of the jump representation, a combination
    of exponential integrals E_n(-iuK), as an asymptotic correction.
"""
from __future__ import annotations

import numpy as np
from scipy.special import exp1

from .errors import QuadratureError

REL_TOL = 1e-9
_ENVELOPE_DROP = 1e-13
_MAX_REFINE = 14

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _panel_sums(f, lo: np.ndarray, hi: np.ndarray, order: int) -> np.ndarray:
    """Gauss-Legendre of f over many panels at once; f must be vectorized."""
    x, w = _gl(order)
    mid = 0.5 * (lo + hi)[:, None]
    half = 0.5 * (hi - lo)[:, None]
    pts = mid + half * x[None, :]
    vals = f(pts.ravel()).reshape(pts.shape)
    return (vals * w[None, :]).sum(axis=1) * half[:, 0]


def integrate_oscillatory(
    f,
    lo: float,
    hi: float,
    max_freq: float,
    rel_tol: float = REL_TOL,
    abs_floor: float = 1e-300,
) -> complex:
    """Adaptive panel Gauss-Legendre for a vectorized complex integrand.

    Panels start no wider than pi / (4 * max_freq); panels whose order-16
    and order-32 results disagree are bisected until the total estimated
    error is below rel_tol (relative to the accumulated integral) or the
    refinement depth is exhausted, which raises QuadratureError.
    """
    if hi <= lo:
        return 0j
    width = np.pi / (4.0 * max(max_freq, 1e-12))
    n = int(np.ceil((hi - lo) / width))
    n = min(max(n, 4), 4_000_000)
    edges = np.linspace(lo, hi, n + 1)
    los, his = edges[:-1], edges[1:]
    total = 0j
    err = 0.0
    for depth in range(_MAX_REFINE + 1):
        coarse = _panel_sums(f, los, his, 16)
        fine = _panel_sums(f, los, his, 32)
        diff = np.abs(fine - coarse)
        scale = max(abs(total + fine.sum()), abs_floor)
        bad = diff > (rel_tol * scale) / max(len(los), 1)
        total += fine[~bad].sum()
        err += diff[~bad].sum()
        if not np.any(bad):
            break
        if depth == _MAX_REFINE:
            raise QuadratureError(
                f"panel refinement exhausted with {bad.sum()} panels above tolerance"
            )
        mids = 0.5 * (los[bad] + his[bad])
        los = np.concatenate([los[bad], mids])
        his = np.concatenate([mids, his[bad]])
    if err > 10 * rel_tol * max(abs(total), abs_floor) + 1e-280:
        raise QuadratureError(f"quadrature error estimate {err:.3e} exceeds tolerance")
    return complex(total)


def truncation_point(peak_envelope: float, tail_coeff: float, power: int, lo: float) -> float:
    """Smallest K with tail_coeff / K^power <= 1e-13 * peak_envelope."""
    if peak_envelope <= 0.0 or tail_coeff <= 0.0:
        return max(lo, 1.0)
    k = (tail_coeff / (_ENVELOPE_DROP * peak_envelope)) ** (1.0 / power)
    return max(k, lo + 1.0)


def exponential_integral_en(n: int, z: complex) -> complex:
    """E_n(z) for complex z with Re z >= 0, via E_1 and upward recurrence."""
    if z == 0:
        if n <= 1:
            raise ValueError("E_n(0) diverges for n <= 1")
        return 1.0 / (n - 1)
    e = exp1(complex(z))
    for m in range(1, n):
        e = (np.exp(-z) - z * e) / m
    return complex(e)


def oscillatory_tail(coeffs, offsets, cut: float, power: int) -> complex:
    """Closed form of sum_i c_i int_K^inf k^-power e^{ik u_i} dk.

    Each term equals K^{1-power} E_power(-i u_i K).
    """
    total = 0j
    for c, u in zip(coeffs, offsets):
        if c == 0:
            continue
        total += c * cut ** (1 - power) * exponential_integral_en(power, -1j * u * cut)
    return total
