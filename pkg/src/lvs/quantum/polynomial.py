"""Odd polynomial approximations of the sign function.

The construction has two stages. ``P`` is a Chebyshev interpolant of
``erf(k x)`` on ``[-2, 2]`` that is within ``eps`` of ``sign(x)`` away from
``(-delta, delta)`` and bounded by 1. The shifted combination

    Q(x) = (1 - eps) * (P(x + 2 delta) - P(-x + 2 delta)) / 2

is odd, bounded by 1 on ``[-1, 1]``, within ``2 eps`` of ``sign`` on
``|x| >= 3 delta`` and at most ``2 eps`` in magnitude on ``|x| <= delta``.
Both stages are certified on dense grids. The degree of ``P`` is doubled
until the certificate passes, then bisected down to the smallest odd
degree that still passes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.special import erf, erfcinv

from ..errors import ConstructionError, ParameterError

GRID_POINTS = 10_000
MAX_DEGREE = 4096


@dataclass(frozen=True)
class QsvtPolynomial:
    """Odd Chebyshev series on ``[-1, 1]`` approximating ``sign``."""

    cheb_coeffs: np.ndarray
    degree: int
    delta: float
    eps: float
    degree_constant: float = float("nan")

    def __call__(self, x):
        return C.chebval(np.asarray(x, dtype=float), self.cheb_coeffs)

    def certificate(self, points=GRID_POINTS):
        """Grid maxima of the three bounds the polynomial must satisfy.

        Returns
        -------
        dict
            ``max_abs`` (<= 1), ``max_sign_err`` on ``|x| >= 3 delta``
            (<= 2 eps) and ``max_center`` on ``|x| <= delta`` (<= 2 eps).
        """
        x = _grid(points, self.delta)
        y = self(x)
        outer = np.abs(x) >= 3 * self.delta
        inner = np.abs(x) <= self.delta
        return {
            "max_abs": float(np.max(np.abs(y))),
            "max_sign_err": float(np.max(np.abs(y[outer] - np.sign(x[outer])))),
            "max_center": float(np.max(np.abs(y[inner]))) if inner.any() else 0.0,
        }

    def certified(self, points=GRID_POINTS):
        c = self.certificate(points)
        return (c["max_abs"] <= 1.0 and c["max_sign_err"] <= 2 * self.eps
                and c["max_center"] <= 2 * self.eps)


def _grid(points, delta):
    # uniform grid plus the interval endpoints where the bounds are tightest
    x = np.linspace(-1.0, 1.0, points)
    edges = np.array([-3 * delta, 3 * delta, -delta, delta, 0.0])
    return np.concatenate([x, edges])


def _sign_proxy(delta, eps, degree):
    """Odd Chebyshev interpolant on ``[-2, 2]`` (in ``t = x/2``) of a scaled erf.

    The erf steepness ``k`` puts ``erfc(k delta) = eps/2``; the series is
    shrunk by ``1 + eps/4`` so that interpolation error cannot push it
    above 1. Returns coefficients in ``t``.
    """
    k = float(erfcinv(eps / 2)) / delta
    coeffs = C.chebinterpolate(lambda t: erf(2 * k * t), degree)
    coeffs[0::2] = 0.0
    return coeffs / (1 + eps / 4)


def _proxy_ok(coeffs, delta, eps):
    t = np.linspace(-1.0, 1.0, 4 * GRID_POINTS)
    p = C.chebval(t, coeffs)
    x = 2 * t
    far = np.abs(x) >= delta
    return np.max(np.abs(p)) <= 1.0 and np.max(np.abs(p[far] - np.sign(x[far]))) <= eps


def build_sign_polynomial(delta, eps, max_degree=MAX_DEGREE) -> QsvtPolynomial:
    """Certified odd sign approximation with transition half-width ``delta``.

    Parameters
    ----------
    delta : float
        In ``(0, 1/6)``.
    eps : float
        In ``(0, 1/2)``.

    Raises
    ------
    ConstructionError
        If no degree up to ``max_degree`` passes the grid certificate.
    """
    if not 0 < delta < 1 / 6:
        raise ParameterError(f"delta must lie in (0, 1/6), got {delta}")
    if not 0 < eps < 0.5:
        raise ParameterError(f"eps must lie in (0, 1/2), got {eps}")
    scale = math.ceil(math.log(1 / eps) / delta)
    degree = 2 * (max(8, scale // 4) // 2) + 1
    failed = 1
    while degree <= max_degree:
        poly = _attempt(delta, eps, degree, scale)
        if poly is not None:
            break
        failed = degree
        degree = 2 * degree + 1
    else:
        raise ConstructionError(
            f"sign polynomial for delta={delta}, eps={eps} not certified up to degree "
            f"{max_degree}")
    # doubling overshoots; bisect back over odd degrees
    lo, hi = failed, degree
    while hi - lo > 2:
        mid = (lo + hi) // 2
        mid += 1 - mid % 2
        if mid >= hi:
            break
        trial = _attempt(delta, eps, mid, scale)
        if trial is None:
            lo = mid
        else:
            hi, poly = mid, trial
    return poly


def _attempt(delta, eps, degree, scale):
    p = _sign_proxy(delta, eps, degree)
    if not _proxy_ok(p, delta, eps):
        return None

    # Q has the same degree as P; interpolating it at degree+1 Chebyshev
    # nodes recovers it exactly
    def q_of(x):
        return (1 - eps) * (C.chebval((x + 2 * delta) / 2, p)
                            - C.chebval((-x + 2 * delta) / 2, p)) / 2

    coeffs = C.chebinterpolate(q_of, degree)
    coeffs[0::2] = 0.0
    poly = QsvtPolynomial(coeffs, degree, delta, eps, degree / scale)
    return poly if poly.certified() else None
