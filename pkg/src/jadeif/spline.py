"""Natural interpolating cubic splines with analytic derivatives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SplineError(ValueError):
    pass


@dataclass(frozen=True)
class CubicSpline:
    """Piecewise cubic on ``knots``.

    ``coefficients[i] = (a0, a1, a2, a3)`` gives the piece on
    ``[knots[i], knots[i+1]]`` as ``a0 + a1 u + a2 u**2 + a3 u**3`` with
    ``u = x - knots[i]``.
    """

    knots: np.ndarray
    coefficients: np.ndarray

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    def _locate(self, x) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        # small slack absorbs round-off at the end knots
        tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(x < lo - tol) or np.any(x > hi + tol):
            raise SplineError("query outside spline domain")
        i = np.searchsorted(self.knots, x, side="right") - 1
        i = np.clip(i, 0, self.knots.size - 2)
        return i, x - self.knots[i]

    def __call__(self, x):
        return evaluate(self, x)


def fit(knot_x, knot_y) -> CubicSpline:
    """Natural cubic spline through ``(knot_x, knot_y)``.

    Second derivative is zero at both end knots. The tridiagonal system for
    the interior second derivatives is solved by forward elimination and
    back substitution.
    """
    x = np.asarray(knot_x, dtype=float)
    y = np.asarray(knot_y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise SplineError("knot arrays must be 1-D and of equal length")
    if x.size < 2:
        raise SplineError("need at least two knots")
    h = np.diff(x)
    if np.any(h <= 0):
        raise SplineError("knots must be strictly increasing")
    n = x.size
    slope = np.diff(y) / h
    m = np.zeros(n)  # second derivatives
    if n > 2:
        k = n - 2
        diag = 2.0 * (h[:-1] + h[1:])
        sub = h[1:-1].copy()  # couples row r to r-1
        rhs = 6.0 * (slope[1:] - slope[:-1])
        cp = np.empty(k)
        dp = np.empty(k)
        cp[0] = sub[0] / diag[0] if k > 1 else 0.0
        dp[0] = rhs[0] / diag[0]
        for r in range(1, k):
            den = diag[r] - sub[r - 1] * cp[r - 1]
            cp[r] = sub[r] / den if r < k - 1 else 0.0
            dp[r] = (rhs[r] - sub[r - 1] * dp[r - 1]) / den
        sol = np.empty(k)
        sol[-1] = dp[-1]
        for r in range(k - 2, -1, -1):
            sol[r] = dp[r] - cp[r] * sol[r + 1]
        m[1:-1] = sol
    coef = np.empty((n - 1, 4))
    coef[:, 0] = y[:-1]
    coef[:, 1] = slope - h * (2.0 * m[:-1] + m[1:]) / 6.0
    coef[:, 2] = m[:-1] / 2.0
    coef[:, 3] = (m[1:] - m[:-1]) / (6.0 * h)
    x = x.copy()
    x.setflags(write=False)
    coef.setflags(write=False)
    return CubicSpline(x, coef)


def evaluate(spline: CubicSpline, x):
    i, u = spline._locate(x)
    a = spline.coefficients[i]
    out = a[..., 0] + u * (a[..., 1] + u * (a[..., 2] + u * a[..., 3]))
    return float(out) if np.ndim(out) == 0 else out


def derivative(spline: CubicSpline, x, order: int = 1):
    i, u = spline._locate(x)
    a = spline.coefficients[i]
    if order == 1:
        out = a[..., 1] + u * (2.0 * a[..., 2] + 3.0 * u * a[..., 3])
    elif order == 2:
        out = 2.0 * a[..., 2] + 6.0 * u * a[..., 3]
    else:
        raise ValueError("order must be 1 or 2")
    return float(out) if np.ndim(out) == 0 else out


def piece_values(spline: CubicSpline, piece: int, u: float, order: int = 0) -> float:
    """Value (or derivative) of a single piece at local offset ``u``.

    Used to compare one-sided limits at a knot.
    """
    a0, a1, a2, a3 = spline.coefficients[piece]
    if order == 0:
        return a0 + u * (a1 + u * (a2 + u * a3))
    if order == 1:
        return a1 + u * (2 * a2 + 3 * u * a3)
    if order == 2:
        return 2 * a2 + 6 * u * a3
    raise ValueError("order must be 0, 1 or 2")
