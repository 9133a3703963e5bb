"""Special functions and root finders used throughout the solvers.

Provides both real branches of the Lambert-W function, a guarded bisection
root finder, and the per-bit energy-time kernel g(t) = t * (2^(1/(B*t)) - 1)
together with its derivatives.  No external special-function library is
used; Lambert-W is computed by Halley iteration with a guaranteed bisection
fallback and a square-root series near the branch point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import BracketError, ConvergenceError

_INV_E = math.exp(-1.0)
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class RootBracket:
    """Search interval and stopping rules for ``bisect``."""

    lo: float
    hi: float
    tol_abs: float = 1e-12
    tol_rel: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")
        if self.tol_abs <= 0 or self.tol_rel <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


def bisect(f: Callable[[float], float], bracket: RootBracket) -> float:
    """Find a root of ``f`` inside ``bracket`` by plain bisection.

    ``f`` must change sign over the bracket (monotone functions are the
    intended use).  Deterministic: the same inputs always produce the same
    root estimate.
    """
    lo, hi = bracket.lo, bracket.hi
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise BracketError(
            f"no sign change over [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}"
        )
    for _ in range(bracket.max_iter):
        mid = 0.5 * (lo + hi)
        width = hi - lo
        if width <= bracket.tol_abs + bracket.tol_rel * abs(mid):
            return mid
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    raise ConvergenceError(
        f"bisection did not reach tolerance within {bracket.max_iter} iterations"
    )


def _halley_refine(w: float, y: float, iters: int = 60) -> float:
    """Halley iteration on w*e^w = y starting from w."""
    for _ in range(iters):
        ew = math.exp(w)
        r = w * ew - y
        if r == 0.0:
            return w
        # Halley step for f(w) = w e^w - y.
        denom = ew * (w + 1.0) - (w + 2.0) * r / (2.0 * w + 2.0)
        if denom == 0.0:
            break
        dw = r / denom
        w_new = w - dw
        if not math.isfinite(w_new):
            break
        if abs(dw) <= 1e-16 * max(1.0, abs(w)):
            return w_new
        w = w_new
    return w


def _branch_point_series(y: float, sign: float) -> float:
    """Series expansion of W about the branch point y = -1/e.

    ``sign`` is +1 for the principal branch and -1 for the lower branch.
    """
    p = sign * math.sqrt(max(0.0, 2.0 * (math.e * y + 1.0)))
    # Corless et al. coefficients for the branch-point expansion.
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3 - 43.0 / 540.0 * p**4


def _wm1_residual_ok(w: float, y: float) -> bool:
    return abs(w * math.exp(w) - y) <= 1e-12 * max(abs(y), 1e-300)


def lambert_w_minus1(y: float) -> float:
    """Lower real branch W_-1(y) for y in [-1/e, 0); result is <= -1."""
    if not (-_INV_E - 1e-15 <= y < 0.0):
        raise ValueError(f"lambert_w_minus1 requires -1/e <= y < 0, got {y}")
    if y <= -_INV_E:
        return -1.0
    if math.e * y + 1.0 < 1e-6:
        w = _branch_point_series(y, sign=-1.0)
        w = _halley_refine(w, y)
        if _wm1_residual_ok(w, y) and w <= -1.0:
            return w
        # fall through to bisection on failure
    else:
        # Asymptotic seed: W_-1(y) ~ ln(-y) - ln(-ln(-y)) for y -> 0-.
        ln_my = math.log(-y)
        w0 = ln_my - math.log(-ln_my) if ln_my < -1.0 else -1.5
        w = _halley_refine(w0, y)
        if _wm1_residual_ok(w, y) and w <= -1.0:
            return w

    # Guaranteed fallback: w e^w is increasing on (-inf, -1], so a bracket
    # [lo, -1] with f(lo) <= y always exists.
    lo = -2.0
    while lo * math.exp(lo) > y and lo > -1e4:
        lo *= 2.0
    root = bisect(
        lambda w_: w_ * math.exp(w_) - y,
        RootBracket(lo, -1.0, tol_abs=1e-15, tol_rel=1e-15, max_iter=300),
    )
    return _halley_refine(root, y)


def lambert_w0(y: float) -> float:
    """Principal real branch W_0(y) for y >= -1/e; result is >= -1."""
    if y < -_INV_E - 1e-15:
        raise ValueError(f"lambert_w0 requires y >= -1/e, got {y}")
    if y == 0.0:
        return 0.0
    if y <= -_INV_E:
        return -1.0
    if y < 0.0 and math.e * y + 1.0 < 1e-6:
        w = _branch_point_series(y, sign=+1.0)
        return _halley_refine(w, y)
    if y < 1.0:
        w0 = y * (1.0 - y)  # two terms of the Taylor series at 0
    else:
        ln_y = math.log(y)
        w0 = ln_y - math.log(ln_y) if ln_y > 1.0 else ln_y
    w = _halley_refine(max(w0, -0.999), y)
    if abs(w * math.exp(w) - y) <= 1e-12 * max(abs(y), 1e-300):
        return w
    hi = max(1.0, w0 + 1.0)
    while hi * math.exp(hi) < y:
        hi *= 2.0
    root = bisect(
        lambda w_: w_ * math.exp(w_) - y,
        RootBracket(-1.0, hi, tol_abs=1e-15, tol_rel=1e-15, max_iter=300),
    )
    return _halley_refine(root, y)


def energy_time_kernel(t: float, bandwidth: float) -> float:
    """Per-bit energy factor g(t) = t * (2^(1/(B t)) - 1).

    Multiplying by (bits / channel gain) gives the transmit energy needed
    to move that many bits in per-bit time ``t``.  Convex and strictly
    decreasing in ``t``, with limit ln(2)/B as t -> infinity.
    """
    if t <= 0.0:
        raise ValueError(f"per-bit time must be positive, got {t}")
    s = _LN2 / (bandwidth * t)
    if s > 300.0:
        return math.inf  # astronomically slow rate; avoids float overflow
    return t * math.expm1(s)


def energy_time_kernel_grad(t: float, bandwidth: float) -> float:
    """First derivative of ``energy_time_kernel`` in t (always negative)."""
    if t <= 0.0:
        raise ValueError(f"per-bit time must be positive, got {t}")
    s = _LN2 / (bandwidth * t)
    if s > 300.0:
        return -math.inf
    return math.exp(s) * (1.0 - s) - 1.0


def energy_time_kernel_hess(t: float, bandwidth: float) -> float:
    """Second derivative of ``energy_time_kernel`` in t (always positive)."""
    if t <= 0.0:
        raise ValueError(f"per-bit time must be positive, got {t}")
    s = _LN2 / (bandwidth * t)
    if s > 300.0:
        return math.inf
    return math.exp(s) * s * s / t
