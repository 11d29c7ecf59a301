"""Special functions and scalar solvers behind the closed-form rate expressions.

Everything here is a pure function of its inputs, so concurrent use from
multiple threads is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy.integrate import quad

__all__ = [
    "Bracket",
    "NoSignChangeError",
    "ConvergenceError",
    "exp_integral_e1",
    "expand_bracket",
    "solve_monotone_root",
    "integrate_semi_infinite",
]

EULER_GAMMA = 0.5772156649015328606


class NoSignChangeError(ValueError):
    """The target function has the same sign at both bracket endpoints."""


class ConvergenceError(RuntimeError):
    """An iterative routine ran out of iterations or accuracy budget."""

    def __init__(self, message: str, iterations: int | None = None,
                 error_estimate: float | None = None):
        if iterations is not None:
            message += f" (after {iterations} iterations)"
        if error_estimate is not None:
            message += f" (achieved error estimate {error_estimate:.3e})"
        super().__init__(message)
        self.iterations = iterations
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class Bracket:
    """Interval [lo, hi], 0 < lo < hi, across which a root is trapped."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (0.0 < self.lo < self.hi):
            raise ValueError(f"bracket requires 0 < lo < hi, got [{self.lo}, {self.hi}]")


def exp_integral_e1(x: float) -> float:
    """Exponential integral E1(x) = integral of exp(-t)/t over [x, inf).

    Power series below 1, modified-Lentz continued fraction at and above 1;
    both branches reach ~1e-14 relative accuracy in double precision.
    Underflows gracefully to 0.0 once exp(-x) is subnormal (x > ~745).

    Parameters
    ----------
    x : float
        Evaluation point, must be > 0.
    """
    if not x > 0.0:
        raise ValueError(f"exp_integral_e1 requires x > 0, got {x!r}")
    if x < 1.0:
        # E1(x) = -gamma - ln(x) + sum_{n>=1} (-1)^(n+1) x^n / (n * n!)
        total = -EULER_GAMMA - math.log(x)
        power = 1.0
        sign = 1.0
        for n in range(1, 64):
            power *= x / n
            contribution = sign * power / n
            total += contribution
            if abs(contribution) <= 1e-17 * abs(total):
                return total
            sign = -sign
        raise ConvergenceError("E1 series did not converge", iterations=64)
    # E1(x) = exp(-x) / (x + 1 - 1/(x + 3 - 4/(x + 5 - 9/(...))))
    b = x + 1.0
    c = 1e308
    d = 1.0 / b
    h = d
    for i in range(1, 256):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h * math.exp(-x)
    raise ConvergenceError("E1 continued fraction did not converge", iterations=256)


def expand_bracket(f: Callable[[float], float], lo: float = 1e-8,
                   hi: float = 1.0, hi_cap: float = 1e6) -> Bracket:
    """Grow [lo, hi] by doubling hi until f changes sign across it.

    Suits decreasing-through-zero targets such as the water-filling budget
    equations, whose left side falls from +inf to 0.
    """
    f_lo = f(lo)
    f_hi = f(hi)
    if f_lo == 0.0 or f_hi == 0.0:
        return Bracket(lo, hi)
    while (f_lo > 0.0) == (f_hi > 0.0):
        if hi >= hi_cap:
            raise NoSignChangeError(
                f"no sign change of target on [{lo}, {hi_cap}]: "
                f"f(lo)={f_lo:.3e}, f(hi)={f_hi:.3e}")
        hi = min(2.0 * hi, hi_cap)
        f_hi = f(hi)
        if f_hi == 0.0:
            break
    return Bracket(lo, hi)


def solve_monotone_root(f: Callable[[float], float], bracket: Bracket,
                        tol: float = 1e-12, max_iter: int = 200) -> float:
    """Root of a continuous, strictly monotone f on a sign-changing bracket.

    Bisection/secant hybrid: secant steps are taken while they keep shrinking
    the bracket, with a forced bisection whenever progress stalls, so the
    interval provably collapses. Returns x with |x - root| <= tol.
    Deterministic: identical inputs give bit-identical output.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    a, b = bracket.lo, bracket.hi
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise NoSignChangeError(
            f"no sign change on [{a}, {b}]: f(lo)={fa:.3e}, f(hi)={fb:.3e}")
    force_bisect = False
    for _ in range(max_iter):
        if b - a <= 2.0 * tol:
            return 0.5 * (a + b)
        width_before = b - a
        x = a - fa * (b - a) / (fb - fa)
        if force_bisect or not (a < x < b):
            x = 0.5 * (a + b)
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx > 0.0) == (fa > 0.0):
            a, fa = x, fx
        else:
            b, fb = x, fx
        # A secant step that failed to halve the bracket gets a bisection next.
        force_bisect = (b - a) > 0.5 * width_before
    raise ConvergenceError(
        f"root not located to tol={tol} on [{a}, {b}]", iterations=max_iter)


def integrate_semi_infinite(f: Callable[[float], float], lower: float,
                            rel_tol: float = 1e-10) -> float:
    """Adaptive quadrature of f over [lower, inf).

    Intended for smooth, absolutely integrable, exponentially decaying
    integrands. Test/oracle helper only: production closed forms never call
    this. Delegates to QUADPACK and verifies the reported error estimate.
    """
    if lower < 0.0:
        raise ValueError(f"lower limit must be >= 0, got {lower}")
    out = quad(f, lower, math.inf, epsabs=1e-14, epsrel=rel_tol,
               limit=400, full_output=1)
    value, abserr = out[0], out[1]
    if abserr > max(1e-9 * abs(value), 1e-12):
        raise ConvergenceError("semi-infinite quadrature did not converge",
                               error_estimate=abserr)
    return value
