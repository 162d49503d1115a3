"""Shared plumbing: symbolic infinity, number formatting, bisection solvers."""

from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import Callable


class SymbolicInfinity:
    """Marker for an analytically divergent quantity.

    Distinct from float('inf') so report consumers can tell "diverges by
    analysis" from an overflowed computation.  Compares greater than any
    real number.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf(sym)"

    def __float__(self) -> float:
        return math.inf

    def __gt__(self, other) -> bool:
        return not isinstance(other, SymbolicInfinity)

    def __lt__(self, other) -> bool:
        return False

    def __ge__(self, other) -> bool:
        return True

    def __le__(self, other) -> bool:
        return isinstance(other, SymbolicInfinity)


INF = SymbolicInfinity()


def is_inf(x) -> bool:
    return isinstance(x, SymbolicInfinity)


def format_number(x) -> str:
    """Render a value for text output.

    Exact rationals print as "p/q" (plain integer when q = 1), floats with
    15 significant digits, symbolic infinity as "inf(sym)".
    """
    if isinstance(x, SymbolicInfinity):
        return "inf(sym)"
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    f = float(x)
    if f == 0.0:
        return "0"          # normalise -0.0 so text output re-parses stably
    s = f"{f:.15g}"
    if not math.isfinite(float(s)):
        return repr(f)      # 15-digit rounding overflowed at the float ceiling
    return s


def bisect_root(f: Callable[[float], float], lo: float, hi: float,
                xtol: float = 1e-13, max_iter: int = 200) -> float:
    """Root of a decreasing function on [lo, hi] by plain bisection.

    Assumes f(lo) > 0 > f(hi) (weak inequalities tolerated).
    """
    flo = f(lo)
    if flo <= 0.0:
        return lo
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= xtol * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def convex_argmin(dg: Callable[[float], float], lo: float, hi: float,
                  xtol: float = 1e-10, max_iter: int = 200) -> float:
    """Minimizer of a convex function given its derivative dg.

    Requires dg(lo) <= 0 <= dg(hi); bisects on the sign of dg.
    """
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if dg(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= xtol:
            break
    return 0.5 * (lo + hi)


def golden_argmin(g: Callable[[float], float], lo: float, hi: float,
                  xtol: float = 1e-10, max_iter: int = 300) -> float:
    """Golden-section fallback for a unimodal objective without derivatives."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        if gc < gd:
            b, d, gd = d, c, gc
            c = b - invphi * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + invphi * (b - a)
            gd = g(d)
    return 0.5 * (a + b)


def worker_count() -> int:
    """Thread budget for grid evaluation; ALPHA_DYN_THREADS caps it."""
    cap = os.environ.get("ALPHA_DYN_THREADS")
    avail = os.cpu_count() or 1
    if cap is None:
        return avail
    try:
        n = int(cap)
    except ValueError:
        return avail
    return max(1, min(n, avail))
