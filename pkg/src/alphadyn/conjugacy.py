"""Order-preserving change of coordinates onto the tent map.

Every digit word is sent to the alternating dyadic series
theta = -2 sum_k (-1)^k 2^(-(l_1+...+l_k)); the resulting map carries the
coarse map of any partition onto the tent map y -> min(2y, 2-2y) and is at
the same time the distribution function of the measure that weights each
level-n coarse cylinder by 2^-n.  This module evaluates the series with
explicit error bounds, checks the intertwining relation at a point, and
computes the two cylinder Hoelder exponents from the atom decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

import numpy as np

from ._util import INF, SymbolicInfinity
from .dynamics import DigitWord, expand, farey_shift
from .partitions import DomainError, PartitionSpec

__all__ = [
    "ThetaResult",
    "theta",
    "theta_series",
    "tent_map",
    "conjugacy_check",
    "max_entropy_mass",
    "holder_ratio",
    "holder_exponents",
]

_LOG2 = math.log(2.0)


# ------------------------------------------------------------------- series


def theta_series(word: DigitWord) -> Fraction:
    """Exact partial sum of the alternating series over the word's digits.

    For a terminated word this is the exact image; otherwise the truncation
    error is at most 2 * 2^-(sum of digits).
    """
    total = Fraction(0)
    exponent = 0
    sign = 1
    for d in word.digits:
        exponent += d
        total += sign * Fraction(1, 1 << exponent)
        sign = -sign
    return 2 * total


@dataclass(frozen=True)
class ThetaResult:
    """Series value with its achieved error bound.

    `exact` is set on the rational route; the bound then applies to the
    rational value (the float field adds at most one rounding).  A bound of
    0.0 means the word terminated and the value is the true image.
    """

    value: float
    error_bound: float
    digits_used: int
    exact: Optional[Fraction] = None


def _digits_for(eps: float) -> int:
    # sum of digits needed so 2*2^-S <= eps; each digit adds at least 1
    if eps <= 0:
        raise DomainError(f"precision must be positive, got {eps}")
    return max(1, math.ceil(math.log2(2.0 / eps)))


def theta(spec: PartitionSpec, x: Union[Fraction, float, int, DigitWord],
          eps: float = 1e-12) -> ThetaResult:
    """Image of x under the change of coordinates, to precision eps.

    Accepts a point (expanded with spec's digits first) or a ready-made
    DigitWord.  When the expansion runs out before the requested precision,
    the achieved bound is reported instead of an error.
    """
    need = _digits_for(eps)
    if isinstance(x, DigitWord):
        word = x
    else:
        if x == 0:
            return ThetaResult(0.0, 0.0, 0, Fraction(0))
        word = expand(spec, x, max_digits=need + 1)
    return _theta_of_word(word, need)


def _theta_of_word(word: DigitWord, need: int) -> ThetaResult:
    used = 0
    depth = 0
    for d in word.digits:
        used += 1
        depth += d
        if depth >= need:
            break
    digits = word.digits[:used]
    consumed_all = used == len(word.digits)
    exact_image = consumed_all and word.terminated is True
    if exact_image:
        bound = 0.0
    else:
        bound = 2.0 * 2.0 ** -depth
    prefix = DigitWord(digits, terminated=exact_image)
    val = theta_series(prefix)
    if word.exhausted or isinstance(word.terminated, str):
        # float expansion gave up early; series rounding is covered too
        return ThetaResult(float(val), bound + used * 2.0 ** -52, used, None)
    return ThetaResult(float(val), bound, used, val)


# ------------------------------------------------------------ intertwining


def tent_map(y):
    """min(2y, 2 - 2y) on [0, 1]; exact on Fractions."""
    if not 0 <= y <= 1:
        raise DomainError(f"tent_map needs 0 <= y <= 1, got {y}")
    doubled = 2 * y
    if doubled <= 1:
        return doubled
    return 2 - doubled


def conjugacy_check(spec: PartitionSpec, x, eps: float = 1e-10) -> bool:
    """Whether theta(coarse_map(x)) agrees with tent(theta(x)) within eps.

    The image digits come from shifting x's word, not from re-expanding the
    mapped point, so the two sides share no arithmetic.  Exact inputs are
    compared in rational arithmetic; the identity then holds on the nose
    whenever the expansion terminates inside the digit budget.
    """
    if x == 0:
        return True  # both sides fix 0
    need = _digits_for(eps / 4.0)
    word = expand(spec, x, max_digits=need + 1)
    here = _theta_of_word(word, need)
    there = _theta_of_word(farey_shift(word), need)
    if here.exact is not None and there.exact is not None:
        gap = abs(there.exact - tent_map(here.exact))
    else:
        gap = abs(there.value - tent_map(here.value))
    slack = there.error_bound + 2.0 * here.error_bound
    return bool(gap <= eps + slack)


# -------------------------------------------------------- cylinder measures


def max_entropy_mass(word: DigitWord) -> Fraction:
    """Mass 2^-(sum of digits) the entropy-maximizing measure gives the word."""
    return Fraction(1, 1 << sum(word.digits))


# --------------------------------------------------------------- exponents


def holder_ratio(spec: PartitionSpec, n: int) -> float:
    """n log2 / (-log a_n): the regularity ratio of the n-th atom."""
    if n < 1:
        raise DomainError(f"atom index must be >= 1, got {n}")
    return n * _LOG2 / -spec.log_atom(n)


def holder_exponents(spec: PartitionSpec, n_search: int = 1000
                     ) -> Tuple[float, Union[float, SymbolicInfinity]]:
    """(kappa_plus, kappa_minus): inf and sup of the regularity ratio.

    Finite search over n <= n_search combined with the analytic limit of
    the ratio: it diverges for expansive tails (kappa_minus is symbolic
    infinity) and tends to log2/log(rho) for expanding ones.
    """
    if n_search < 1:
        raise DomainError(f"n_search must be >= 1, got {n_search}")
    ns = np.arange(1, n_search + 1, dtype=np.float64)
    ratios = ns * _LOG2 / -spec.log_atoms(ns)
    lo = float(np.min(ratios))
    hi = float(np.max(ratios))
    c = spec.classify()
    if c.tail_kind == "expanding":
        limit = _LOG2 / math.log(c.rho)
        return min(lo, limit), max(hi, limit)
    return lo, INF
