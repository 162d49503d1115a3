"""Level-set measures from the renewal convolution, and their limit laws.

The measure w_n of the set of points whose digit sums reach n satisfies
w_0 = 1 and w_n = sum_{m<=n} a_m w_{n-m}.  This module runs that recursion
on either backend, checks it against brute-force composition enumeration,
and evaluates the predicted limits: the finite-type limit 1/sum(t_k), the
averaged and pointwise laws with their Gamma-function constants, and the
running minimum of n*t_n*w_n for heavy tails.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

import numpy as np

from ._util import is_inf, worker_count
from .partitions import DomainError, PartitionSpec

try:
    from gmpy2 import mpq as _rational  # ~3x faster than Fraction on deep runs
except ImportError:
    _rational = Fraction

__all__ = [
    "RenewalSequence",
    "renewal_sequence",
    "composition_oracle",
    "limit_prediction",
    "weak_law_constant",
    "weak_law_ratio",
    "strong_law_constant",
    "strong_law_ratio",
    "gl_liminf_target",
    "gl_liminf_track",
    "gamma",
]

_CHUNK = 1 << 14        # fixed reduction block; must not depend on worker count
_PAR_MIN_LEN = 1 << 18  # shortest dot worth handing to the thread pool


# ------------------------------------------------------------------ sequence


@dataclass(frozen=True, eq=False)
class RenewalSequence:
    """Computed prefix w_0..w_N plus backend bookkeeping.

    `values` holds every entry as float64.  On an exact run `exact_values`
    is the rational prefix and `switch_index` the first float-computed
    index (None if the denominator cap never bit); on a float run
    `exact_values` is None and `switch_index` is 0.
    """

    spec: PartitionSpec
    values: np.ndarray
    exact_values: Optional[List[Fraction]]
    switch_index: Optional[int]
    backend: str

    def __len__(self) -> int:
        return len(self.values)

    def w(self, n: int) -> float:
        if not 0 <= n < len(self.values):
            raise DomainError(f"w_{n} not computed; run holds 0..{len(self.values) - 1}")
        return float(self.values[n])

    def w_exact(self, n: int) -> Fraction:
        if self.exact_values is None or not 0 <= n < len(self.exact_values):
            raise DomainError(f"w_{n} was not computed exactly")
        return self.exact_values[n]

    def partial_sum_w(self, n: int) -> float:
        """fsum of w_1..w_n (w_0 is the seed, not a level)."""
        if not 0 <= n < len(self.values):
            raise DomainError(f"w_{n} not computed; run holds 0..{len(self.values) - 1}")
        return math.fsum(self.values[1:n + 1].tolist())


def _chunked_dot(a: np.ndarray, b: np.ndarray, pool: Optional[ThreadPoolExecutor]) -> float:
    # Fixed 2**14 blocks reduced by fsum: one bit pattern for any worker count.
    n = a.shape[0]
    if n <= _CHUNK:
        return float(np.dot(a, b))
    starts = range(0, n, _CHUNK)
    if pool is not None and n >= _PAR_MIN_LEN:
        futs = [pool.submit(np.dot, a[s:s + _CHUNK], b[s:s + _CHUNK]) for s in starts]
        parts = [f.result() for f in futs]
    else:
        parts = [np.dot(a[s:s + _CHUNK], b[s:s + _CHUNK]) for s in starts]
    return math.fsum(parts)


def _exact_prefix(spec: PartitionSpec, n_max: int, max_digits: Optional[int]):
    """Exact w_0.. until a denominator outgrows the digit cap.

    Returns (prefix, switch): the oversized w_n is discarded, so every kept
    value has at most max_digits decimal digits downstairs.  switch is None
    when the whole run stayed rational.
    """
    atoms = [None]
    w = [_rational(1)]
    for n in range(1, n_max + 1):
        atoms.append(_rational(spec.atom(n)))
        s = _rational(0)
        for m in range(1, n + 1):
            s += atoms[m] * w[n - m]
        if max_digits is not None and len(str(s.denominator)) > max_digits:
            return w, n
        w.append(s)
    return w, None


def renewal_sequence(spec: PartitionSpec, n_max: int, *, backend: Optional[str] = None,
                     max_exact_digits: Optional[int] = 64) -> RenewalSequence:
    """Run w_n = sum_{m<=n} a_m w_{n-m} up to n_max.

    The exact backend keeps rationals until a denominator exceeds
    max_exact_digits decimal digits (None lifts the cap), then continues in
    float64 from the recorded switch point.  The float inner product is an
    O(n) dot per step, blocked so results are reproducible bit-for-bit
    whatever ALPHA_DYN_THREADS says.
    """
    if n_max < 1:
        raise DomainError(f"renewal_sequence needs n_max >= 1, got {n_max}")
    mode = spec.backend if backend is None else backend
    if mode not in ("exact", "float"):
        raise DomainError(f"unknown backend {mode!r}")
    if mode == "exact" and spec.backend != "exact":
        raise DomainError("exact renewal needs an exact-capable spec")

    values = np.empty(n_max + 1)
    values[0] = 1.0
    exact: Optional[List[Fraction]] = None
    switch: Optional[int] = 0
    start = 1
    if mode == "exact":
        prefix, switch = _exact_prefix(spec, n_max, max_exact_digits)
        exact = [Fraction(int(q.numerator), int(q.denominator)) for q in prefix]
        for i, q in enumerate(prefix):
            values[i] = float(exact[i])
        if switch is None:
            return RenewalSequence(spec, values, exact, None, "exact")
        start = switch

    a_rev = spec.atoms(n_max)[::-1].copy()  # contiguous for the BLAS dot
    pool = None
    if n_max >= _PAR_MIN_LEN and worker_count() > 1:
        pool = ThreadPoolExecutor(max_workers=worker_count())
    try:
        for n in range(start, n_max + 1):
            values[n] = _chunked_dot(a_rev[n_max - n:], values[:n], pool)
    finally:
        if pool is not None:
            pool.shutdown()
    return RenewalSequence(spec, values, exact, switch, mode)


# ------------------------------------------------------------------- oracle


def composition_oracle(spec: PartitionSpec, n: int):
    """Sum over all ordered compositions of n of the product of their atoms.

    Brute-force enumeration (2^(n-1) terms), deliberately independent of
    the recursion so the two can cross-check each other.
    """
    if n < 0:
        raise DomainError(f"composition_oracle needs n >= 0, got {n}")
    if n > 22:
        raise DomainError(f"enumeration has 2^(n-1) terms; n capped at 22, got {n}")
    exact = spec.backend == "exact"
    if n == 0:
        return Fraction(1) if exact else 1.0  # the empty composition
    if exact:
        atom = [None] + [_rational(spec.atom(k)) for k in range(1, n + 1)]
        total = _rational(0)
    else:
        atom = [None] + [spec.atom_float(k) for k in range(1, n + 1)]
        total = 0.0
    for mask in range(1 << (n - 1)):
        # bit i set <=> a cut after position i+1
        acc = None
        prev = 0
        for cut in range(1, n):
            if mask >> (cut - 1) & 1:
                part = atom[cut - prev]
                acc = part if acc is None else acc * part
                prev = cut
        last = atom[n - prev]
        acc = last if acc is None else acc * last
        total += acc
    if exact:
        return Fraction(int(total.numerator), int(total.denominator))
    return total


# --------------------------------------------------------------- limit laws


def limit_prediction(spec: PartitionSpec):
    """Limit of w_n: 1/sum(t_k) for finite type, 0 for infinite type."""
    total = spec.tail_sum_total()
    if is_inf(total):
        return 0.0
    if isinstance(total, Fraction):
        return Fraction(1) / total
    return 1.0 / float(total)


def weak_law_constant(spec: PartitionSpec) -> float:
    """K in  sum_{k<=n} w_k ~ K * n / sum_{k<=n} t_k."""
    c = spec.classify()
    if c.finite_type:
        return 1.0
    th = c.theta
    if th is not None and 0.0 <= th <= 1.0:
        return 1.0 / (gamma(2.0 - th) * gamma(1.0 + th))
    raise DomainError("averaged law needs finite mass or a tail exponent in [0, 1]")


def strong_law_constant(spec: PartitionSpec) -> float:
    """k in  w_n ~ k / sum_{k<=n} t_k; refuses outside the guaranteed range."""
    c = spec.classify()
    if c.finite_type:
        return 1.0
    th = c.theta
    if th is not None and 0.5 < th <= 1.0:
        return 1.0 / (gamma(2.0 - th) * gamma(th))
    raise DomainError("strong law not guaranteed: infinite mass with tail exponent <= 1/2")


def _sequence_for(spec: PartitionSpec, n: int, sequence: Optional[RenewalSequence]):
    if sequence is None:
        return renewal_sequence(spec, n)
    if len(sequence.values) <= n:
        raise DomainError(f"supplied sequence holds 0..{len(sequence.values) - 1}, need {n}")
    return sequence


def weak_law_ratio(spec: PartitionSpec, n: int, *,
                   sequence: Optional[RenewalSequence] = None) -> float:
    """(sum_{k<=n} w_k)(sum_{k<=n} t_k)/(K n); drifts to 1 as n grows."""
    if n < 1:
        raise DomainError(f"weak_law_ratio needs n >= 1, got {n}")
    k_avg = weak_law_constant(spec)
    seq = _sequence_for(spec, n, sequence)
    sum_t, _ = spec.partial_tail_sum(n)
    return seq.partial_sum_w(n) * float(sum_t) / (k_avg * n)


def strong_law_ratio(spec: PartitionSpec, n: int, *,
                     sequence: Optional[RenewalSequence] = None) -> float:
    """w_n * (sum_{k<=n} t_k)/k; drifts to 1 where the pointwise law holds."""
    if n < 1:
        raise DomainError(f"strong_law_ratio needs n >= 1, got {n}")
    k_pt = strong_law_constant(spec)
    seq = _sequence_for(spec, n, sequence)
    sum_t, _ = spec.partial_tail_sum(n)
    return seq.w(n) * float(sum_t) / k_pt


def _gl_theta(spec: PartitionSpec) -> float:
    c = spec.classify()
    th = c.theta
    if c.finite_type or th is None or not 0.0 < th < 1.0:
        raise DomainError("liminf tracking needs infinite mass with tail exponent in (0, 1)")
    return th


def gl_liminf_target(spec: PartitionSpec) -> float:
    """sin(pi theta)/pi, the predicted liminf of n*t_n*w_n."""
    th = _gl_theta(spec)
    return math.sin(math.pi * th) / math.pi


def gl_liminf_track(spec: PartitionSpec, n_max: int, *,
                    sequence: Optional[RenewalSequence] = None) -> np.ndarray:
    """Running minimum over n <= n_max of n * t_n * w_n (non-increasing)."""
    _gl_theta(spec)
    if n_max < 1:
        raise DomainError(f"gl_liminf_track needs n_max >= 1, got {n_max}")
    seq = _sequence_for(spec, n_max, sequence)
    prod = np.arange(1, n_max + 1, dtype=np.float64)
    prod *= spec.tails(n_max)
    prod *= seq.values[1:n_max + 1]
    return np.minimum.accumulate(prod)


# -------------------------------------------------------------------- gamma

_LANCZOS_G = 7.0
# Classic nine-term Lanczos table for g = 7 (Godfrey's coefficients);
# measured relative error < 3e-15 over (0, 3).
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_INT_GAMMA = {
    1: math.sqrt(math.pi),             # gamma(1/2)
    2: 1.0,                            # gamma(1)
    3: 0.5 * math.sqrt(math.pi),       # gamma(3/2)
    4: 1.0,                            # gamma(2)
    5: 0.75 * math.sqrt(math.pi),      # gamma(5/2)
}


def gamma(x: float) -> float:
    """Gamma on (0, 3) from the fixed table above; half-integers short-circuit."""
    if not 0.0 < x < 3.0:
        raise DomainError(f"gamma is provided on (0, 3) only, got {x}")
    doubled = 2.0 * x
    if doubled == round(doubled):
        return _HALF_INT_GAMMA[int(round(doubled))]
    if x < 0.5:
        # reflection keeps the series argument where the table is best behaved
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    z = x - 1.0
    acc = _LANCZOS_C[0]
    for i in range(1, len(_LANCZOS_C)):
        acc += _LANCZOS_C[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc
