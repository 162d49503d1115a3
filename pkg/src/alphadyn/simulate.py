"""Monte-Carlo checks of the almost-everywhere digit statistics.

Long orbits are never iterated in floating point: Lebesgue measure is
invariant for the fast map and makes the digit sequence i.i.d. with
P(digit = k) = a_k, so drawing digits by inverse-CDF on the tails gives
an exact symbolic orbit of any length.  On top of that sampler the module
estimates the Lyapunov exponents of both maps, verifies atom by atom that
the step density t_n/a_n is fixed by the transfer operator of the slow
map, and measures how often digit partial sums hit a prescribed level.
Float orbits of the maps themselves are offered only as short demo runs;
they shed roughly one digit of state per step and are meaningless past
fifty steps.

Reproducibility contract: the generator is numpy's Philox-4x64 with 10
rounds, keyed by the two 64-bit words (seed, stream).  Stream s covers
samples [s * 65536, (s + 1) * 65536); each uniform is produced as
(next_uint64 >> 11) * 2^-53 and mapped through u = 1 - raw so that u
lies in (0, 1].  Histograms merge by exact integer addition and every
float reduction runs over digits in sorted order, so results are
bit-identical for fixed (spec, n, seed) regardless of thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Union

import numpy as np

from ._util import worker_count
from .dynamics import farey_map, luroth_map
from .partitions import DomainError, PartitionSpec

__all__ = [
    "TrajectoryStats",
    "RunningAverageRow",
    "sample_digits",
    "luroth_lyapunov_estimate",
    "farey_lyapunov_estimate",
    "invariant_density_check",
    "sum_level_frequency",
    "decade_averages",
    "demo_orbit",
]

_CHUNK = 1 << 16
_LEVEL_STREAM = 1 << 62       # keeps level draws off the sample_digits streams
_ORBIT_CAP = 50
_SEED_LIMIT = 1 << 64


# ------ sampled statistics -------------------------------------------------

@dataclass(frozen=True)
class TrajectoryStats:
    """Digit histogram of one symbolic orbit plus its Birkhoff averages."""

    n_steps: int
    digit_histogram: Dict[int, int]
    mean_digit: float
    mean_log_digit: float
    mean_neg_log_atom: float
    seed: int

    def __post_init__(self) -> None:
        if self.n_steps < 1:
            raise DomainError(f"n_steps must be >= 1, got {self.n_steps}")
        if not 0 <= self.seed < _SEED_LIMIT:
            raise DomainError("seed must fit in 64 unsigned bits")
        total = 0
        for digit, count in self.digit_histogram.items():
            if digit < 1 or count < 1:
                raise DomainError(
                    f"histogram entry {digit}: {count} is not a positive "
                    "digit with a positive count")
            total += count
        if total != self.n_steps:
            raise DomainError(
                f"histogram counts sum to {total}, expected {self.n_steps}")


@dataclass(frozen=True)
class RunningAverageRow:
    """Birkhoff averages of one orbit truncated after n_steps digits."""

    n_steps: int
    mean_digit: float
    mean_log_digit: float
    mean_neg_log_atom: float
    farey_quotient: float


def _check_seed(seed: int) -> None:
    if not 0 <= seed < _SEED_LIMIT:
        raise DomainError("seed must fit in 64 unsigned bits")


def _chunk_digits(spec: PartitionSpec, seed: int, stream: int,
                  m: int) -> np.ndarray:
    rng = np.random.Generator(
        np.random.Philox(key=np.array([seed, stream], dtype=np.uint64)))
    u = 1.0 - rng.random(m)
    return spec.locate_array(u)


def _merge_counts(hist: Dict[int, int], digits: np.ndarray) -> None:
    values, counts = np.unique(digits, return_counts=True)
    for d, c in zip(values.tolist(), counts.tolist()):
        hist[d] = hist.get(d, 0) + c


def _histogram_sums(spec: PartitionSpec, hist: Dict[int, int]):
    """(sum c_d * d exact, fsum c_d log d, fsum c_d log a_d), sorted order."""
    ds = sorted(hist)
    counts = [hist[d] for d in ds]
    digit_total = sum(c * d for c, d in zip(counts, ds))
    log_ds = np.log(np.asarray(ds, dtype=np.float64))
    las = spec.log_atoms(np.asarray(ds, dtype=np.float64))
    log_total = math.fsum(c * l for c, l in zip(counts, log_ds.tolist()))
    la_total = math.fsum(c * l for c, l in zip(counts, las.tolist()))
    return digit_total, log_total, la_total


def sample_digits(spec: PartitionSpec, n: int, seed: int) -> TrajectoryStats:
    """Draw n i.i.d. digits of spec by inverse-CDF on the tail sums.

    Chunks of 65536 samples run on disjoint (seed, stream) sub-streams and
    may be drawn on several threads; the result is bit-identical either way.
    """
    if n < 1:
        raise DomainError(f"need n >= 1 samples, got {n}")
    _check_seed(seed)
    plan = [(s, min(_CHUNK, n - s * _CHUNK))
            for s in range((n + _CHUNK - 1) // _CHUNK)]
    hist: Dict[int, int] = {}
    if len(plan) > 1 and worker_count() > 1:
        with ThreadPoolExecutor(max_workers=worker_count()) as pool:
            for digits in pool.map(
                    lambda sm: _chunk_digits(spec, seed, sm[0], sm[1]), plan):
                _merge_counts(hist, digits)
    else:
        for stream, m in plan:
            _merge_counts(hist, _chunk_digits(spec, seed, stream, m))
    digit_total, log_total, la_total = _histogram_sums(spec, hist)
    return TrajectoryStats(
        n_steps=n,
        digit_histogram=hist,
        mean_digit=digit_total / n,
        mean_log_digit=log_total / n,
        mean_neg_log_atom=-la_total / n,
        seed=seed,
    )


# ------ Lyapunov estimates -------------------------------------------------

def luroth_lyapunov_estimate(stats: TrajectoryStats) -> float:
    """Fast-map Lyapunov estimate: the mean of -log a_digit.

    The target is -sum a_k log a_k, finite for every family handled here.
    """
    return float(stats.mean_neg_log_atom)


def farey_lyapunov_estimate(spec: PartitionSpec,
                            stats: TrajectoryStats) -> float:
    """Slow-map Lyapunov estimate: sum -log a_digit over sum digit.

    Both sums are recomputed from the histogram with spec supplying the
    atom lengths, the denominator in exact integers.  For infinite-type
    families the denominator grows without bound and the quotient decays
    to the almost-sure value 0; no special casing is needed.
    """
    digit_total, _, la_total = _histogram_sums(spec, stats.digit_histogram)
    return -la_total / digit_total


# ------ invariant density --------------------------------------------------

def invariant_density_check(spec: PartitionSpec, n_atoms: int) -> float:
    """Worst transfer-operator residual of the step density over n_atoms.

    The candidate density is t_n/a_n on atom n.  The slow map has two
    inverse branches over a point of atom n: one into atom 1 with
    derivative a_1 and one into atom n+1 with derivative a_{n+1}/a_n, so
    the pulled-back density is 1 + t_{n+1}/a_n.  The residual
    |1 + t_{n+1}/a_n - t_n/a_n| vanishes identically because
    t_n = a_n + t_{n+1}; on an exact backend the return value is 0.0
    with no rounding at all.
    """
    if n_atoms < 1:
        raise DomainError(f"need n_atoms >= 1, got {n_atoms}")
    worst: Union[int, float] = 0
    for n in range(1, n_atoms + 1):
        a_n = spec.atom(n)
        resid = abs(1 + spec.tail(n + 1) / a_n - spec.tail(n) / a_n)
        if resid > worst:
            worst = resid
    return float(worst)


# ------ sum-level frequencies ----------------------------------------------

def sum_level_frequency(spec: PartitionSpec, n_level: int, n_samples: int,
                        seed: int) -> float:
    """Fraction of sampled points whose digit partial sums hit n_level.

    A point belongs to the level set of n iff some prefix of its digit
    word sums to exactly n, so each sample keeps drawing digits until its
    partial sum reaches or overshoots n_level.  Digits are >= 1, hence at
    most n_level rounds.  The empirical fraction estimates the level-set
    measure w_{n_level} of the renewal recursion.
    """
    if n_level < 1:
        raise DomainError(f"need n_level >= 1, got {n_level}")
    if n_samples < 1:
        raise DomainError(f"need n_samples >= 1, got {n_samples}")
    _check_seed(seed)
    rng = np.random.Generator(np.random.Philox(
        key=np.array([seed, _LEVEL_STREAM], dtype=np.uint64)))
    sums = np.zeros(n_samples, dtype=np.int64)
    alive = np.ones(n_samples, dtype=bool)
    hits = 0
    while alive.any():
        u = 1.0 - rng.random(int(alive.sum()))
        sums[alive] += spec.locate_array(u)
        hits += int(np.count_nonzero(sums[alive] == n_level))
        alive &= sums < n_level
    return hits / n_samples


# ------ running averages ---------------------------------------------------

def decade_averages(spec: PartitionSpec, n: int,
                    seed: int) -> List[RunningAverageRow]:
    """Running Birkhoff averages after 10, 100, ... and finally n digits.

    Shares the sub-stream layout of sample_digits, so the last row agrees
    bit for bit with the stats of sample_digits(spec, n, seed).  Infinite
    type families have no limiting mean digit; the row sequence shows the
    divergence instead of pretending a point estimate.
    """
    if n < 1:
        raise DomainError(f"need n >= 1 samples, got {n}")
    _check_seed(seed)
    ckpts = []
    p = 10
    while p < n:
        ckpts.append(p)
        p *= 10
    ckpts.append(n)
    hist: Dict[int, int] = {}
    rows: List[RunningAverageRow] = []
    pos = 0
    nxt = 0
    for stream in range((n + _CHUNK - 1) // _CHUNK):
        m = min(_CHUNK, n - pos)
        digits = _chunk_digits(spec, seed, stream, m)
        lo = 0
        while nxt < len(ckpts) and ckpts[nxt] <= pos + m:
            hi = ckpts[nxt] - pos
            _merge_counts(hist, digits[lo:hi])
            lo = hi
            digit_total, log_total, la_total = _histogram_sums(spec, hist)
            steps = ckpts[nxt]
            rows.append(RunningAverageRow(
                n_steps=steps,
                mean_digit=digit_total / steps,
                mean_log_digit=log_total / steps,
                mean_neg_log_atom=-la_total / steps,
                farey_quotient=-la_total / digit_total,
            ))
            nxt += 1
        _merge_counts(hist, digits[lo:m])
        pos += m
    return rows


# ------ short float orbits -------------------------------------------------

def demo_orbit(spec: PartitionSpec, x0, n_steps: int,
               map_kind: str = "farey") -> list:
    """Iterate one map from x0 for n_steps, capped at 50.

    Float iteration shreds roughly one digit of the expansion per step,
    so anything past 50 steps is noise; long runs go through
    sample_digits instead.  Exact inputs on an exact backend iterate in
    rational arithmetic and ignore that caveat, but keep the cap.
    """
    if not 1 <= n_steps <= _ORBIT_CAP:
        raise DomainError(
            f"demo orbits run 1..{_ORBIT_CAP} steps, got {n_steps}")
    if map_kind == "farey":
        step = farey_map
    elif map_kind == "luroth":
        step = luroth_map
    else:
        raise DomainError(f"map_kind must be farey or luroth, got {map_kind!r}")
    orbit = [x0]
    x = x0
    for _ in range(n_steps):
        x = step(spec, x)
        orbit.append(x)
    return orbit
