"""Pressure, free energy, and the two multifractal spectra.

The induced map sees the partition through Z(u) = sum a_n^u; the slow map
sees it through Z(u, v) = sum a_n^u e^{-vn}.  Everything in this module
reduces to careful evaluation of those series, their u-derivatives, and
convex minimization of u + p(u)/s and u + v(u)/s.

Series are summed in blocks with a running scale exponent, so no call
overflows or underflows for grid-sized u.  Slowly convergent tails (near
the divergence boundary) are closed out with Euler-Maclaurin corrections
and adaptive quadrature on the family's smooth interpolation of log a_n.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad

from ._util import (INF, SymbolicInfinity, bisect_root, format_number,
                    golden_argmin, is_inf, worker_count)
from .partitions import DomainError, PartitionSpec

Real = Union[float, SymbolicInfinity]

_BLOCK = 1 << 12
_HEAD_CAP = 1 << 17     # series terms before the tail goes to quadrature
_NEGLIGIBLE = 1e-22
_Y_CUT = 690.0          # exp(y) stays inside float64 below this
_SEARCH_N = 4096        # finite-search window for atom extremes
_EPS = 2.220446049250313e-16

__all__ = [
    "CurveSample", "CurveTable", "PhaseReport",
    "pressure", "pressure_derivative", "pressure_curve",
    "free_energy", "free_energy_curve",
    "tau_spectrum", "sigma_spectrum", "legendre_check",
    "luroth_phase_report", "farey_phase_report",
    "t_minus", "s_bounds", "r_plus", "transition_threshold",
    "post_transition_tau",
]


# ---------------------------------------------------------------------------
# Result types
# ---------------------------------------------------------------------------

_CURVE_KINDS = ("pressure", "free_energy", "tau_spectrum", "sigma_spectrum")


@dataclass(frozen=True)
class CurveSample:
    """One grid point of a sampled curve.

    minimizer is filled for spectrum kinds (the u attaining the inf) and
    left None for plain pressure / free-energy samples.
    """

    argument: float
    value: Real
    error_bound: float
    minimizer: Optional[float] = None


@dataclass(frozen=True)
class CurveTable:
    kind: str
    samples: Tuple[CurveSample, ...]

    def __post_init__(self):
        if self.kind not in _CURVE_KINDS:
            raise DomainError(f"unknown curve kind {self.kind!r}")
        object.__setattr__(self, "samples", tuple(self.samples))
        args = [s.argument for s in self.samples]
        if any(b <= a for a, b in zip(args, args[1:])):
            raise DomainError("curve arguments must be strictly increasing")
        if any(s.error_bound < 0.0 for s in self.samples):
            raise DomainError("error bounds must be nonnegative")

    def __len__(self) -> int:
        return len(self.samples)

    def arguments(self) -> List[float]:
        return [s.argument for s in self.samples]

    def values(self) -> List[Real]:
        return [s.value for s in self.samples]


@dataclass(frozen=True)
class PhaseReport:
    """Transition verdict and critical data for one of the two maps.

    The numeric fields are properties of the partition alone, so the
    luroth and farey reports of one spec agree on them; only map_kind,
    transition and criterion_used differ.  transition None means the
    family carries no analytic criterion (verdict undetermined).
    """

    map_kind: str
    transition: Optional[bool]
    t_infinity: float
    t_zero: Real
    r_plus: Real
    t_minus: float
    s_minus: float
    s_plus: float
    criterion_used: str

    def to_dict(self) -> dict:
        def out(x):
            return "inf(sym)" if is_inf(x) else x
        return {
            "map": self.map_kind,
            "transition": self.transition,
            "t_infinity": self.t_infinity,
            "t_zero": out(self.t_zero),
            "r_plus": out(self.r_plus),
            "t_minus": self.t_minus,
            "s_minus": self.s_minus,
            "s_plus": self.s_plus,
            "criterion": self.criterion_used,
        }


# ---------------------------------------------------------------------------
# Series engine
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _la_table(spec: PartitionSpec) -> np.ndarray:
    return spec.log_atoms(np.arange(1, _HEAD_CAP + 1, dtype=np.float64))


_NS = np.arange(1, _HEAD_CAP + 1, dtype=np.float64)


def _converges(spec: PartitionSpec, u: float, v: float) -> bool:
    cls = spec.classify()
    if cls.tail_kind == "expanding":
        # terms behave like exp(-n (u log rho + v)); equality still diverges
        return u * math.log(cls.rho) + v > 0.0
    if v > 0.0:
        return True
    if v < 0.0:
        return False
    ti = spec.t_infinity()
    if u > ti:
        return True
    return u == ti and spec.pressure_finite_at_boundary()


@dataclass
class _Sums:
    m: float        # scale exponent; stored sums carry a factor exp(-m)
    s0: float
    s_la: float
    s_n: float
    bound: float


def _smooth_la(spec: PartitionSpec, x: float) -> float:
    return float(spec.smooth_log_atom(x))


def _tail_v0(spec: PartitionSpec, u: float, m: float, start: int,
             derivs: bool) -> Tuple[float, float, float]:
    """Euler-Maclaurin tail of sum exp(u log a_n) from n = start, scaled.

    Integration runs in y = log x so the slowly decaying region is well
    conditioned; past _Y_CUT the exponent is affine in y to machine
    precision for power-law families, and the closure error for
    log-corrected ones is covered by a slope-derived pad on the bound.
    """
    b = spec.poly_decay_order()
    # only slowly convergent expansive series reach the cap
    assert b is not None
    eps = u * b - 1.0

    def ey(y: float) -> float:
        return u * _smooth_la(spec, math.exp(y)) + y - m

    y0 = math.log(start)
    i0, q0 = quad(lambda y: math.exp(ey(y)), y0, _Y_CUT,
                  epsabs=0.0, epsrel=1e-11, limit=400)
    # affine closure beyond the float-safe cutoff
    h = 10.0
    c1 = ey(_Y_CUT) + eps * _Y_CUT
    gam = (c1 - (ey(_Y_CUT - h) + eps * (_Y_CUT - h))) / h
    d = eps - gam
    f_cut = math.exp(ey(_Y_CUT)) if ey(_Y_CUT) > -700.0 else 0.0
    r0 = f_cut / d if d > 0.0 else 0.0
    wobble = min(1.0, abs(gam) * _Y_CUT)      # nonzero slope: count r0 as fuzzy
    # pure-log tails y^-w are undercounted by the factor w/(w-1); the
    # residual slope recovers w, so pad the fuzzy part accordingly
    w_est = abs(gam) * _Y_CUT
    pad = min(25.0, max(1.0, w_est / (w_est - 1.0))) if w_est > 1.0 else 25.0
    bound = q0 + r0 * wobble * pad + 4.0 * _EPS * i0
    # Euler-Maclaurin junction terms in x-counts: F(M)/2 - F'(M)/12
    hh = 1e-4
    f_x = math.exp(ey(y0)) / start
    dey = (ey(y0 + hh) - ey(y0 - hh)) / (2.0 * hh)
    df_x = f_x * (dey - 1.0) / start
    val = i0 + r0 + 0.5 * f_x - df_x / 12.0
    bound += abs(df_x) * 0.02 + abs(f_x) * 1e-8
    if not derivs:
        return val, 0.0, bound
    # weighted tail for the derivative: weight log a(x)
    iw, qw = quad(lambda y: _smooth_la(spec, math.exp(y)) * math.exp(ey(y)),
                  y0, _Y_CUT, epsabs=0.0, epsrel=1e-11, limit=400)
    # past the cutoff log a(x) is affine in y: A - b (y - cut) + slope slack
    a_cut = _smooth_la(spec, math.exp(_Y_CUT))
    rw = (f_cut * (a_cut / d - b / (d * d))) if d > 0.0 else 0.0
    wla = _smooth_la(spec, float(start))
    dwla = (_smooth_la(spec, start * (1.0 + hh))
            - _smooth_la(spec, start * (1.0 - hh))) / (2.0 * hh * start)
    val_w = iw + rw + 0.5 * f_x * wla - (df_x * wla + f_x * dwla) / 12.0
    bound += qw + abs(rw) * wobble * pad
    return val, val_w, bound


def _tail_vpos(spec: PartitionSpec, u: float, v: float, m: float, start: int,
               derivs: bool) -> Tuple[float, float, float, float]:
    """Quadrature tail for v > 0 series that outlive the head cap.

    Integrates in y = log x; the exp(-v e^y) factor cuts the integrand
    off hard, so a finite upper limit replaces the semi-infinite range
    that defeats quad when v is tiny.
    """

    def ex(x: float) -> float:
        return u * _smooth_la(spec, x) - v * x - m

    def gy(y: float) -> float:
        x = math.exp(y)
        e = u * _smooth_la(spec, x) + y - v * x - m
        return math.exp(e) if e > -700.0 else 0.0

    y0 = math.log(float(start))
    yhi = math.log(820.0 / v)
    for _ in range(3):
        x = math.exp(yhi)
        slack = abs(u * _smooth_la(spec, x)) + abs(m) + yhi
        yhi = math.log((820.0 + slack) / v)
    f1 = math.exp(ex(float(start))) if ex(float(start)) > -700.0 else 0.0
    hh = max(1e-6 * start, 1e-3)
    df1 = f1 * (ex(start + hh) - ex(start - hh)) / (2.0 * hh)
    if yhi <= y0:
        val = 0.5 * f1 - df1 / 12.0
        return val, 0.0, 0.0, abs(df1) * 0.02
    i0, q0 = quad(gy, y0, yhi, epsabs=1e-300, epsrel=1e-11, limit=400)
    val = i0 + 0.5 * f1 - df1 / 12.0
    bound = q0 + abs(df1) * 0.02 + 4.0 * _EPS * i0
    if not derivs:
        return val, 0.0, 0.0, bound
    iw, qw = quad(lambda y: _smooth_la(spec, math.exp(y)) * gy(y),
                  y0, yhi, epsabs=1e-300, epsrel=1e-11, limit=400)
    inx, qn = quad(lambda y: math.exp(y) * gy(y),
                   y0, yhi, epsabs=1e-300, epsrel=1e-11, limit=400)
    wla = _smooth_la(spec, float(start))
    val_w = iw + 0.5 * f1 * wla
    val_n = inx + 0.5 * f1 * start
    return val, val_w, val_n, bound + qw + qn


def _series(spec: PartitionSpec, u: float, v: float,
            derivs: bool = False) -> _Sums:
    """Blocked, scale-tracked evaluation of sum exp(u log a_n - v n).

    Callers must gate convergence first.  Early exit once a block's top
    term is negligible; otherwise the tail is closed with quadrature.
    """
    la_all = _la_table(spec)
    m = -math.inf
    s0 = s_la = s_n = 0.0
    bound = 0.0
    for lo in range(0, _HEAD_CAP, _BLOCK):
        la = la_all[lo:lo + _BLOCK]
        ns = _NS[lo:lo + _BLOCK]
        e = u * la - v * ns
        mb = float(e.max())
        if mb > m:
            if s0 > 0.0:
                scale = math.exp(m - mb)
                s0 *= scale
                s_la *= scale
                s_n *= scale
                bound *= scale
            m = mb
        w = np.exp(e - m)
        s0 += float(w.sum())
        if derivs:
            s_la += float((la * w).sum())
            s_n += float((ns * w).sum())
        last, first = float(e[-1]), float(e[0])
        if float(w.max()) < _NEGLIGIBLE * s0 and last < first:
            # remainder via the block's mean decay ratio, cheap and safe
            r = math.exp((last - first) / (len(e) - 1))
            tail = math.exp(last - m) * r / (1.0 - r)
            if v > 0.0 and u >= 0.0:
                la_max = float(la_all[:_SEARCH_N].max())
                alt = math.exp(u * la_max - v * (lo + len(e)) - m) \
                    / (-math.expm1(-v))
                tail = min(tail, alt)
            return _Sums(m, s0, s_la, s_n, bound + tail)
    start = _HEAD_CAP + 1
    if v == 0.0:
        t0, t_la, tb = _tail_v0(spec, u, m, start, derivs)
        t_n = 0.0
    else:
        t0, t_la, t_n, tb = _tail_vpos(spec, u, v, m, start, derivs)
    return _Sums(m, s0 + t0, s_la + t_la, s_n + t_n, bound + tb)


# ---------------------------------------------------------------------------
# Pressure of the induced map
# ---------------------------------------------------------------------------

def pressure(spec: PartitionSpec, u) -> Tuple[Real, float]:
    """log sum a_n^u with an error bound; symbolic infinity off the domain."""
    u = float(u)
    if spec.geometric_like:
        lc, lr = spec.geo_log_params()
        q = u * lr
        if q >= 0.0:
            return INF, 0.0
        if u == 1.0:
            return 0.0, 0.0
        val = u * lc + q - math.log(-math.expm1(q))
        return val, 8.0 * _EPS * (abs(val) + 1.0)
    if not _converges(spec, u, 0.0):
        return INF, 0.0
    if u == 1.0:
        return 0.0, 0.0          # the atoms sum to one by construction
    s = _series(spec, u, 0.0)
    val = s.m + math.log(s.s0)
    return val, s.bound / s.s0 + 8.0 * _EPS * (abs(val) + 1.0)


def pressure_derivative(spec: PartitionSpec, u) -> float:
    """d/du of the pressure: sum a_n^u log a_n / sum a_n^u, always < 0.

    At u equal to the boundary exponent the series defining the numerator
    may diverge even when the pressure is finite; probe from above.
    """
    u = float(u)
    if spec.geometric_like:
        lc, lr = spec.geo_log_params()
        q = u * lr
        if q >= 0.0:
            raise DomainError(f"pressure diverges at u = {u:g}")
        return lc + lr + lr / math.expm1(-q)
    if not _converges(spec, u, 0.0):
        raise DomainError(f"pressure diverges at u = {u:g}")
    s = _series(spec, u, 0.0, derivs=True)
    return s.s_la / s.s0


def pressure_curve(spec: PartitionSpec, u_grid: Sequence[float]) -> CurveTable:
    def one(u: float) -> CurveSample:
        val, bnd = pressure(spec, u)
        return CurveSample(float(u), val, bnd)
    return CurveTable("pressure", tuple(_map_ordered(one, list(u_grid))))


# ---------------------------------------------------------------------------
# Free energy of the slow map
# ---------------------------------------------------------------------------

def _z_value(spec: PartitionSpec, u: float, v: float) -> float:
    if spec.geometric_like:
        lc, lr = spec.geo_log_params()
        q = u * lr - v
        if q >= 0.0:
            return math.inf
        return math.exp(u * lc + q) / (-math.expm1(q))
    if not _converges(spec, u, v):
        return math.inf
    s = _series(spec, u, v)
    e = s.m + math.log(s.s0)
    return math.exp(e) if e < 700.0 else math.inf


def free_energy(spec: PartitionSpec, u, *, xtol: float = 1e-12) -> float:
    """The r solving sum a_n^u e^{-rn} = 1, by bracketed bisection.

    Exactly zero for expansive families at u >= 1: the series at r = 0 is
    already <= 1 there, and subexponential atoms blow up for any r < 0.
    """
    u = float(u)
    cls = spec.classify()
    if cls.tail_kind != "expanding" and u >= 1.0:
        return 0.0

    def fz(v: float) -> float:
        return _z_value(spec, u, v) - 1.0

    if cls.tail_kind == "expanding":
        edge = -u * math.log(cls.rho)
        lo, hi = edge, edge + 1.0
        while fz(hi) > 0.0:
            lo = hi
            hi = 2.0 * hi - edge
    else:
        lo, hi = 0.0, 1.0
        while fz(hi) > 0.0:
            lo = hi
            hi *= 2.0
    return bisect_root(fz, lo, hi, xtol=xtol)


def free_energy_curve(spec: PartitionSpec,
                      u_grid: Sequence[float]) -> CurveTable:
    def one(u: float) -> CurveSample:
        v = free_energy(spec, u)
        return CurveSample(float(u), v, 1e-12 * (1.0 + abs(v)))
    return CurveTable("free_energy", tuple(_map_ordered(one, list(u_grid))))


def _v_with_slope(spec: PartitionSpec, u: float,
                  v_hint: Optional[float] = None) -> Tuple[float, float]:
    """(v(u), v'(u)) with the slope from implicit differentiation.

    On the root, dv/du = sum (log a_n) w_n / sum n w_n with weights
    w_n = a_n^u e^{-vn}.  At the expansive kink u = 1 the left slope is
    -1/r_plus (0 for infinite type).
    """
    cls = spec.classify()
    if cls.tail_kind != "expanding" and u >= 1.0:
        rp = r_plus(spec)
        return 0.0, (0.0 if is_inf(rp) else -1.0 / float(rp))
    v = None
    if v_hint is not None and v_hint > 0.0:
        lo, hi = 0.25 * v_hint, 4.0 * v_hint
        if _z_value(spec, u, lo) > 1.0 > _z_value(spec, u, hi):
            v = bisect_root(lambda vv: _z_value(spec, u, vv) - 1.0,
                            lo, hi, xtol=1e-12)
    if v is None:
        v = free_energy(spec, u)
    if spec.geometric_like:
        lc, lr = spec.geo_log_params()
        qt = math.exp(u * lr - v)
        return v, lr + lc * (1.0 - qt)
    s = _series(spec, u, v, derivs=True)
    return v, s.s_la / s.s_n


# ---------------------------------------------------------------------------
# Critical data
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def t_minus(spec: PartitionSpec) -> float:
    """-log of the largest atom; the finite search suffices because atoms
    are eventually decreasing in every declared family."""
    return float(-_la_table(spec)[:_SEARCH_N].max())


@lru_cache(maxsize=32)
def s_bounds(spec: PartitionSpec) -> Tuple[float, float]:
    """(inf, sup) of -log(a_n)/n: finite search plus the analytic limit."""
    la = _la_table(spec)[:_SEARCH_N]
    vals = -la / np.arange(1, _SEARCH_N + 1)
    cls = spec.classify()
    lim = math.log(cls.rho) if cls.tail_kind == "expanding" else 0.0
    return (min(float(vals.min()), lim), max(float(vals.max()), lim))


@lru_cache(maxsize=32)
def r_plus(spec: PartitionSpec) -> Real:
    """sum n a_n / (-sum a_n log a_n); symbolic infinity for infinite type."""
    total = spec.tail_sum_total()     # sum of tails equals sum n a_n
    if is_inf(total):
        return INF
    return float(total) / (-pressure_derivative(spec, 1.0))


@lru_cache(maxsize=32)
def transition_threshold(spec: PartitionSpec) -> Real:
    """Limit of -p'(u) as u drops to the boundary exponent, extrapolated
    over probe offsets 1e-2, 1e-3, 1e-4; symbolic infinity when the slope
    diverges.  A finite limit needs the boundary pressure finite and the
    family's analytic criterion to flag a transition; log-slow divergence
    (no-transition families) is invisible to the probe triple, so the
    analytic verdict gates the numeric extrapolation.  The probe-growth
    flag stays as a backstop for undetermined families.
    """
    if not spec.pressure_finite_at_boundary():
        return INF
    if spec.luroth_no_transition()[0] is True:
        return INF
    ti = spec.t_infinity()
    d = [-pressure_derivative(spec, ti + q) for q in (1e-2, 1e-3, 1e-4)]
    g1, g2 = d[1] - d[0], d[2] - d[1]
    if g1 <= 0.0:           # probes not increasing: already converged flat
        return d[2]
    r = g2 / g1
    if r >= 0.8:
        return INF
    if r <= 0.0:
        return d[2]
    return d[2] + g2 * r / (1.0 - r)


def post_transition_tau(spec: PartitionSpec, s: float) -> Tuple[float, float]:
    """Boundary-minimizer spectrum value in both published normalizations.

    Returns (t_inf + p(t_inf)/s, t_inf + exp(p(t_inf))/s).  The first is
    the inf-formula limit and is what tau_spectrum reports; the second
    replaces the log-series by the series itself and is retained only for
    comparison.
    """
    ti = spec.t_infinity()
    pb, _ = pressure(spec, ti)
    if is_inf(pb):
        raise DomainError("no finite boundary pressure for this family")
    return ti + pb / s, ti + math.exp(pb) / s


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

def _tau_sample(spec: PartitionSpec, s: float) -> CurveSample:
    tmin = t_minus(spec)
    if s <= tmin:
        return CurveSample(s, 0.0, 0.0, None)
    ti = spec.t_infinity()
    tz = transition_threshold(spec)
    if not is_inf(tz) and s >= float(tz):
        pb, pbound = pressure(spec, ti)
        val = ti + float(pb) / s
        return CurveSample(s, _clamp01(val), pbound / s + 1e-12, ti)

    def dg(u: float) -> float:
        return 1.0 + pressure_derivative(spec, u) / s

    off_hi = 1.0
    while dg(ti + off_hi) <= 0.0:
        off_hi *= 2.0
    off_lo = 0.5 * off_hi
    fallback = False
    while dg(ti + off_lo) > 0.0:
        off_lo *= 0.25
        if off_lo < 1e-13:
            # derivative refuses to cross: minimize the objective directly
            fallback = True
            break
    if fallback:
        u_star = golden_argmin(
            lambda uu: uu + float(pressure(spec, uu)[0]) / s,
            ti + 1e-12, ti + off_hi, xtol=1e-10)
    else:
        wl, wh = math.log(off_lo), math.log(off_hi)
        for _ in range(90):
            if wh - wl <= 1e-11:
                break
            wm = 0.5 * (wl + wh)
            if dg(ti + math.exp(wm)) < 0.0:
                wl = wm
            else:
                wh = wm
        u_star = ti + math.exp(0.5 * (wl + wh))
    p_star, pbound = pressure(spec, u_star)
    val = u_star + float(p_star) / s
    return CurveSample(s, _clamp01(val), pbound / s + 1e-9, u_star)


def tau_spectrum(spec: PartitionSpec, s_grid: Sequence[float]) -> CurveTable:
    """Dimension spectrum of the induced map's Lyapunov level sets.

    For each s, minimizes the convex u + p(u)/s by derivative-sign
    bisection; past the transition threshold the minimizer sits at the
    boundary exponent and the boundary formula is used.  Zero below the
    smallest admissible exponent t_minus.
    """
    samples = _map_ordered(lambda s: _tau_sample(spec, float(s)),
                           [float(s) for s in s_grid])
    return CurveTable("tau_spectrum", tuple(samples))


def _sigma_sample(spec: PartitionSpec, s: float) -> CurveSample:
    slo, shi = s_bounds(spec)
    if shi - slo <= 1e-12:
        # one-point spectrum: all -log(a_n)/n equal
        hit = abs(s - shi) <= 1e-9
        return CurveSample(s, 1.0 if hit else 0.0, 0.0, 1.0 if hit else None)
    if s < slo or s > shi:
        return CurveSample(s, 0.0, 0.0, None)
    if s == 0.0:
        # expansive boundary value sigma(0) = 1, reported as metadata
        return CurveSample(s, 1.0, 0.0, 1.0)
    cls = spec.classify()
    expansive = cls.tail_kind != "expanding"
    if expansive:
        rp = r_plus(spec)
        if not is_inf(rp) and s <= 1.0 / float(rp):
            # transition plateau: kink minimizer at u = 1, v(1) = 0
            return CurveSample(s, 1.0, 0.0, 1.0)

    hint: List[Optional[float]] = [None]

    def dh(u: float) -> float:
        v, slope = _v_with_slope(spec, u, v_hint=hint[0])
        hint[0] = v if v > 0.0 else None
        return 1.0 + slope / s

    if expansive:
        hi = 1.0
    else:
        hi = 1.0
        while dh(hi) <= 0.0 and hi < 200.0:
            hi += 1.0
    lo = hi - 1.0
    step = 1.0
    while dh(lo) >= 0.0 and lo > -200.0:
        step *= 2.0
        lo -= step
    u_star = _convex_argmin(dh, lo, hi)
    v_star = free_energy(spec, u_star)
    val = _clamp01(u_star + v_star / s)
    return CurveSample(s, val, (1e-10 + 1e-12) / s + 1e-10, u_star)


def _convex_argmin(dg: Callable[[float], float], lo: float, hi: float,
                   xtol: float = 1e-10) -> float:
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi or hi - lo <= xtol:
            break
        if dg(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sigma_spectrum(spec: PartitionSpec, s_grid: Sequence[float]) -> CurveTable:
    """Dimension spectrum of the slow map's Lyapunov level sets.

    Vanishes outside [s_minus, s_plus]; inside, minimizes u + v(u)/s.  In
    the finite-type expansive case the curve is exactly 1 on the plateau
    (0, 1/r_plus], where the minimizer is pinned at the kink of v.
    """
    samples = _map_ordered(lambda s: _sigma_sample(spec, float(s)),
                           [float(s) for s in s_grid])
    return CurveTable("sigma_spectrum", tuple(samples))


def _clamp01(x: float) -> float:
    # both spectra live in [0, 1]; the objective at u = 1 already caps them
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


def legendre_check(curve: CurveTable, spec: PartitionSpec, *,
                   u_grid: Optional[Sequence[float]] = None) -> float:
    """Worst envelope defect of a spectrum table against its transform pair.

    For every sample, the value must sit below u + p(u)/s (tau) or
    u + v(u)/s (sigma) for all u, with equality at the recorded minimizer.
    Returns the largest signed violation over samples, grid points, and
    minimizer equalities; anything at round-off scale passes.
    """
    if curve.kind not in ("tau_spectrum", "sigma_spectrum"):
        raise DomainError("legendre_check needs a spectrum curve")
    tau_mode = curve.kind == "tau_spectrum"
    ti = spec.t_infinity()
    if u_grid is None:
        if tau_mode:
            u_grid = [ti + o for o in np.geomspace(1e-3, 30.0, 50)]
        else:
            u_grid = list(np.linspace(-40.0, 1.0, 50))

    def g_of(u: float) -> float:
        if tau_mode:
            p, _ = pressure(spec, u)
            return math.inf if is_inf(p) else u + float(p)
        return u + free_energy(spec, u)

    table = [(float(u), g_of(float(u))) for u in u_grid]
    worst = -math.inf
    for sample in curve.samples:
        if sample.minimizer is None and sample.value == 0.0:
            continue          # vanished region: no envelope content
        s = sample.argument
        env = min(u + (g - u) / s for u, g in table if math.isfinite(g))
        worst = max(worst, float(sample.value) - env)
        if sample.minimizer is not None:
            worst = max(worst, abs(float(sample.value) - _g_at(
                spec, tau_mode, sample.minimizer, s)))
    return worst if worst > -math.inf else 0.0


def _g_at(spec: PartitionSpec, tau_mode: bool, u: float, s: float) -> float:
    if tau_mode:
        p, _ = pressure(spec, u)
        return u + float(p) / s
    return u + free_energy(spec, u) / s


# ---------------------------------------------------------------------------
# Phase reports
# ---------------------------------------------------------------------------

def _metadata(spec: PartitionSpec):
    slo, shi = s_bounds(spec)
    return (spec.t_infinity(), transition_threshold(spec), r_plus(spec),
            t_minus(spec), slo, shi)


def luroth_phase_report(spec: PartitionSpec) -> PhaseReport:
    """Transition verdict for the induced map, from the family's analytic
    criterion, with the numerically extrapolated boundary slope attached."""
    verdict, criterion = spec.luroth_no_transition()
    ti, tz, rp, tmin, slo, shi = _metadata(spec)
    if verdict is None:
        transition = None
        criterion += ("; numeric evidence: boundary slope limit "
                      + format_number(tz))
    else:
        transition = not verdict
    return PhaseReport("luroth", transition, ti, tz, rp, tmin, slo, shi,
                       criterion)


def farey_phase_report(spec: PartitionSpec) -> PhaseReport:
    """Transition verdict for the slow map: a kink of the free energy at
    exponent 1 appears exactly for finite-type expansive partitions."""
    cls = spec.classify()
    if cls.tail_kind == "expanding":
        transition = False
        criterion = ("expanding tails: exponential atom decay, "
                     "free energy smooth and bijective")
    elif cls.finite_type:
        transition = True
        criterion = ("finite type: free-energy kink at exponent 1 "
                     "with left slope -1/r_plus")
    else:
        transition = False
        criterion = ("infinite type: free energy flattens smoothly "
                     "at exponent 1")
    ti, tz, rp, tmin, slo, shi = _metadata(spec)
    return PhaseReport("farey", transition, ti, tz, rp, tmin, slo, shi,
                       criterion)


# ---------------------------------------------------------------------------
# Grid plumbing
# ---------------------------------------------------------------------------

def _map_ordered(fn: Callable, xs: list) -> list:
    """Apply fn over a grid, in a thread pool when it pays off.

    Samples are independent and pure, so the pooled result is identical
    to the sequential one, in grid order.
    """
    if len(xs) >= 8 and worker_count() > 1:
        with ThreadPoolExecutor(max_workers=min(worker_count(), 8,
                                                len(xs))) as ex:
            return list(ex.map(fn, xs))
    return [fn(x) for x in xs]
