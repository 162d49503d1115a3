"""Partition families: frozen values, the atom/tail identity, locate, sums."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alphadyn import (
    Dyadic,
    DomainError,
    Explicit,
    Geometric,
    Harmonic,
    INF,
    LogPowerAtoms,
    PowerAtoms,
    PowerTail,
    RangeError,
    SpecParseError,
    parse_spec,
    spec_from_dict,
)

# shared instances: construction caches tables, no need to redo per test
HARMONIC = Harmonic()
DYADIC = Dyadic()
GEO = Geometric(Fraction(2), Fraction(1, 3))
GEO_F = Geometric(2.0, 1.0 / 3.0)
PA3 = PowerAtoms(3.0)
PA54 = PowerAtoms(1.25)
PT_HALF = PowerTail(0.5)
PT2 = PowerTail(2.0)
LPA12 = LogPowerAtoms(12, 5)
LPA4 = LogPowerAtoms(4, 5)
EXPL = Explicit([Fraction(1, 2), Fraction(1, 4)], Dyadic())

ALL_FLOAT = [
    pytest.param(HARMONIC.with_backend("float"), id="harmonic"),
    pytest.param(DYADIC.with_backend("float"), id="dyadic"),
    pytest.param(GEO_F, id="geometric"),
    pytest.param(PA3, id="power_atoms_3"),
    pytest.param(PA54, id="power_atoms_5_4"),
    pytest.param(PT_HALF, id="power_tail_1_2"),
    pytest.param(PT2, id="power_tail_2"),
    pytest.param(LPA12, id="log_power_12"),
    pytest.param(LPA4, id="log_power_4"),
    pytest.param(EXPL.with_backend("float"), id="explicit"),
]

EXACT = [
    pytest.param(HARMONIC, id="harmonic"),
    pytest.param(DYADIC, id="dyadic"),
    pytest.param(GEO, id="geometric"),
    pytest.param(EXPL, id="explicit"),
]


# ------ frozen values ------------------------------------------------------

def test_harmonic_atoms_and_tails():
    assert HARMONIC.atom(3) == Fraction(1, 12)
    assert HARMONIC.tail(5) == Fraction(1, 5)
    assert HARMONIC.tail(1) == 1


def test_dyadic_atoms_and_tails():
    assert DYADIC.atom(1) == Fraction(1, 2)
    assert DYADIC.tail(3) == Fraction(1, 4)


def test_geometric_atoms_and_tails():
    assert GEO.atom(2) == Fraction(2, 9)
    assert GEO.tail(1) == 1
    assert GEO.tail(3) == Fraction(1, 9)


def test_power_tail_closed_form():
    assert PT_HALF.tail(4) == 0.5
    assert PT2.tail(10) == 0.01
    # atom formula avoids the cancellation of the naive difference
    assert math.isclose(PT_HALF.atom(1), 1.0 - 2.0 ** -0.5, rel_tol=1e-15)


def test_power_atoms_normalization_is_zeta():
    from scipy.special import zeta
    assert math.isclose(PA3.normalization, zeta(3.0), rel_tol=1e-14)
    assert PA3.tail(1) == 1.0
    assert math.isclose(PA3.atom(2), 2.0 ** -3 / zeta(3.0), rel_tol=1e-14)


def test_log_power_normalization_frozen():
    # independently computed (mpmath nsum, Euler-Maclaurin method, 40 digits)
    assert math.isclose(LPA12.normalization, 0.0010235459610650420835,
                        rel_tol=1e-14)
    assert math.isclose(LPA4.normalization, 0.127533715948051182,
                        rel_tol=1e-14)


def test_explicit_values():
    assert EXPL.atom(1) == Fraction(1, 2)
    assert EXPL.atom(2) == Fraction(1, 4)
    # remaining mass 1/4 spread as a scaled dyadic tail
    assert EXPL.atom(3) == Fraction(1, 8)
    assert EXPL.tail(3) == Fraction(1, 4)
    assert EXPL.tail(4) == Fraction(1, 8)


# ------ atom/tail identity -------------------------------------------------

@pytest.mark.parametrize("spec", EXACT)
def test_identity_exact_backend(spec):
    for n in list(range(1, 200)) + [500, 999]:
        assert spec.atom(n) == spec.tail(n) - spec.tail(n + 1)


@pytest.mark.parametrize("spec", ALL_FLOAT)
def test_identity_within_4_ulp(spec):
    for n in range(1, 10_001):
        try:
            a = spec.atom_float(n)
            t_n = spec.tail_float(n)
            t_next = spec.tail_float(n + 1)
        except RangeError:
            break  # geometric atoms underflow near n ~ 700; nothing to check
        assert abs(a - (t_n - t_next)) <= 4 * math.ulp(t_n), f"n={n}"


def test_atom_underflow_raises_never_zero():
    f = DYADIC.with_backend("float")
    with pytest.raises(RangeError):
        f.atom(1100)
    assert DYADIC.atom(1100) == Fraction(1, 2) ** 1100   # exact path unaffected


# ------ locate -------------------------------------------------------------

def test_locate_examples():
    assert HARMONIC.locate(0.3) == 3
    assert HARMONIC.locate(0.5) == 2          # t_2 itself belongs to A_2
    assert HARMONIC.locate(Fraction(1, 2)) == 2
    assert DYADIC.locate(1) == 1
    assert DYADIC.locate(1.0) == 1


@pytest.mark.parametrize("spec", ALL_FLOAT)
def test_locate_inverts_tail(spec):
    for n in range(1, 1001):
        try:
            t_n = spec.tail_float(n)
        except RangeError:
            break  # geometric tails underflow near n ~ 680
        assert spec.locate(t_n) == n
        if n > 1:
            above = np.nextafter(t_n, 1.0)
            assert spec.locate(above) == n - 1


@pytest.mark.parametrize("spec", EXACT)
def test_locate_inverts_tail_exact(spec):
    for n in range(1, 300):
        assert spec.locate(spec.tail(n)) == n
        if n > 1:
            gap = spec.tail(n - 1) - spec.tail(n)
            assert spec.locate(spec.tail(n) + gap / 1000) == n - 1


@pytest.mark.parametrize("spec", ALL_FLOAT)
def test_locate_array_matches_scalar(spec):
    rng = np.random.default_rng(7)
    xs = rng.uniform(1e-6, 1.0, size=300)
    ns = spec.locate_array(xs)
    for x, n in zip(xs, ns):
        assert spec.locate(float(x)) == int(n)


@given(st.floats(min_value=1e-9, max_value=1.0))
@settings(max_examples=200, deadline=None)
def test_locate_membership_property(x):
    for spec in (HARMONIC.with_backend("float"), PT_HALF, PA3):
        n = spec.locate(x)
        t_hi = spec.tail_float(n)
        t_lo = spec.tail_float(n + 1)
        assert t_lo <= x <= t_hi
        # strict lower bound whenever float64 can resolve the atom at all
        if t_lo < t_hi:
            assert t_lo < x


def test_locate_domain_errors():
    for bad in (0.0, -0.5, 1.5):
        with pytest.raises(DomainError):
            HARMONIC.locate(bad)
    with pytest.raises(RangeError):
        PT_HALF.locate(1e-12)     # digit ~ 1e24 exceeds the int64-safe range


# ------ partial tail sums --------------------------------------------------

def test_partial_tail_sum_harmonic():
    s, bound = HARMONIC.partial_tail_sum(2)
    assert s == Fraction(3, 2)
    assert bound is None                       # infinite type, no remainder


def test_partial_tail_sum_dyadic_closed_form():
    s, bound = DYADIC.partial_tail_sum(60)
    assert DYADIC.tail_sum_total() == 2
    assert bound == 2 - s                      # geometric remainder is exact


def test_partial_tail_sum_power_tail_basel():
    # sum of 1/k^2 with the integral remainder must bracket pi^2/6
    s, bound = PT2.partial_tail_sum(20_000)
    target = math.pi ** 2 / 6.0
    assert s < target < s + bound
    assert bound < 1e-3


def test_tail_sum_totals():
    assert GEO.tail_sum_total() == Fraction(3, 2)
    assert HARMONIC.tail_sum_total() is INF
    assert PT_HALF.tail_sum_total() is INF
    from scipy.special import zeta
    assert math.isclose(PA3.tail_sum_total(), zeta(2.0) / zeta(3.0),
                        rel_tol=1e-13)
    assert math.isclose(PT2.tail_sum_total(), math.pi ** 2 / 6.0,
                        rel_tol=1e-13)


@pytest.mark.parametrize("spec", ALL_FLOAT)
def test_finite_type_sums_stabilize_within_bound(spec):
    if not spec.classify().finite_type:
        return
    s500, bound = spec.partial_tail_sum(500)
    s4000, _ = spec.partial_tail_sum(4000)
    assert bound is not None
    assert 0.0 <= s4000 - s500 <= bound


def test_explicit_tail_sum_two_routes():
    # direct series vs the prefix + scaled-tail closed form
    direct = math.fsum(float(EXPL.tail(k)) for k in range(1, 400))
    assert EXPL.tail_sum_total() == 2
    assert math.isclose(direct, 2.0, rel_tol=1e-12)


# ------ classification -----------------------------------------------------

def test_classify_harmonic():
    c = HARMONIC.classify()
    assert c.type_class == "infinite"
    assert c.tail_kind == "expansive"
    assert c.theta == 1.0
    assert c.rho == 1.0
    assert c.eventually_decreasing


def test_classify_geometric():
    c = GEO.classify()
    assert c.type_class == "finite"
    assert c.tail_kind == "expanding"
    assert c.rho == 3.0


def test_classify_by_parameter():
    assert PowerTail(0.5).classify().type_class == "infinite"
    assert PowerTail(2.0).classify().type_class == "finite"
    assert PowerAtoms(1.5).classify().type_class == "infinite"
    assert PowerAtoms(3.0).classify().type_class == "finite"
    assert PowerAtoms(3.0).classify().theta == 2.0
    assert LogPowerAtoms(4, 5).classify().type_class == "finite"
    assert EXPL.classify().tail_kind == "expanding"
    assert EXPL.classify().rho == 2.0


@pytest.mark.parametrize("spec", [pytest.param(GEO_F, id="geometric"),
                                  pytest.param(DYADIC, id="dyadic")])
def test_expanding_ratio_reached_by_200(spec):
    rho = spec.classify().rho
    ratio = spec.tail_float(200) / spec.tail_float(201)
    assert abs(ratio / rho - 1.0) < 0.01


@pytest.mark.parametrize("theta", [0.5, 0.75, 2.0])
def test_expansive_atom_asymptotics(theta):
    # a_n * n / (theta * t_n) -> 1 for decreasing expansive families
    spec = PowerTail(theta)
    n = 100_000
    val = spec.atom_float(n) * n / (theta * spec.tail_float(n))
    assert abs(val - 1.0) < 0.02


def test_atom_ratio_tends_to_rho():
    for n in (1, 5, 50):
        assert GEO.atom(n) / GEO.atom(n + 1) == 3
    r = PT_HALF.atom_float(100_000) / PT_HALF.atom_float(100_001)
    assert abs(r - 1.0) < 1e-4


# ------ spec parsing -------------------------------------------------------

def test_parse_named_and_json():
    assert parse_spec("harmonic").family == "harmonic"
    assert parse_spec('{"family": "dyadic"}').family == "dyadic"
    g = parse_spec('{"family": "geometric", "c": "2", "r": "1/3"}')
    assert g.backend == "exact"
    assert g.atom(2) == Fraction(2, 9)


def test_parse_rational_strings_select_exact_backend():
    e = parse_spec('{"family": "explicit", "prefix": ["1/2", "1/4"],'
                   ' "tail_family": {"family": "dyadic"}}')
    assert e.backend == "exact"
    assert e.atom(4) == Fraction(1, 16)


def test_parse_float_parameters():
    p = parse_spec('{"family": "power_atoms", "s": 3.0}')
    assert p.backend == "float"
    assert p.to_dict() == {"family": "power_atoms", "s": 3.0}


def test_parse_round_trip():
    for spec in (HARMONIC, GEO, PA3, PT_HALF, LPA12, EXPL):
        again = spec_from_dict(spec.to_dict())
        assert again.to_dict() == spec.to_dict()


def test_parse_errors():
    with pytest.raises(SpecParseError):
        parse_spec("no_such_family")
    with pytest.raises(SpecParseError):
        parse_spec('{"family": "power_atoms"}')           # missing s
    with pytest.raises(SpecParseError):
        parse_spec('{"family": "power_atoms", "s": 0.5}')  # needs s > 1
    with pytest.raises(SpecParseError):
        parse_spec('{"family": "geometric", "c": "3", "r": "1/3"}')  # mass != 1
    with pytest.raises(SpecParseError):
        spec_from_dict({"family": "explicit", "prefix": ["2/3", "1/2"],
                        "tail_family": {"family": "dyadic"}})
    with pytest.raises(SpecParseError):
        spec_from_dict({"family": "explicit", "prefix": [],
                        "tail_family": {"family": "dyadic"}})


def test_geometric_default_c_from_r():
    g = spec_from_dict({"family": "geometric", "r": "1/3"})
    assert g.atom(1) == Fraction(2, 3)
