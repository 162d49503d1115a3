"""Forward maps, inverse branches, digit words, cylinders, jump identity."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from alphadyn import (
    DigitWord,
    DomainError,
    Dyadic,
    Explicit,
    Geometric,
    Harmonic,
    PowerTail,
    assemble,
    convergent,
    cylinder,
    expand,
    farey_code,
    farey_map,
    farey_shift,
    inverse_branch_farey,
    inverse_branch_luroth,
    jump_identity_check,
    jump_time,
    luroth_map,
)

HARMONIC = Harmonic()
DYADIC = Dyadic()
GEO = Geometric(Fraction(2), Fraction(1, 3))
EXPL = Explicit([Fraction(1, 2), Fraction(1, 4)], Dyadic())
PT_HALF = PowerTail(0.5)

EXACT_FAMILIES = [
    pytest.param(HARMONIC, id="harmonic"),
    pytest.param(DYADIC, id="dyadic"),
    pytest.param(GEO, id="geometric"),
    pytest.param(EXPL, id="explicit"),
]


def random_rationals(count, seed, max_den=5000):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        q = rng.randint(2, max_den)
        p = rng.randint(1, q)
        out.append(Fraction(p, q))
    return out


# ------ forward maps -------------------------------------------------------

def test_farey_map_values():
    assert farey_map(DYADIC, 0.3) == pytest.approx(0.6, abs=1e-15)
    assert farey_map(HARMONIC, Fraction(3, 4)) == Fraction(1, 2)
    assert farey_map(HARMONIC, 0) == 0
    assert farey_map(DYADIC, Fraction(0)) == 0


def test_farey_map_is_tent_for_dyadic():
    for x in (0.1, 0.25, 0.49, 0.5):
        assert farey_map(DYADIC, x) == pytest.approx(2 * x, abs=1e-14)
    for x in (0.51, 0.7, 1.0):
        assert farey_map(DYADIC, x) == pytest.approx(2 - 2 * x, abs=1e-14)


def test_luroth_map_values():
    assert luroth_map(HARMONIC, Fraction(1, 2)) == 0
    assert luroth_map(HARMONIC, Fraction(3, 4)) == Fraction(1, 2)
    assert luroth_map(DYADIC, 0.3) == pytest.approx(0.8, abs=1e-15)


def test_map_domain():
    with pytest.raises(DomainError):
        farey_map(HARMONIC, 1.5)
    with pytest.raises(DomainError):
        luroth_map(HARMONIC, -0.1)


# ------ inverse branches ---------------------------------------------------

def test_inverse_branch_values():
    assert inverse_branch_farey(HARMONIC, 1, Fraction(0)) == 1
    assert inverse_branch_luroth(HARMONIC, 3, Fraction(0)) == Fraction(1, 3)
    assert inverse_branch_farey(DYADIC, 0, Fraction(1)) == Fraction(1, 2)


@pytest.mark.parametrize("spec", EXACT_FAMILIES)
def test_farey_branches_are_right_inverses(spec):
    for x in random_rationals(60, seed=1):
        assert farey_map(spec, inverse_branch_farey(spec, 1, x)) == x
        assert farey_map(spec, inverse_branch_farey(spec, 0, x)) == x


@pytest.mark.parametrize("spec", EXACT_FAMILIES)
def test_luroth_branches_are_right_inverses(spec):
    for x in random_rationals(40, seed=2):
        if x == 1:
            continue  # t_n - a_n lands on the next atom's boundary
        for n in (1, 2, 5, 17):
            assert luroth_map(spec, inverse_branch_luroth(spec, n, x)) == x


def test_inverse_branches_float():
    x = 0.375
    y = inverse_branch_farey(PT_HALF, 0, x)
    assert farey_map(PT_HALF, y) == pytest.approx(x, abs=1e-13)
    z = inverse_branch_luroth(PT_HALF, 4, x)
    assert luroth_map(PT_HALF, z) == pytest.approx(x, abs=1e-13)


# ------ expansion and assembly ---------------------------------------------

def test_expand_examples():
    w = expand(HARMONIC, Fraction(1, 2), 10)
    assert w.digits == (2,) and w.terminated is True
    w = expand(HARMONIC, Fraction(3, 4), 10)
    assert w.digits == (1, 2) and w.terminated is True
    w = expand(DYADIC, Fraction(1), 10)
    assert w.digits == (1,) and w.terminated is True


def test_expand_truncates_irrationals():
    w = expand(HARMONIC, Fraction(355, 1130), 8)
    assert len(w.digits) == 8 or w.terminated is True


def test_assemble_examples():
    assert assemble(HARMONIC, [1, 2]) == Fraction(3, 4)
    assert assemble(HARMONIC, [1, 1, 1]) == Fraction(3, 4)
    assert assemble(HARMONIC, [1]) == 1
    assert assemble(DYADIC, [1]) == 1


def test_convergent_examples():
    assert convergent(HARMONIC, [2, 2, 2], 1) == Fraction(1, 2)
    assert convergent(HARMONIC, [1, 2], 2) == Fraction(3, 4)
    with pytest.raises(DomainError):
        convergent(HARMONIC, [1, 2], 3)


@pytest.mark.parametrize("spec", EXACT_FAMILIES)
def test_expand_assemble_round_trip(spec):
    for x in random_rationals(40, seed=3):
        w = expand(spec, x, 25)
        if w.terminated is True:
            assert assemble(spec, w) == x
        else:
            r = assemble(spec, w)
            bound = Fraction(1)
            for d in w.digits:
                bound *= spec.atom(d)
            assert abs(x - r) <= bound


@pytest.mark.parametrize("spec", EXACT_FAMILIES)
def test_convergent_error_bound(spec):
    for x in random_rationals(15, seed=4):
        w = expand(spec, x, 20)
        bound = Fraction(1)
        for k in range(1, len(w.digits) + 1):
            bound *= spec.atom(w.digits[k - 1])
            assert abs(x - convergent(spec, w, k)) <= bound


@pytest.mark.parametrize("spec", EXACT_FAMILIES)
def test_shift_identity(spec):
    for x in random_rationals(250, seed=5):
        w = expand(spec, x, 12)
        y = luroth_map(spec, x)
        if y == 0:
            assert w.terminated is True and len(w.digits) == 1
            continue
        shifted = expand(spec, y, 11)
        assert shifted.digits == w.digits[1:len(shifted.digits) + 1]


def test_double_expansion_identity():
    rng = random.Random(6)
    for _ in range(200):
        word = [rng.randint(1, 9) for _ in range(rng.randint(1, 6))]
        bumped = word[:-1] + [word[-1] + 1]
        assert assemble(HARMONIC, word + [1]) == assemble(HARMONIC, bumped)
        assert assemble(GEO, word + [1]) == assemble(GEO, bumped)


def test_locate_assemble_first_digit():
    # canonical words only: [d, 1] collapses to the boundary value of [d+1],
    # which the right-closed convention assigns to atom d+1
    def compositions(total):
        if total == 0:
            yield ()
            return
        for first in range(1, total + 1):
            for rest in compositions(total - first):
                yield (first,) + rest

    for m in range(1, 13):
        for word in compositions(m):
            if len(word) > 1 and word[-1] == 1:
                continue
            x = assemble(HARMONIC, word)
            assert HARMONIC.locate(x) == word[0]
    rng = random.Random(7)
    for _ in range(300):
        word = []
        budget = 20
        while budget > 0 and (not word or rng.random() < 0.7):
            d = rng.randint(1, budget)
            word.append(d)
            budget -= d
        if len(word) > 1 and word[-1] == 1:
            word[-1] = 2 if budget == 0 else word[-1] + 1
        x = assemble(DYADIC, word)
        assert DYADIC.locate(x) == word[0]


def test_expand_float_digits_are_honest():
    # float digits must be a prefix of the exact expansion
    for x in random_rationals(80, seed=8, max_den=997):
        exact = expand(HARMONIC, x, 30)
        approx = expand(HARMONIC.with_backend("float"), float(x), 30)
        k = len(approx.digits)
        assert approx.digits == exact.digits[:k]
        if not approx.exhausted and approx.terminated is False:
            assert k == 30


def test_expand_float_flags():
    w = expand(HARMONIC.with_backend("float"), 0.5, 5)
    assert w.digits == (2,)
    assert w.terminated in (True, "maybe")
    w = expand(PT_HALF, 0.717, 40)
    assert w.digits  # at least one certified digit
    assert w.terminated is not True  # float backend cannot certify rationality


# ------ jump transformation ------------------------------------------------

def test_jump_time_examples():
    assert jump_time(HARMONIC, 0.9) == 1
    assert jump_time(HARMONIC, Fraction(1, 3)) == 3
    assert jump_time(DYADIC, 0.3) == 2
    with pytest.raises(DomainError):
        jump_time(HARMONIC, 0)


@pytest.mark.parametrize("spec", EXACT_FAMILIES)
def test_jump_time_counts_slow_map_steps(spec):
    # oracle: iterate the slow map until atom 1 is reached, then one more
    for x in random_rationals(30, seed=9, max_den=300):
        rho = jump_time(spec, x)
        y = x
        steps = 0
        while spec.locate(y) != 1:
            y = farey_map(spec, y)
            steps += 1
        assert steps + 1 == rho


def test_jump_identity_examples():
    assert jump_identity_check(HARMONIC, Fraction(3, 4))
    assert jump_identity_check(DYADIC, 0.3)
    assert jump_identity_check(GEO, Fraction(1, 5))


@pytest.mark.parametrize("spec", EXACT_FAMILIES)
def test_jump_identity_random_exact(spec):
    for x in random_rationals(250, seed=10):
        assert jump_identity_check(spec, x)


def test_jump_identity_random_float():
    # the composed slow map has slope 1/a_l1 on the first cylinder, which
    # amplifies rounding; x >= 0.1 keeps that below ~2e3 and the drift well
    # inside the 1e-12 tolerance
    rng = random.Random(11)
    for _ in range(250):
        x = rng.uniform(0.1, 1.0)
        assert jump_identity_check(PT_HALF, x, tol=1e-12)


# ------ coding -------------------------------------------------------------

def test_farey_code_example():
    assert farey_code([2, 1], 3).bits == "011"
    assert farey_code([3, 2], 10).bits == "00101"
    assert farey_code([1, 1, 1], 2).bits == "11"


def test_farey_shift():
    w = DigitWord((3, 2))
    assert farey_shift(w).digits == (2, 2)
    assert farey_shift(DigitWord((1, 5))).digits == (5,)


def test_farey_shift_matches_map_on_words():
    rng = random.Random(12)
    for _ in range(100):
        word = [rng.randint(1, 8) for _ in range(rng.randint(2, 6))]
        x = assemble(HARMONIC, word)
        shifted = farey_shift(DigitWord(tuple(word)))
        assert assemble(HARMONIC, shifted.digits) == farey_map(HARMONIC, x)


def test_digit_word_validation():
    with pytest.raises(DomainError):
        DigitWord((0, 2))


# ------ cylinders ----------------------------------------------------------

def test_cylinder_examples():
    c = cylinder(HARMONIC, [1])
    assert c.measure == Fraction(1, 2)
    assert c.endpoints == (Fraction(1, 2), Fraction(1, 1))
    c = cylinder(HARMONIC, [1, 2])
    assert c.measure == Fraction(1, 12)
    assert c.endpoints == (Fraction(3, 4), Fraction(5, 6))
    c = cylinder(DYADIC, [1, 1, 1])
    assert c.measure == Fraction(1, 8)


def test_cylinder_contains_its_points():
    rng = random.Random(13)
    for _ in range(60):
        word = tuple(rng.randint(1, 6) for _ in range(rng.randint(1, 5)))
        c = cylinder(HARMONIC, word)
        # any extension of the word assembles inside the cylinder
        inner = assemble(HARMONIC, word + (rng.randint(1, 9), rng.randint(1, 9)))
        assert c.endpoints[0] <= inner <= c.endpoints[1]


def _farey_cell(spec, bits):
    """Endpoints and measure of the set of points whose coding starts bits."""
    word = []
    run = 0
    for b in bits:
        if b == "0":
            run += 1
        else:
            word.append(run + 1)
            run = 0
    prod = Fraction(1)
    for d in word:
        prod *= spec.atom(d)
    measure = prod * spec.tail(run + 1)
    if word:
        a = assemble(spec, word)
        b_ = assemble(spec, word + [run + 1])
        lo, hi = (a, b_) if a <= b_ else (b_, a)
    else:
        lo, hi = Fraction(0), spec.tail(run + 1)
    return lo, hi, measure


@pytest.mark.parametrize("spec", [pytest.param(HARMONIC, id="harmonic"),
                                  pytest.param(GEO, id="geometric")])
@pytest.mark.parametrize("level", [1, 2, 5, 9])
def test_farey_cells_tile_unit_interval(spec, level):
    cells = [_farey_cell(spec, format(i, f"0{level}b"))
             for i in range(2 ** level)]
    assert sum(m for _, _, m in cells) == 1
    cells.sort()
    assert cells[0][0] == 0
    assert cells[-1][1] == 1
    for (_, hi, _), (lo, _, _) in zip(cells, cells[1:]):
        assert hi == lo
    assert sum(hi - lo for lo, hi, _ in cells) == 1
