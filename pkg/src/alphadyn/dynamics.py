"""The two interval maps, digit expansions, cylinders, and the jump identity.

Both maps act on [0, 1] and are driven by a PartitionSpec.  The slow map
climbs each point through the atoms one step at a time and has an
indifferent fixed point at 0; the fast map sends each atom onto the whole
interval in one stroke.  Iterating the fast map reads off the digit word of
a point; the slow map performs the corresponding odometer-like motion on
words.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Tuple, Union

from .partitions import DomainError, PartitionSpec, RangeError

Real = Union[Fraction, float]


@dataclass(frozen=True)
class DigitWord:
    """Digits of the alternating expansion x = t_l1 - a_l1 t_l2 + ...

    terminated is True when the expansion provably ends (the point is a
    finite alternating sum of tails), False when digits continue past the
    requested count, and "maybe" when a float residue became
    indistinguishable from 0.  exhausted marks a float expansion stopped
    because the tracked rounding error could have crossed an atom boundary;
    digits up to that point are certified.
    """

    digits: Tuple[int, ...]
    terminated: Union[bool, str] = False
    exhausted: bool = False

    def __post_init__(self):
        if any(d < 1 for d in self.digits):
            raise DomainError(f"digits must be >= 1, got {self.digits}")

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __getitem__(self, i):
        return self.digits[i]


@dataclass(frozen=True)
class FareyCode:
    """Binary coding: digit l contributes the block 0^(l-1) 1."""

    bits: str

    def __post_init__(self):
        if set(self.bits) - {"0", "1"}:
            raise DomainError(f"bits must be over 0/1, got {self.bits!r}")

    def __str__(self) -> str:
        return self.bits


@dataclass(frozen=True)
class Cylinder:
    word: DigitWord
    endpoints: Tuple[Real, Real]
    measure: Real


# ------ forward maps -------------------------------------------------------

def _use_exact(spec: PartitionSpec, x) -> bool:
    return spec.backend == "exact" and isinstance(x, (Fraction, int))


def _check_unit(x) -> None:
    if not 0 <= x <= 1:
        raise DomainError(f"map input must lie in [0, 1], got {x}")


def farey_map(spec: PartitionSpec, x: Real) -> Real:
    """Slow map: atom 1 tops out to (1-x)/a_1, atom n slides onto atom n-1."""
    _check_unit(x)
    if x == 0:
        return x
    if _use_exact(spec, x):
        n = spec.locate(x)
        if n == 1:
            return (1 - x) / spec.atom(1)
        return (spec.atom(n - 1) * (x - spec.tail(n + 1))) / spec.atom(n) \
            + spec.tail(n)
    x = float(x)
    n = spec.locate(x)
    if n == 1:
        return (1.0 - x) / spec.atom_float(1)
    return (spec.atom_float(n - 1) * (x - spec.tail_float(n + 1))
            ) / spec.atom_float(n) + spec.tail_float(n)


def luroth_map(spec: PartitionSpec, x: Real) -> Real:
    """Fast map: atom n is flipped affinely onto [0, 1)."""
    _check_unit(x)
    if x == 0:
        return x
    if _use_exact(spec, x):
        n = spec.locate(x)
        return (spec.tail(n) - x) / spec.atom(n)
    x = float(x)
    n = spec.locate(x)
    return (spec.tail_float(n) - x) / spec.atom_float(n)


# ------ inverse branches ---------------------------------------------------

def inverse_branch_farey(spec: PartitionSpec, branch: int, x: Real) -> Real:
    """Right inverse of the slow map: branch 1 lands in atom 1, branch 0
    pushes atom n down onto atom n+1 (and fixes 0)."""
    _check_unit(x)
    if branch == 1:
        if _use_exact(spec, x):
            return 1 - spec.atom(1) * x
        return 1.0 - spec.atom_float(1) * float(x)
    if branch != 0:
        raise DomainError(f"branch must be 0 or 1, got {branch}")
    if x == 0:
        return x
    if _use_exact(spec, x):
        n = spec.locate(x)
        return (spec.atom(n + 1) * (x - spec.tail(n + 1))) / spec.atom(n) \
            + spec.tail(n + 2)
    x = float(x)
    n = spec.locate(x)
    return (spec.atom_float(n + 1) * (x - spec.tail_float(n + 1))
            ) / spec.atom_float(n) + spec.tail_float(n + 2)


def inverse_branch_luroth(spec: PartitionSpec, n: int, x: Real) -> Real:
    """Right inverse of the fast map landing in atom n: t_n - a_n x."""
    _check_unit(x)
    if n < 1:
        raise DomainError(f"branch index must be >= 1, got {n}")
    if _use_exact(spec, x):
        return spec.tail(n) - spec.atom(n) * x
    return spec.tail_float(n) - spec.atom_float(n) * float(x)


# ------ digit expansion ----------------------------------------------------

def expand(spec: PartitionSpec, x: Real, max_digits: int) -> DigitWord:
    """First digits of x, certified.

    Exact backend iterates the fast map in rationals and recognises
    termination by hitting 0.  The float backend extracts each digit by
    locate on the current residue and tracks a rounding-error bound; it
    stops with exhausted=True before a digit could be wrong, and flags
    terminated="maybe" once the residue is within the bound of 0.
    """
    if not 0 < x <= 1:
        raise DomainError(f"expand needs 0 < x <= 1, got {x}")
    if max_digits < 1:
        raise DomainError(f"max_digits must be >= 1, got {max_digits}")
    if _use_exact(spec, x):
        x = Fraction(x)
        digits = []
        for _ in range(max_digits):
            n = spec.locate(x)
            digits.append(n)
            x = (spec.tail(n) - x) / spec.atom(n)
            if x == 0:
                return DigitWord(tuple(digits), terminated=True)
        return DigitWord(tuple(digits), terminated=False)
    return _expand_float(spec, float(x), max_digits)


def _expand_float(spec: PartitionSpec, x: float, max_digits: int) -> DigitWord:
    digits = []
    err = 0.0                       # the input float itself is taken as exact
    for _ in range(max_digits):
        if x <= err:
            return DigitWord(tuple(digits),
                             terminated=True if (x == 0.0 and err == 0.0)
                             else "maybe")
        try:
            n = spec.locate(x)
        except RangeError:
            # digit would not fit the int64 convention; stop honestly
            return DigitWord(tuple(digits), exhausted=True)
        t_n = spec.tail_float(n)
        if err > 0.0:
            # the digit is certified only if the whole uncertainty interval
            # sits inside the located atom
            if x + err > t_n or x - err <= spec.tail_float(n + 1):
                return DigitWord(tuple(digits), exhausted=True)
        digits.append(n)
        a_n = spec.atom_float(n)
        num_err = err + math.ulp(t_n)
        x = (t_n - x) / a_n
        err = num_err / a_n + 2.0 * math.ulp(x) if x else num_err / a_n
    return DigitWord(tuple(digits), terminated=False)


def assemble(spec: PartitionSpec, word: Union[DigitWord, Sequence[int]]) -> Real:
    """Value of a finite word: t_l1 - a_l1 t_l2 + a_l1 a_l2 t_l3 - ...

    For a truncated infinite word the result is within prod_i a_li of the
    true point.
    """
    digits = tuple(word)
    if not digits:
        raise DomainError("assemble needs at least one digit")
    if spec.backend == "exact":
        acc = Fraction(0)
        prod = Fraction(1)
        for i, d in enumerate(digits):
            acc += (-1) ** i * prod * spec.tail(d)
            prod *= spec.atom(d)
        return acc
    terms = []
    prod = 1.0
    for i, d in enumerate(digits):
        terms.append((-1) ** i * prod * spec.tail_float(d))
        prod *= spec.atom_float(d)
    return math.fsum(terms)


def convergent(spec: PartitionSpec, word: Union[DigitWord, Sequence[int]],
               k: int) -> Real:
    """Assembly of the first k digits."""
    digits = tuple(word)
    if not 1 <= k <= len(digits):
        raise DomainError(f"need 1 <= k <= {len(digits)}, got k={k}")
    return assemble(spec, digits[:k])


# ------ jump transformation ------------------------------------------------

def jump_time(spec: PartitionSpec, x: Real) -> int:
    """Steps of the slow map needed to reach and leave atom 1.

    Equals the first digit of x: the slow map moves atom n to atom n-1.
    """
    if x == 0:
        raise DomainError("jump time is undefined at the fixed point 0")
    _check_unit(x)
    return spec.locate(x)


def jump_identity_check(spec: PartitionSpec, x: Real,
                        tol: float = 1e-12) -> bool:
    """Composing the slow map jump_time(x) times reproduces the fast map."""
    rho = jump_time(spec, x)
    y = x
    for _ in range(rho):
        y = farey_map(spec, y)
    z = luroth_map(spec, x)
    if _use_exact(spec, x):
        return y == z
    return abs(float(y) - float(z)) <= tol


# ------ symbolic coding ----------------------------------------------------

def farey_code(word: Union[DigitWord, Sequence[int]], max_bits: int) -> FareyCode:
    """Bits of the word: each digit l becomes the block 0^(l-1) 1."""
    if max_bits < 0:
        raise DomainError(f"max_bits must be >= 0, got {max_bits}")
    out = []
    total = 0
    for d in word:
        block = "0" * (d - 1) + "1"
        if total + len(block) >= max_bits:
            out.append(block[:max_bits - total])
            total = max_bits
            break
        out.append(block)
        total += len(block)
    return FareyCode("".join(out))


def farey_shift(word: DigitWord) -> DigitWord:
    """Action of the slow map on words: decrement the first digit, or drop
    it when it is already 1."""
    if not word.digits:
        raise DomainError("cannot shift an empty word")
    first, rest = word.digits[0], word.digits[1:]
    if first == 1:
        return DigitWord(rest, word.terminated, word.exhausted)
    return DigitWord((first - 1,) + rest, word.terminated, word.exhausted)


def cylinder(spec: PartitionSpec, word: Union[DigitWord, Sequence[int]]) -> Cylinder:
    """Closure of the set of points opening with the given digits.

    One endpoint is the word itself; the other is its sibling with the last
    digit bumped, which side being which depends on the parity of the length.
    """
    digits = tuple(word)
    if not digits:
        raise DomainError("cylinder needs at least one digit")
    sibling = digits[:-1] + (digits[-1] + 1,)
    a = assemble(spec, digits)
    b = assemble(spec, sibling)
    lo, hi = (a, b) if a <= b else (b, a)
    if spec.backend == "exact":
        measure = Fraction(1)
        for d in digits:
            measure *= spec.atom(d)
    else:
        measure = math.exp(math.fsum(spec.log_atom(d) for d in digits))
    if not isinstance(word, DigitWord):
        word = DigitWord(digits, terminated=False)
    return Cylinder(word, (lo, hi), measure)
