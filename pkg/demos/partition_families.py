"""
Tour of the built-in partition families
=======================================

Every family hands out the same three ingredients: atoms a_n, tails t_n,
and a classification of how fast the tails die off.
"""

from fractions import Fraction

from alphadyn import Dyadic, Geometric, Harmonic, LogPowerAtoms, PowerAtoms, PowerTail

families = [
    Harmonic(),
    Dyadic(),
    Geometric(Fraction(2), Fraction(1, 3)),
    PowerAtoms(3.0),
    PowerAtoms(1.25),
    LogPowerAtoms(12, 5),
    PowerTail(0.5),
]

for spec in families:
    cl = spec.classify()
    print(f"{spec!r}")
    print(f"  type = {cl.type_class}, tails {cl.tail_kind}, rho = {cl.rho}")
    print("  a_1..a_5 =", ", ".join(str(spec.atom(n)) for n in range(1, 6)))
    print("  t_1..t_5 =", ", ".join(str(spec.tail(n)) for n in range(1, 6)))
    total = spec.tail_sum_total()
    print(f"  sum of tails = {total}")
    print()

# the rational families do exact arithmetic; atom = tail difference holds on
# the nose, not just to rounding
h = Harmonic()
assert h.atom(17) == h.tail(17) - h.tail(18)
print("harmonic atom(17) is exactly t_17 - t_18:", h.atom(17))

# float-only families still expose tight error control
p3 = PowerAtoms(3.0)
partial, remainder = p3.partial_tail_sum(1000)
print(f"cubic-atom tail mass through n = 1000: {partial:.12f} "
      f"(+ at most {remainder:.3e} beyond)")

# and a divergent family reports its partial mass with no remainder bound,
# because there is none to give
pt = PowerTail(0.5)
partial, remainder = pt.partial_tail_sum(1000)
print(f"power-tail partial mass through n = 1000: {partial:.3f}, "
      f"remainder bound = {remainder} (the total is inf(sym))")
