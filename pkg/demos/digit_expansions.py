"""
Digit expansions and the two interval maps
==========================================
"""

from fractions import Fraction

from alphadyn import Harmonic, Dyadic
from alphadyn.dynamics import (
    assemble,
    convergent,
    expand,
    farey_code,
    farey_map,
    jump_time,
    luroth_map,
)
from alphadyn.simulate import demo_orbit

H = Harmonic()

# expand a rational against the harmonic partition; exact in, exact out
x = Fraction(2, 7)
word = expand(H, x, 8)
print(f"x = {x} has digits {list(word.digits)}")
print("reassembled head:", assemble(H, word.digits), "(a left endpoint of the"
      " depth-8 cylinder, so it sits at or below x)")

# convergents walk back toward x one digit at a time
for k in range(1, 6):
    print(f"  depth {k} convergent: {convergent(H, word, k)}")

# the fast map shifts one digit per step, the slow map crawls through
# jump_time(x) steps to do the same
print("jump time at x:", jump_time(H, x))
y = x
for _ in range(jump_time(H, x)):
    y = farey_map(H, y)
print("slow orbit lands on:", y, "   fast map in one step:", luroth_map(H, x))

# the slow map's binary itinerary: digit n becomes n-1 zeros and a one
code = farey_code(word, 20)
print("binary itinerary:", "".join(str(b) for b in code.bits))

# orbits are available in one call, and stay exact on rational input
print("fast orbit:", demo_orbit(H, x, 5, map_kind="luroth"))
print("slow orbit:", demo_orbit(Dyadic(), Fraction(5, 8), 5, map_kind="farey"))
