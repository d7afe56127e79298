"""The ultra-discrete Toda lattice as a box-ball system.

Blocks Q_j of balls and gaps E_j evolve by a min-plus recursion; the same
step is Pitman's transformation of the block encoding, re-rooted at its first
local maximum.
"""

from fractions import Fraction

from boxball.toda import TodaState, integer_law_defect, iterate, toda_step_via_path

state = TodaState((3, 1, 2), (2, 4, Fraction(15, 2)), periodic=True)
for s in iterate(state, 6):
    print("Q =", [str(q) for q in s.Q], " E =", [str(e) for e in s.E])
    assert toda_step_via_path(s) == iterate(s, 1)[1]

print()
print("integer laws on (J, A, L) = (3, 5, 12), exact TV to their one-step image:")
print("  uniform compositions  :", integer_law_defect(3, 5, 12, "uniform"))
print("  equal-cell multinomial:", round(integer_law_defect(3, 5, 12, "multinomial"), 4))
