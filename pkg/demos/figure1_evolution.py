"""Evolve the 15-site configuration of the first evolution diagram and print it.

Balls move by the carrier rule: a carrier sweeps left to right, picks up every
ball and drops one at each empty site while it is loaded.
"""

from boxball import BinaryConfiguration, encode_path, evolve, pitman_transform
from boxball.harness.render import render_rows

row = BinaryConfiguration.from_string("|010111001000000")
rows = evolve(row, 2)
print(render_rows(rows, 1, 15))
for r in rows:
    print("occupied:", r.occupied())

# the same step through the path encoding: reflect S in its past maximum
S = encode_path(row)
print("S  :", S.values)
print("TS :", pitman_transform(S).values)
