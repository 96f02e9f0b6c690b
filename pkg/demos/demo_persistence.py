"""Action-filtered DG-algebra barcodes over exact rationals.

The unit's bar ends at the lowest action of its primitive; by the product
rule that level bounds every other finite bar, so the unit's bar is the
longest.  A dense row-reduction oracle recomputes every barcode for an
independent check.
"""

import math

import numpy as np

from lutzlab import persistence as ps

# the minimal vanishing example: dx = 1 at action 3, y closed at action 5
dga = ps.FilteredDGA(
    [ps.Generator("x", 1, 3.0), ps.Generator("y", 1, 5.0)],
    {"x": [(1, [])]}, action_cap=10.0, word_cap=4)

print("basis in filtration order:",
      [dga.word_name(w) for w in dga.basis()])
print("d(x*y) =", {dga.word_name(w): str(c)
                   for w, c in ps.boundary(dga, {('x', 'y'): 1}).items()})

level = ps.unit_vanishing_level(dga)
print(f"unit vanishing level = {level}")
print(f"product bound for y: death <= {ps.leibniz_upper_bound(dga, ['y'])}")

bars = ps.barcode(dga)
for bar in bars.bars:
    death = "inf" if math.isinf(bar.death) else f"{bar.death}"
    print(f"  bar {bar.label}: [{bar.birth}, {death})")

oracle = ps.brute_force_oracle(dga)
print("dense oracle agrees:", bars.bars == oracle.bars)

# a zero differential models a tight form: nothing ever dies
tight = ps.FilteredDGA([ps.Generator("w", 0, 2.0)], {}, 10.0, 4)
print("\nzero differential:",
      [(b.label, b.birth, b.death) for b in ps.barcode(tight).bars])

# randomized cross-validation
rng = np.random.default_rng(7)
checked = 0
for _ in range(25):
    d = ps.random_admissible_dga(rng)
    assert ps.barcode(d).bars == ps.brute_force_oracle(d).bars
    lvl = ps.unit_vanishing_level(d)
    if not math.isinf(lvl):
        longest = max(b.length for b in ps.barcode(d).finite_bars())
        assert abs(longest - lvl) < 1e-12
        checked += 1
print(f"\n25 random algebras match the oracle; {checked} finite-level "
      "cases confirm the unit bar is the longest")

bars.to_csv("barcode_demo.csv")
print("wrote barcode_demo.csv")
