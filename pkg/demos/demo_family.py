"""The two-parameter family: volume k, lowest action level l.

A point (a, b) = (ln k^(1/2), ln l) of the admissible half-plane becomes
a tube form scaled by k^(1/2) whose twist amplitude is solved so the
certified lowest action equals l, while a compensating bump in a second
tube holds the total volume at exactly k.
"""

import math

from lutzlab import family

model = family.FamilyModel(ambient_floor_a=1.0, compensator_floor_b=1.0, n=2)
print(f"admissible ceiling: ln l < {model.eps_bound}")
print(f"base level L0 = {model.defaults.l_base:.8f} "
      "(the l-invariant of the unit-volume base form)")

spec = model.embed_point((0.0, math.log(model.defaults.l_base)))
print(f"\nbase point: k = {spec.k}, l = {spec.l:.8f}, "
      f"compensator amplitude = {spec.compensator.amplitude:+.2e}")

for (k, l) in [(1.0, 0.02), (4.0, 0.02), (1.0, 0.06), (4.0, 0.06)]:
    s = model.embed_point((math.log(k) / 2.0, math.log(l)))
    print(f"k = {k}, l = {l}: amplitude u = {s.u:.6f}, "
          f"volume = {s.total_volume():.12f}, "
          f"l recomputed = {s.l_invariant():.12f}, "
          f"bump = {s.compensator.amplitude:+.4f}, "
          f"certified = {s.certified}")

# scaling laws: volume multiplies by C^n, the action level by C
s = model.embed_point((0.05, math.log(0.04)))
for c in (0.5, 2.0, math.e):
    rep = family.scaling_check(s, c)
    print(f"C = {c:.4f}: volume x{rep.volume_ratio:.6f} "
          f"(expect {rep.volume_expected:.6f}), "
          f"l x{rep.l_ratio:.6f} -> {'ok' if rep.passed else 'FAIL'}")

print(f"\nsystolic ratio l^2/k at (k=4, l=0.02): "
      f"{family.systolic_ratio(model.embed_point((math.log(2.0), math.log(0.02)))):.3e}")

# the same construction one dimension up: volume now scales cubically
model3 = family.FamilyModel(1.0, 1.0, n=3)
s3 = model3.embed_point((0.05, math.log(0.04)))
rep3 = family.scaling_check(s3, 2.0)
print(f"n = 3, C = 2: volume x{rep3.volume_ratio:.6f} (expect 8)")
