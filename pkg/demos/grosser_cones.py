"""
Sampled cone sums can converge to a direction the exact sum misses.

G1 is generated by (-1, t, t^2), G2 by (1, t, t^2), t in [0, 1].  The sums
n(-1, 1/n, 1/n^2) + n(1, 1/n, 1/n^2) = (0, 2, 2/n) tend to (0, 2, 0), yet
(0, 2, 0) is not a non-negative combination of one generator from each
cone: the closure of G1 + G2 is larger than (G1 + G2) u G1 u G2.

    python demos/grosser_cones.py
"""
import numpy as np

from colwave import cones as cn

G1 = cn.Cone(dim=3, curves=[cn.GeneratorCurve(lambda t: np.array([-1.0, t, t * t]), (0.0, 1.0))])
G2 = cn.Cone(dim=3, curves=[cn.GeneratorCurve(lambda t: np.array([1.0, t, t * t]), (0.0, 1.0))])

for n in (10, 100, 1000):
    s = n * np.array([-1.0, 1 / n, 1 / n ** 2]) + n * np.array([1.0, 1 / n, 1 / n ** 2])
    ang = cn.angle_between(s, [0.0, 1.0, 0.0])
    print(f"n = {n:5d}: sum direction {np.round(s / np.linalg.norm(s), 6)}, angle to (0,1,0) {ang:.2e} rad")

print("0 in G1 + G2:", cn.zero_in_sum(G1, G2))
for xi in ([0.0, 2.0, 0.0], [0.0, 1.0, 0.25], [-2.0, 1.0, 0.5]):
    exact = any(G.angular_distance(xi) <= 1e-9 for G in (G1, G2)) or cn.exact_sum_member(G1, G2, xi)
    print(f"{xi} in (G1 + G2) u G1 u G2 (exact generators): {exact}")
