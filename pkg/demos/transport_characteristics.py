"""
Characteristic directions of d_t + a d_x with an oscillating coefficient.

a_eps alternates between 0 and 1 on dyadic scales.  Its limit points are
B = {0, 1}, and the operator fails to be elliptic exactly along
tau + b xi = 0 for b in B.  The transported delta U(x, t) = delta(x - a t)
is singular along both lines x = 0 and x = t at the origin, and only along
the line through the point elsewhere on them.

    python demos/transport_characteristics.py
"""
import numpy as np

from colwave.mollify import oscillating_constant
from colwave.operations import FirstOrderOperator, char_set, limit_points

a = oscillating_constant(0.0, 1.0, "dyadic-alternating")
print("limit points:", limit_points(a).to_dict())
res = char_set(FirstOrderOperator(a))
ang = np.rad2deg(np.arctan2(res.directions[:, 1], res.directions[:, 0]))
print("characteristic bins (deg):", sorted(np.round(ang[res.characteristic], 1).tolist()))
i = int(np.argmin(np.abs(ang - 30.0)))
print(f"lower bound C at {ang[i]:.0f} deg: {res.C[i]:.3f} (non-characteristic)")
print("run `colwave run ex2_2` for the estimated wave front set along S (about 1.5 min)")
