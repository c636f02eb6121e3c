"""
How the estimator tells a singular direction from a regular one.

The 1-D delta is represented by phi_eps(x) = phi(x/eps)/eps.  Localized at
0, its Fourier transform is phi_hat(eps lambda): flat up to lambda ~ 1/eps,
so no single power of (1 + lambda) bounds it uniformly in eps.  Localized
at 0.5 the window never meets the support and the transform vanishes.
The smooth bump decays at every eps with the same constant.

    python demos/delta_decay.py
"""
import numpy as np

from colwave.config import estimator_params, load_config
from colwave.mollify import build_mollifier, scaled_tensor, smooth_bump
from colwave.spectral import CutoffWindow
from colwave.wavefront import sigma_g, sigma_g_at

cfg = load_config(None, "smoke")
P = estimator_params(cfg, "delta")
phi = build_mollifier(1.0, 0)
delta = scaled_tensor(phi, 1)

w = CutoffWindow.around((0.0,), 0.5, P.plateau, P.window_alpha)
_, res = sigma_g(delta, w, P, keep_table=True)
lams = P.lambdas()
print("|F(psi u_eps)(lambda)| along +1 at x0 = 0")
print("  eps \\ lambda " + " ".join(f"{l:9.0f}" for l in lams[::4]))
for j, e in enumerate(P.eps):
    print(f"  2^{int(np.log2(e)):4d}      " + " ".join(f"{v:9.2e}" for v in res.table[0, j, ::4]))

for name, F, x0 in [("delta", delta, 0.0), ("delta", delta, 0.5), ("bump", smooth_bump(0.0, 0.3), 0.0)]:
    p = sigma_g_at(F, (x0,), estimator_params(cfg, "delta" if name == "delta" else "bump"))
    fits = ", ".join(f"p={f.p_hat:.2f} N={f.N_hat:.2f}" for f in p.fits)
    print(f"{name:5s} at {x0:4.1f}: verdicts {p.verdicts}  ({fits})")
