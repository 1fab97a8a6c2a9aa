"""Separatrix functions u (scaled by 0.1) and v for q/p = 3/1, e = 0.1."""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from crtbp_resonance import ResonanceContext, separatrix_expansion, u_of_l, v_of_l

out = sys.argv[1] if len(sys.argv) > 1 else "figure2.svg"
exp = separatrix_expansion(ResonanceContext(1, 3, 0.1))
x = np.linspace(0.0, exp.half_width, 400)
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(x, 0.1 * u_of_l(exp, x), label="0.1 u")
ax.plot(x, v_of_l(exp, x), label="v")
ax.set_xlabel("l - l_j")
ax.legend()
fig.savefig(out)
print(out)
