"""phi(l0) for q/p = 3/1 at e = 0.1 ... 0.8."""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from crtbp_resonance import ResonanceContext, phi

out = sys.argv[1] if len(sys.argv) > 1 else "figure3.svg"
x = np.linspace(0.0, 2 * np.pi, 400)
fig, ax = plt.subplots(figsize=(6, 4))
for e in np.arange(0.1, 0.81, 0.1):
    ax.plot(x, phi(ResonanceContext(1, 3, e), x), label=f"e = {e:.1f}")
ax.axhline(0.0, color="k", lw=0.5)
ax.set_xlabel("l0")
ax.legend(fontsize=7)
fig.savefig(out)
print(out)
