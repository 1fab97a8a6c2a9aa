"""phi on one period for q/p = 1/3 and 1/7 across the onset of asymmetric librations."""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from crtbp_resonance import ResonanceContext, phi

out = sys.argv[1] if len(sys.argv) > 1 else "figure4.svg"
fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for ax, p, es in zip(axes, (3, 7), ((0.08, 0.12, 0.16), (0.30, 0.36, 0.40))):
    x = np.linspace(0.0, 2 * np.pi / p, 400)
    for e in es:
        ax.plot(x, phi(ResonanceContext(p, 1, e), x), label=f"e = {e:.2f}")
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_title(f"q/p = 1/{p}")
    ax.set_xlabel("l0")
    ax.legend()
fig.savefig(out)
print(out)
