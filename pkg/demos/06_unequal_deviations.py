"""
Common mean, unequal spreads
============================

Gains N(2, sigma1^2) and N(2, sigma2^2).  Region III sits in the low-spread
corner; Region IV is the thin band where only an optimised gamma helps.
"""

from pathlib import Path

import numpy as np

from cfma import GaussHermite, export
from cfma.conditions import GammaGrid
from cfma.explorer import sweep_classify

out = Path(__file__).resolve().parent / "output"
out.mkdir(exist_ok=True)

spreads = np.linspace(0, 1.5, 25)
cells = sweep_classify({"sigma1": spreads, "sigma2": spreads}, grid=GammaGrid(n_points=256),
                       method=GaussHermite(32), fixed={"mu": 2.0})
header = ["sigma1", "sigma2"] + export.COLUMNS["sweep"]
rows = [[c.params["sigma1"], c.params["sigma2"], c.label, c.achievable, c.indeterminate,
         c.best_gamma, c.best_value, c.gamma0, c.gamma0_value, c.error or ""] for c in cells]
(out / "fig6_sweep.csv").write_text(export.to_csv("sweep", header, rows, {"template": "gaussian"}))

labels = np.array([c.label for c in cells]).reshape(len(spreads), len(spreads))
print({lab: int((labels == lab).sum()) for lab in ("RegionI", "RegionIII", "RegionIV")})
diag = [labels[i, i] for i in range(len(spreads))]
print("diagonal never RegionIV:", "RegionIV" not in diag)

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    code = {"RegionI": 0, "RegionIV": 1, "RegionIII": 2}
    fig, ax = plt.subplots(figsize=(5, 4.5))
    ax.pcolormesh(spreads, spreads, np.vectorize(code.get)(labels).T, shading="nearest",
                  cmap="viridis", vmin=0, vmax=2)
    ax.set_xlabel("sigma1")
    ax.set_ylabel("sigma2")
    ax.set_title("dark: I, mid: IV, light: III")
    fig.tight_layout()
    fig.savefig(out / "fig6.png", dpi=120)
