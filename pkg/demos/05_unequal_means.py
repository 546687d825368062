"""
Unequal means, common variance
==============================

Gains N(mu1, 0.25) and N(mu2, 0.25).  Each cell is labelled Region I (no
gamma works), III (gamma0 = mu1 / mu2 works) or IV (only a better gamma
works).  The same mesh is also run with standard deviation 0.25, the other
reading of the common spread.
"""

from pathlib import Path

import numpy as np

from cfma import GaussHermite, export
from cfma.conditions import GammaGrid
from cfma.explorer import sweep_classify

out = Path(__file__).resolve().parent / "output"
out.mkdir(exist_ok=True)

means = np.linspace(0.1, 5, 25)
grid = GammaGrid(n_points=256)
maps = {}
for name, fixed in (("variance", {"var": 0.25}), ("std", {"sigma": 0.25})):
    cells = sweep_classify({"mu1": means, "mu2": means}, grid=grid, method=GaussHermite(32),
                           fixed=fixed)
    header = ["mu1", "mu2"] + export.COLUMNS["sweep"]
    rows = [[c.params["mu1"], c.params["mu2"], c.label, c.achievable, c.indeterminate,
             c.best_gamma, c.best_value, c.gamma0, c.gamma0_value, c.error or ""] for c in cells]
    (out / f"fig5_sweep_{name}.csv").write_text(
        export.to_csv("sweep", header, rows, {"template": "gaussian"}))
    labels = np.array([c.label for c in cells]).reshape(len(means), len(means))
    counts = {lab: int((labels == lab).sum()) for lab in ("RegionI", "RegionIII", "RegionIV")}
    print(f"common {name} 0.25: {counts}")
    maps[name] = labels

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    code = {"RegionI": 0, "RegionIV": 1, "RegionIII": 2}
    fig, axes = plt.subplots(1, 2, figsize=(10, 4.5))
    for ax, (name, labels) in zip(axes, maps.items()):
        ax.pcolormesh(means, means, np.vectorize(code.get)(labels).T, shading="nearest",
                      cmap="viridis", vmin=0, vmax=2)
        ax.set_xlabel("mu1")
        ax.set_ylabel("mu2")
        ax.set_title(f"common {name} 0.25 (dark: I, mid: IV, light: III)")
    fig.tight_layout()
    fig.savefig(out / "fig5.png", dpi=120)
