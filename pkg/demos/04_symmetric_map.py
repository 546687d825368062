"""
Where do i.i.d. Gaussian gains reach the sum capacity?
======================================================

Classify a (mu, sigma) mesh for i.i.d. gains, then trace the boundary
variance sigma^2*(mu) -- the largest variance for which some gamma still
achieves the sum capacity -- to compare it with the line sigma^2 = 2 mu.
By symmetry the boundary test is the one at gamma = 1.
"""

from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from cfma import ChannelModel, GaussHermite, export
from cfma.conditions import condition_iff
from cfma.explorer import sweep_classify

out = Path(__file__).resolve().parent / "output"
out.mkdir(exist_ok=True)

mus = np.linspace(1, 20, 20)
sigmas = np.linspace(0, np.sqrt(60), 20)
cells = sweep_classify({"mu": mus, "sigma": sigmas}, method=GaussHermite(32))
header = ["mu", "sigma"] + export.COLUMNS["sweep"]
rows = [[c.params["mu"], c.params["sigma"], c.label, c.achievable, c.indeterminate,
         c.best_gamma, c.best_value, c.gamma0, c.gamma0_value, c.error or ""] for c in cells]
(out / "fig4_sweep.csv").write_text(export.to_csv("sweep", header, rows, {"template": "gaussian"}))

labels = np.array([c.label for c in cells]).reshape(len(mus), len(sigmas))
for mu, row in zip(mus, labels):
    print(f"mu={mu:5.1f} " + "".join("#" if lab == "RegionI" else "." for lab in row))


def boundary_variance(mu):
    g = lambda var: condition_iff(ChannelModel.gaussian(mu, var), 1.0, GaussHermite(64)).value.value
    return brentq(g, 1e-6, 10 * mu + 10, xtol=1e-8)


asym_mu = np.array([1.5, 2, 3, 5, 10, 20, 30, 50])
asym_var = np.array([boundary_variance(m) for m in asym_mu])
for m, v in zip(asym_mu, asym_var):
    print(f"mu={m:5.1f}: boundary sigma^2 = {v:8.4f}  (ratio to mu {v / m:.3f})")
(out / "fig4_boundary.csv").write_text(
    export.to_csv("boundary", ["mu", "boundary_var", "ratio"],
                  [[m, v, v / m] for m, v in zip(asym_mu, asym_var)]))

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4.5))
    left.pcolormesh(sigmas, mus, (labels == "RegionI").astype(float), cmap="coolwarm",
                    shading="nearest")
    left.set_xlabel("sigma")
    left.set_ylabel("mu")
    left.set_title("red: Region I, blue: Region II")
    right.plot(asym_mu, asym_var, "o-", label="boundary variance")
    right.plot(asym_mu, 2 * asym_mu, "--", label="2 mu")
    right.set_xlabel("mu")
    right.set_ylabel("sigma^2")
    right.legend()
    fig.tight_layout()
    fig.savefig(out / "fig4.png", dpi=120)
