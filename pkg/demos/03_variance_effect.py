"""
Growing uncertainty in the gains
================================

Mean 2 for both users and standard deviation 0, 0.5, 0.75 and 0.85.  The
fixed channel reaches the whole dominant face; as sigma grows the traced
rate pairs pull away from it, and at sigma = 0.85 no gamma reaches the sum
capacity at all.
"""

from pathlib import Path

import numpy as np

from cfma import ChannelModel, export
from cfma.conditions import minimum_condition
from cfma.explorer import trace_region

out = Path(__file__).resolve().parent / "output"
out.mkdir(exist_ok=True)

sigmas = [0.0, 0.5, 0.75, 0.85]
gammas = np.geomspace(0.05, 20, 801)
coeffs = [((1, 1), (0, 1)), ((1, 1), (1, 0))]
traces = {}
for sigma in sigmas:
    model = ChannelModel.gaussian(2, sigma ** 2)
    trace = trace_region(model, coeffs, gammas)
    g, v, _ = minimum_condition(model)
    c1, c2, cs = trace.bounds
    print(f"sigma={sigma:4.2f}: Csum={cs:.5f}  best sum rate={trace.max_sum_rate:.5f}  "
          f"min exact test {v:+.4f} at gamma={g:.4f}")
    rows = [[p.R1, p.R2, p.gamma, p.coeffs, p.valid] for p in trace.points]
    (out / f"fig3_region_sigma{sigma:.2f}.csv").write_text(
        export.to_csv("region", export.COLUMNS["region"], rows,
                      {"pentagon": f"C1={c1:.9g},C2={c2:.9g},Csum={cs:.9g}"}))
    traces[sigma] = trace

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, axes = plt.subplots(1, len(sigmas), figsize=(16, 4), sharey=True)
    for ax, sigma in zip(axes, sigmas):
        trace = traces[sigma]
        c1, c2, cs = trace.bounds
        ax.plot([0, cs - c2, c1, c1], [c2, c2, cs - c1, 0], color="tab:blue")
        pts = np.array([(p.R1, p.R2) for p in trace.points])
        ax.plot(pts[:, 0], pts[:, 1], ".", ms=2, color="tab:red")
        ax.set_title(f"sigma = {sigma}")
        ax.set_xlabel("R1 [bits]")
    axes[0].set_ylabel("R2 [bits]")
    fig.tight_layout()
    fig.savefig(out / "fig3.png", dpi=120)
