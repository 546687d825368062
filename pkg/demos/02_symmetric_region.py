"""
Rate region for i.i.d. gains N(2, 0.25)
=======================================

Both users see the same Gaussian gain law.  With a = (1, 1) and b either
unit vector, sweeping the scaling ratio gamma traces rate pairs that reach
the dominant face of the capacity pentagon.  The right-hand panel shows the
exact and sufficient sum-capacity tests as functions of gamma.
"""

from pathlib import Path

import numpy as np

from cfma import ChannelModel, export
from cfma.conditions import (
    check_sum_capacity,
    condition_curve,
    sufficient_curve,
    sufficient_gamma_intervals,
)
from cfma.explorer import trace_region

out = Path(__file__).resolve().parent / "output"
out.mkdir(exist_ok=True)

model = ChannelModel.gaussian(2, 0.25)

report = check_sum_capacity(model)
print("verdict:", report.verdict)
print("exact-test intervals:", [(round(iv.lo, 6), round(iv.hi, 6)) for iv in report.intervals])
print("closed-form intervals:",
      [(round(iv.lo, 6), round(iv.hi, 6)) for iv in sufficient_gamma_intervals(model)])

gammas = np.geomspace(0.05, 20, 801)
red = trace_region(model, [((1, 1), (0, 1))], gammas, include_sic_corners=False)
yellow = trace_region(model, [((1, 1), (1, 0))], gammas, include_sic_corners=False)
c1, c2, cs = red.bounds
print(f"Csum = {cs:.6f}; best sum rate: red {red.max_sum_rate:.6f}, "
      f"yellow {yellow.max_sum_rate:.6f}")

rows = [[p.R1, p.R2, p.gamma, p.coeffs, p.valid] for p in red.points + yellow.points]
(out / "fig2_region.csv").write_text(
    export.to_csv("region", export.COLUMNS["region"], rows,
                  {"pentagon": f"C1={c1:.9g},C2={c2:.9g},Csum={cs:.9g}"}))

curve_g = np.geomspace(0.1, 10, 400)
exact, _ = condition_curve(model, curve_g)
suff, _ = sufficient_curve(model, curve_g)
rows = [[g, e, 0.0, s, 0.0] for g, e, s in zip(curve_g, exact, suff)]
(out / "fig2_conditions.csv").write_text(export.to_csv("check", export.COLUMNS["check"], rows))

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4.5))
    left.plot([0, cs - c2, c1, c1], [c2, c2, cs - c1, 0], color="tab:blue")
    for trace, colour in ((red, "tab:red"), (yellow, "gold")):
        pts = np.array([(p.R1, p.R2) for p in trace.points])
        left.plot(pts[:, 0], pts[:, 1], ".", ms=2, color=colour)
    left.set_xlabel("R1 [bits]")
    left.set_ylabel("R2 [bits]")
    right.semilogx(curve_g, exact, color="tab:blue", label="exact test")
    right.semilogx(curve_g, suff, color="tab:red", label="sufficient test")
    right.axhline(0, color="k", lw=0.5)
    right.set_ylim(-2, 4)
    right.set_xlabel("gamma")
    right.legend()
    fig.tight_layout()
    fig.savefig(out / "fig2.png", dpi=120)
