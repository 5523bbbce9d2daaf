# %% [markdown]
# # A single wide slit
#
# Blocking one slit leaves only the envelope.  Its side lobes sit at a few
# percent of the centre, so they show up only with enough counts.  The fit
# needs just the amplitude, the width and the centre.

# %%
import numpy as np

from photonslit import PatternParams, ScanConfig, run_scan, single_slit_density
from photonslit.experiments import fit_records, records_to_arrays
from photonslit.plotting import ascii_plot

MM = 1e-3
p = PatternParams(slit_width=0.285 * MM, slit_separation=0.62 * MM)
x = np.linspace(-12.5, 12.5, 4001) * MM
y = single_slit_density(x, p)
peaks = np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])) + 1
side = peaks[x[peaks] > 0]
print("side lobes relative to the centre:", ", ".join(f"{100 * y[i]:.2f}%" for i in side))

# %%
cfg = ScanConfig(seed=2)
records = run_scan(cfg, p, model="single")
xs, n, t = records_to_arrays(records)
print(ascii_plot(xs, n / t, title="single slit, coincidences per second"))
fit = fit_records(records, "single", aperture=cfg.aperture)
b, err = fit.estimates["slit_width"], fit.errors["slit_width"]
print(f"b = {b / MM:.4f} ± {err / MM:.4f} mm (true 0.285)")
