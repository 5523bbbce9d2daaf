# %% [markdown]
# # Polarization eraser
#
# Orthogonal polarizers behind the two slits label the path and wash out the
# fringes.  An analyzer at angle `θ` after the slits projects both paths on a
# common axis.  The fringe visibility then follows `|cos 2θ|`: full at the
# vertical, zero at ±45°.

# %%
import math

import numpy as np

from photonslit import EraserSetup, PatternParams, ScanConfig, eraser_density
from photonslit.experiments import ERASER_CONFIGURATIONS, eraser_series
from photonslit.plotting import ascii_plot

MM = 1e-3
DEG = math.pi / 180
x = np.linspace(-12.5, 12.5, 1001) * MM
p = PatternParams(visibility=1.0)
for label, setup in ERASER_CONFIGURATIONS.items():
    print(ascii_plot(x, eraser_density(x, p, setup), title=label))

# %% [markdown]
# ## Visibility against analyzer angle
#
# Each angle gets a simulated 30 s per point scan.  The slit geometry is
# taken as known, so the fit frees only the amplitude, the visibility and
# the centre.

# %%
angles = np.arange(-45, 46, 15.0)
setups = {f"{a:+.0f}": EraserSetup(0.0, 45 * DEG, -45 * DEG, a * DEG) for a in angles}
points = eraser_series(p, ScanConfig(dwell=30.0, seed=5), setups)
print(" angle   fitted     |cos 2θ|")
for a, pt in zip(angles, points):
    print(f"{a:+6.1f}   {pt.visibility:.3f}±{pt.error:.3f}   {abs(math.cos(2 * a * DEG)):.3f}")
