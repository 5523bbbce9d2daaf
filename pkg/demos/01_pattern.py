# %% [markdown]
# # Slit patterns
#
# The count rate behind two slits is a single-slit envelope, set by the slit
# width `b`, multiplying cosine fringes, set by the separation `d`.  This
# script evaluates the closed forms for the default reticle and prints the
# two length scales that a scan has to resolve.

# %%
import numpy as np

from photonslit import (
    PatternParams,
    double_slit_density,
    envelope_width,
    fringe_spacing,
    partial_coherence_density,
)
from photonslit.plotting import ascii_plot

MM = 1e-3
p = PatternParams()
print(f"fringe spacing  {fringe_spacing(p) / MM:.3f} mm")
print(f"envelope width  {envelope_width(p) / MM:.2f} mm")
print(f"fringes inside the central envelope  {envelope_width(p) / fringe_spacing(p):.1f}")

# %% [markdown]
# ## Full and partial coherence
#
# With a spatially coherent source the dark fringes reach zero.  A finite
# source reduces the cross term by `|V|`, which lifts the minima without
# moving them.

# %%
x = np.linspace(-12.5, 12.5, 1001) * MM
print(ascii_plot(x, double_slit_density(x, p), title="V = 1"))
p77 = PatternParams(visibility=0.77)
print(ascii_plot(x, partial_coherence_density(x, p77), title="V = 0.77"))

# %% [markdown]
# The contrast near the centre comes straight from the maxima and minima.

# %%
centre = np.abs(x) < 1.5 * MM
y = partial_coherence_density(x[centre], p77)
print(f"(max - min) / (max + min) = {(y.max() - y.min()) / (y.max() + y.min()):.3f}")
