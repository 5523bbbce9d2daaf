# %% [markdown]
# # Source size and fringe visibility
#
# The pump is focused into the down-conversion crystal, so the light seen
# by the slits comes from a small Gaussian spot.  The far-field coherence
# of that spot sets the fringe visibility: wider slit separations or larger
# spots give less contrast.

# %%
import numpy as np

from photonslit import SourceModel, focused_waist, source_angular_size, visibility_gaussian_source

MM = 1e-3
s = SourceModel()
w0 = focused_waist(s)
print(f"focused waist      {w0 / MM:.4f} mm")
print(f"angular size       {source_angular_size(s) * 1e3:.3f} mrad")
print(f"visibility, d=0.62 {visibility_gaussian_source(0.62 * MM, s, 810e-9):.3f}")
print(f"with w0 = 0.064 mm {visibility_gaussian_source(0.62 * MM, s, 810e-9, waist=0.064 * MM):.3f}")

# %% [markdown]
# ## Visibility against slit separation
#
# An unfocused pump is roughly eight times wider, which destroys the
# fringes for any practical reticle.

# %%
print("   d (mm)   focused   unfocused")
for d in np.arange(0.2, 1.61, 0.2):
    v_f = visibility_gaussian_source(d * MM, s, 810e-9)
    v_u = visibility_gaussian_source(d * MM, s, 810e-9, waist=s.pump_waist)
    print(f"   {d:5.2f}    {v_f:.3f}     {v_u:.2e}")
