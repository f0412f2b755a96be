# %% [markdown]
# # Explicit error bounds
#
# For a band-limited target the error bound factors into pieces that can be
# inspected one by one. Only c^((1 + beta - n)/4) e^(c sigma/2) lambda^(1/delta)
# moves with c.

# %%
from mqshape import (
    ProblemSetting,
    bandlimited_error_bound,
    l2_norm,
    make_sinc,
    special_error_bound,
    special_norm_terms,
    spectral_density,
    theorem_constants,
    validate_spec,
)

f = make_sinc(1, 1.0)
delta0 = theorem_constants(1, 1.0, 8.0, 1.0).delta0.to_value()
setting = ProblemSetting(1, 8.0, 1.0, delta0)
bd = bandlimited_error_bound(setting, validate_spec(1.0, 1.0), l2_norm(f))
for name, factor in bd.factors:
    print(f"{name:>24}: {factor.format(10)}")
print(f"{'total':>24}: {bd.total.format(10)}")

# %% [markdown]
# For n = 1 and beta = -1 the bound is built from two spectral integrals A and
# B. B only appears once 1/c drops below the band limit.

# %%
dens = spectral_density(f)
for c in (0.5, 1.0, 2.0, 10.0):
    t = special_norm_terms(c, 1.0, dens)
    eb = special_error_bound(ProblemSetting(1, 1.0, 1.0, 1e-4), c, t.A, t.B)
    print(f"c={c:5}: A={t.a:.6g} B={t.B.format(6)} bound={eb.total.format(6)}")
