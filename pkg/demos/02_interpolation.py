# %% [markdown]
# # Interpolating with the generalized multiquadric
#
# The kernel is Gamma(-beta/2) (c^2 + |x|^2)^(beta/2). For beta > 0 it is
# conditionally positive definite of order m = ceil(beta/2), so the
# interpolant carries a polynomial of degree < m and the coefficients
# satisfy moment conditions.

# %%
import numpy as np

from mqshape import (
    PrecisionPolicy,
    evaluate,
    fill_distance,
    grid_centers,
    make_sinc,
    solve_interpolant,
    validate_spec,
)

f = make_sinc(1, 1.0)
centers = grid_centers(1, 17, 8.0, corner=-4.0)
values = f(centers.points)
model = solve_interpolant(validate_spec(1.0, 0.8), centers, values)
print("condition estimate:", f"{model.condition_estimate:.3e}")
print("residual at centers:", model.residual_norm)
print("moment residual:   ", model.moment_residual)

x = np.linspace(-4, 4, 401).reshape(-1, 1)
print("max error on [-4, 4]:", np.max(np.abs(evaluate(model, x) - f(x))))

# %% [markdown]
# The fill distance of the centers is the largest gap to the nearest center.

# %%
fd = fill_distance(centers)
print(f"fill distance in [{fd.estimate:.6f}, {fd.upper:.6f}]")

# %% [markdown]
# Larger c makes the kernel flatter and the system worse conditioned. When
# binary64 gives up, an extended-precision solve still works.

# %%
for c in (0.5, 2.0, 8.0):
    try:
        m = solve_interpolant(validate_spec(1.0, c), centers, values)
        print(f"c={c}: machine solve, cond {m.condition_estimate:.2e}")
    except Exception as exc:
        m = solve_interpolant(validate_spec(1.0, c), centers, values,
                              PrecisionPolicy.extended(256))
        print(f"c={c}: {exc}; 256-bit solve, cond {m.condition_estimate:.2e}")
