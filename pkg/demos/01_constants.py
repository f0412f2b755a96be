# %% [markdown]
# # Constants that overflow binary64
#
# The error-bound constants contain exp(2 n gamma_n). Already at n = 3 this is
# exp(468), and at n = 4 it is exp(5056). Everything is therefore carried as a
# LogScalar: a sign plus a natural log.

# %%
import math

from mqshape import LogScalar, gamma_seq, rho_delta0, theorem_constants

for n in range(1, 6):
    print(f"n={n}  gamma_n={gamma_seq(n)}  2 n gamma_n={2 * n * gamma_seq(n)}")

# %% [markdown]
# rho and Delta0 depend on where beta sits relative to n - 3.

# %%
for n, beta in [(1, 1.0), (4, 1.5), (5, -1.0), (3, 3.0)]:
    rho, d0, s = rho_delta0(n, beta)
    print(f"n={n} beta={beta:+.1f}  rho={rho:.6g}  Delta0={d0.format(8)}  s={s}")

# %% [markdown]
# C, lambda and delta0 for a shape parameter c. For n = 3 the constant C is far
# outside the float range, yet lambda^(1/delta0) is exactly (2/3)^(m+1).

# %%
tc = theorem_constants(3, 1.0, 1.0, 10.0)
print("regime:", tc.regime)
print("C      =", tc.C.format(8))
print("delta0 =", tc.delta0.format(8))
print("lambda^(1/delta0) =", tc.lambda_power(tc.delta0).to_value(),
      " (2/3)^(m+1) =", (2 / 3) ** (tc.m + 1))

# %% [markdown]
# Sums and comparisons stay in the log domain too.

# %%
big = LogScalar.from_log(1000.0)
print((big + big).ln_mag - big.ln_mag, "==", math.log(2))
print((big * big).format(6), big > 1e300)
