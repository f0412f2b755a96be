# %% [markdown]
# # Sweeping c and checking the bound
#
# A sweep records the empirical error, the condition estimate and the bound
# for a grid of c values. The bound is reported even where its precondition
# delta <= delta0 fails, with the flag set to false.

# %%
import io

from mqshape.experiments import SweepConfig, run_sweep, verify_bound, write_sweep_csv

rows = run_sweep(SweepConfig(n=1, beta=1.0, b0=1.0, c_min=0.1, c_max=10.0, count=6))
buf = io.StringIO()
write_sweep_csv(rows, buf)
print(buf.getvalue())

# %% [markdown]
# Inside the precondition the inequality can be checked directly. With 9
# centers on [-4, 4] the fill distance is 0.5, which needs c around 1300; the
# system is then solved with 256-bit arithmetic.

# %%
rep = verify_bound(1, 1.0, 8.0, 1.0, 9, bits=256, eval_points=1000)
print(rep.verdict, f"c={rep.c:.6g}", f"max error={rep.empirical:.3e}",
      f"bound={rep.bound.total.format(6)}")

rep = verify_bound(1, -1.0, 0.01, 1.0, 9, bits=256, eval_points=1000)
print(rep.verdict, f"c={rep.c:.6g}", f"max error={rep.empirical:.3e}",
      f"bound={rep.bound.total.format(6)}")
