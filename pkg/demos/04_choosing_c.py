# %% [markdown]
# # Choosing the shape parameter
#
# Three procedures minimize the bound over c. The practical one drops
# lambda^(1/delta). The two theoretical ones keep it, with the cube side either
# fixed or free to grow with c. Every decision is logged in the branch trace.

# %%
from mqshape import AdvisorInputs, LogScalar, advise

cases = [
    ("practical", AdvisorInputs(1, 3.0, 1.0, 1e-3, 8.0)),
    ("practical", AdvisorInputs(2, 0.5, 0.25, 1e-25, 1.0)),
    ("practical", AdvisorInputs(1, -1.0, 2.0, 1e-4, 1.0)),
    ("fixed-b0", AdvisorInputs(1, 1.0, 1.0, 0.01, 8.0)),
    ("unfixed-b0", AdvisorInputs(2, 0.5, 0.25, 1e-22)),
]
for mode, inp in cases:
    adv = advise(mode, inp)
    print(f"{mode:>10} n={inp.n} beta={inp.beta:+}: c={adv.c.format(8)}  "
          f"[{adv.case_label}, {adv.advice_kind}]")

# %% [markdown]
# The trace shows why a branch was taken.

# %%
adv = advise("fixed-b0", AdvisorInputs(2, 0.5, 0.25, 1e-22, 1.0))
for cond, value, verdict in adv.branch_trace:
    shown = value.format(8) if isinstance(value, LogScalar) else value
    print(f"  {cond:<40} {shown!s:<45} {verdict}")
