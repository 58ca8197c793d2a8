# %% [markdown]
# # Force noise of a cavity optomechanical sensor
#
# Preset: a 1 mg mirror on a 100 rad/s suspension inside a cavity with
# kappa = 1e6 rad/s. Below we compare position coupling with momentum
# (quantum non-demolition) coupling at the same optical power.

# %%
import numpy as np

from optonoise import (
    CavityParams,
    Coupling,
    SqueezeParams,
    force_psd_momentum,
    force_psd_position,
    g_opt_position,
    theta_opt_position,
)

p = CavityParams(m=1e-6, omega_m=100.0, kappa=1e6, gamma=1e-4)
nu = np.array([10.0, 30.0, 300.0, 1e4, 1e5, 1e6])
g = 1e21
gp = Coupling("position", g).to_momentum(p).value
vac = SqueezeParams()

pos = force_psd_position(p, g, nu, 0.0, vac)
mom = force_psd_momentum(p, gp, nu, 0.0, vac)
print("     nu     pos shot    pos back    mom shot    mom back")
for row in zip(nu, pos.shot, pos.backaction, mom.shot, mom.backaction):
    print("  ".join(f"{v:10.3e}" for v in row))

# %% [markdown]
# Momentum coupling carries a backaction suppressed by (omega_m / nu)^2;
# for a free mass it vanishes.

# %%
free = CavityParams(m=1e-6, omega_m=0.0, kappa=1e6, gamma=1e-4)
print(force_psd_momentum(free, gp, nu, 0.0, vac).backaction)

# %% [markdown]
# At the balanced coupling shot and backaction are equal (the SQL).
# Reading the optimal quadrature removes backaction altogether.

# %%
g_bal = g_opt_position(p, nu)
sp = force_psd_position(p, g_bal, nu, 0.0, vac)
print("shot/backaction at G_opt:", sp.shot / sp.backaction)
th = theta_opt_position(p, g_bal, nu)
print("theta_opt:", th)
print("total at theta_opt / shot:", force_psd_position(p, g_bal, nu, th, vac).total / sp.shot)
