"""Asteroid mission economics and the resource depletion table.

    python demos/asteroid_mission.py
"""

from heliosim import astro

# %% The delta-v table
for name, dv in astro.delta_v_table().items():
    print(f"{dv:5.1f} km/s  {name}")

# %% A near-Earth asteroid round trip with refining losses
profile = astro.MissionProfile("LEO→NEA", "NEA→Earth transfer", e0=1.0, grade=0.5, eta1=0.9,
                               enthalpy=2.0, eta2=0.8, mass=2.0, velocity=3.0)
cost = astro.mission_cost(profile)
gain = astro.mission_profit(profile)
print(f"\ntransport {cost.transport}, refinement {cost.refinement:.4f}, total {cost.total:.4f}")
print(f"revenue {gain.revenue}, profit {gain.profit:.4f}")

# %% How fast must the ore move to break even?
need = (2 * cost.total / profile.mass) ** 0.5
print(f"break-even currency velocity: {need:.4f}")

# %% Depletion horizons against the published table
print(f"\n{'element':<11}{'2%':>14}{'5%':>14}{'10%':>14}")
for row in astro.depletion_table():
    cells = []
    for key, g in (("0.02", 0.02), ("0.05", 0.05), ("0.10", 0.10)):
        got = astro.depletion_years(row["static_index"], g)
        flag = "" if abs(got - row["years"][key]) <= 1 else "*"
        cells.append(f"{got:7.1f}/{row['years'][key]:<4}{flag:1}")
    print(f"{row['element']:<11}" + " ".join(cells))
print("* more than a year away from the table")

# %% Platinum consumption growth
mean, var = astro.growth_stats(astro.platinum_series())
mean_x, var_x = astro.growth_stats(astro.platinum_series(), exclusions=[2009])
print(f"\nplatinum: mean {mean:.4%}, variance {var:.4%}; without 2009: mean {mean_x:.4%}, variance {var_x:.4%}")
