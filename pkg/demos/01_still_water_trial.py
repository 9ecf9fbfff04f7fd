"""Still-water trial: drive the vehicle 4 m and reproduce the published runs.

The scripted operator holds the forward button from t = 0.  Every command
rides the teleoperation link, so the vehicle only starts moving once the
2-3 s navigation delay elapses; it then ramps to its 13.5 cm/s cruise speed
and holds it to the finish line.  Expect a completion time of 30-33 s and a
distance-over-time average of 12-13.5 cm/s, matching the reference runs.

Writes velocity and displacement profiles to demos/out/still_water.png.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from rovsim.simengine import ScenarioConfig, run_scenario, trial_metrics

# Stock configuration: 11 kg vehicle, calibrated drag, seeded link latency.
cfg = ScenarioConfig()
print(f"goal: {cfg.goal} m   dt: {cfg.dt} s   seed: {cfg.seed}")

log = run_scenario(cfg)
m = trial_metrics(log)

print(f"status:              {log.status}")
print(f"time taken:          {m.time_taken:.2f} s")
print(f"avg velocity (d/t):  {100 * m.avg_velocity_dist_over_time:.2f} cm/s")
print(f"avg velocity (inst): {100 * m.avg_velocity_instantaneous_mean:.2f} cm/s")
print(f"max velocity:        {100 * m.v_max:.2f} cm/s")
print(f"95% of max reached:  {m.time_to_95pct_vmax:.2f} s")

t = [r.t for r in log.records]
v = [100 * r.v1 for r in log.records]
x = [100 * r.x for r in log.records]

fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
ax1.plot(t, v, "b")
ax1.set_ylabel("surge velocity (cm/s)")
ax1.axhline(13.5, color="gray", ls="--", lw=0.8, label="13.5 cm/s cruise")
ax1.legend()
ax1.grid(True)
ax2.plot(t, x, "g")
ax2.set_ylabel("displacement (cm)")
ax2.set_xlabel("time (s)")
ax2.axhline(400, color="gray", ls="--", lw=0.8, label="400 cm goal")
ax2.legend()
ax2.grid(True)
fig.suptitle("Still-water trial: velocity and displacement vs. time")

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
fig.savefig(out / "still_water.png", dpi=120)
print(f"wrote {out / 'still_water.png'}")
