"""Where should the panel go?  Destination-averaged coverage over a wide area.

Evaluates the closed-form coverage on a coarse grid of panel positions
spanning the corridor from the source to beyond the destination box, averaged
over stratified destinations.  Both designs favor placements near the source
or near the destinations; the middle of the corridor is a dead zone.
"""

from dataclasses import replace

import numpy as np

from rislink import cli, placement
from rislink.channel import Position3
from rislink.phase import PhaseDesign

from _scenarios import shipped

XI = 3.0
cfg = shipped("fig7.cfg")
spec = cli.ExperimentSpec(
    kind="RateCdf", scenario=cfg, output="unused.csv", seed=7, trials=1000,
    dest_box=(Position3(100, 50, 15), Position3(180, 100, 15)), dest_samples=16)
dests = cli._stratified_destinations(spec)

xs = np.linspace(0, 280, 29)
ys = np.linspace(-10, 100, 12)
for design in (PhaseDesign.LONG_TERM, PhaseDesign.SHORT_TERM):
    cov = np.zeros((xs.size, ys.size))
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            pos = Position3(float(x), float(y), 15.0)
            cov[i, j] = np.mean([
                placement.coverage_at(replace(cfg, destination=d), pos, design, XI)
                for d in dests])
    print(f"{design.value} coverage along x (best over y), xi = {XI}:")
    best_y = cov.max(axis=1)
    for lo, hi, label in ((0, 40, "near source"), (55, 95, "mid corridor"),
                          (100, 180, "destination box"), (200, 280, "beyond")):
        sel = (xs >= lo) & (xs <= hi)
        print(f"  {label:>16} (x in [{lo:>3},{hi:>3}]): "
              f"best {best_y[sel].max():.3f}, mean {cov[sel, :].mean():.3f}")
    strip = "".join(" .:-=+*#%@"[min(int(v * 9.999), 9)] for v in best_y)
    print(f"  profile 0..280 m: |{strip}|\n")
