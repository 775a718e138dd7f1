"""Ergodic-rate statistics over a box of destination positions.

Destinations are stratified over (100..180, 50..100, z = 15) around the
fixed panel; each design's rate comes from its matched-Gamma closed form
(Monte Carlo for the per-trial random design).  The box averages land at
roughly 1.5 / 3.2 / 4.2 b/s/Hz for no-RIS / statistical / aligned designs,
i.e. a ~2x and ~2.8x uplift from the panel.
"""

from dataclasses import replace

import numpy as np

from rislink import analytic, cli, montecarlo
from rislink.channel import Position3, link_stats
from rislink.phase import PhaseDesign

from _scenarios import shipped

cfg = shipped("fig2.cfg")
spec = cli.ExperimentSpec(
    kind="RateCdf", scenario=cfg, output="unused.csv", seed=2, trials=2000,
    dest_box=(Position3(100, 50, 15), Position3(180, 100, 15)),
    dest_samples=128)
dests = cli._stratified_destinations(spec)

rates = {"none": [], "equal": [], "long_term": [], "short_term": [], "random": []}
for dest in dests:
    dcfg = replace(cfg, destination=dest)
    stats = link_stats(dcfg)
    no_ris = analytic.GammaApprox(shape=1.0, scale=stats.nu * stats.beta_sd,
                                  design=PhaseDesign.EQUAL,
                                  terms=analytic.LongTermTerms(0.0, 0.0))
    rates["none"].append(analytic.ergodic_rate(no_ris))
    for name, design in (("equal", PhaseDesign.EQUAL),
                         ("long_term", PhaseDesign.LONG_TERM),
                         ("short_term", PhaseDesign.SHORT_TERM)):
        rates[name].append(analytic.ergodic_rate(
            cli._closed_form_approx(dcfg, design)))
    rates["random"].append(montecarlo.estimate_ergodic_rate(
        dcfg, PhaseDesign.RANDOM, spec.trials, spec.seed).value)

print(f"{'design':>12} | {'mean':>6} | {'10%':>6} | {'50%':>6} | {'90%':>6}  [b/s/Hz]")
for name, vals in rates.items():
    v = np.array(vals)
    q10, q50, q90 = np.quantile(v, [0.1, 0.5, 0.9])
    print(f"{name:>12} | {v.mean():>6.3f} | {q10:>6.3f} | {q50:>6.3f} | {q90:>6.3f}")

lt_gain = np.mean(rates["long_term"]) / np.mean(rates["none"])
st_gain = np.mean(rates["short_term"]) / np.mean(rates["none"])
print(f"\nuplift over the no-RIS baseline: statistical {lt_gain:.2f}x, "
      f"aligned {st_gain:.2f}x")
