#!/usr/bin/env python3
"""A small end-to-end study with the simulated operator.

Runs all four techniques over the full 3x3 width/amplitude grid for a few
seeds, then reproduces the analysis chain: per-condition summaries, the
per-technique Fitts fits, and the accuracy-by-width table. Expect the
absolute technique to fall off at the 25 px width while the dual-mode
techniques stay accurate, and every technique's mean RT to rise linearly
with the index of difficulty.

A full-size run (20 seeds, 3 sets per condition) is what the acceptance
suite times; this demo uses 4 seeds to finish in a few seconds.
"""

import time

from farpoint import StudyDesign, fit_all, summarize
from farpoint.analysis import accuracy_by_width, crossover_id
from farpoint.simulator import simulate_study

design = StudyDesign(sets_per_condition=2)
start = time.perf_counter()
results = simulate_study(design, seeds=range(4))
records = [r for _, res in results for r in res.records]
print(f"{len(records)} sets simulated in {time.perf_counter() - start:.1f} s\n")

summaries = summarize(records)
print(f"{'technique':<12}{'W':>5}{'A':>6}{'ID':>7}{'mean RT':>9}{'accuracy':>10}")
for s in sorted(summaries, key=lambda s: (s.technique, s.id_bits)):
    print(f"{s.technique:<12}{s.width_px:>5.0f}{s.amplitude_px:>6.0f}"
          f"{s.id_bits:>7.2f}{s.mean_rt_s:>8.2f}s{s.accuracy:>10.3f}")

fits = fit_all(summaries)
print(f"\n{'technique':<12}{'a':>8}{'b':>8}{'RMSE':>8}{'R^2':>8}{'1/b':>8}")
for tech, f in sorted(fits.items()):
    print(f"{tech:<12}{f.a:>8.3f}{f.b:>8.3f}{f.rmse:>8.3f}"
          f"{f.r_squared:>8.3f}{f.throughput:>8.2f}")

print("\naccuracy by width:")
for tech, w, acc, n in accuracy_by_width(summaries):
    bar = "#" * int(acc * 40)
    print(f"  {tech:<12} W={w:>3.0f}  {acc:.3f}  {bar}")

x = crossover_id(fits["absolute"], fits["dual_speed"])
print(f"\nabsolute and dual-speed lines cross at ID = {x:.2f} bits:")
print("  easier tasks favor absolute, harder tasks favor dual-speed")
