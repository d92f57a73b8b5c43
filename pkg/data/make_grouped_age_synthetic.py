"""Regenerate grouped_age_synthetic.csv.

Synthetic grouped current status data in the layout of an age-specific
seroprevalence survey: ages 1-86, a few ages with nobody tested, 850 tested
in total. Seropositivity follows 1 - exp(-0.035 * age). This is not real
survey data.
"""

import numpy as np

rng = np.random.default_rng(20180101)
ages = np.arange(1, 87)
weights = np.exp(-((ages - 30.0) / 25.0) ** 2) + 0.15
weights[[70, 76, 80, 83]] = 0.0  # untested ages
tested = rng.multinomial(850, weights / weights.sum())
positive = rng.binomial(tested, 1.0 - np.exp(-0.035 * ages))

with open("grouped_age_synthetic.csv", "w", newline="") as fh:
    fh.write("time,tested,positive\n")
    for a, nt, ny in zip(ages, tested, positive):
        fh.write(f"{a},{nt},{ny}\n")
