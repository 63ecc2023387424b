"""Seeded synthetic panels for demos, tests and timing runs.

Outputs follow a Cobb-Douglas technology in the inputs with a per-period
technology shift, scaled down by a DMU-period inefficiency factor in (0, 1].
"""

from __future__ import annotations

import numpy as np

from .dataset import DmuRecord, PanelDataset


def make_panel(n_dmus: int = 77, n_periods: int = 4, n_inputs: int = 3, n_outputs: int = 4,
               seed: int = 0, first_period: int = 2017, shift_sd: float = 0.08) -> PanelDataset:
    rng = np.random.default_rng(seed)
    size = rng.lognormal(mean=0.0, sigma=0.8, size=n_dmus)
    base_in = rng.uniform(10.0, 400.0, size=n_inputs)
    elasticity = rng.dirichlet(np.ones(n_inputs), size=n_outputs) * rng.uniform(0.7, 1.1, (n_outputs, 1))
    base_out = rng.uniform(50.0, 5000.0, size=n_outputs)
    periods = [str(first_period + k) for k in range(n_periods)]
    tech = np.exp(np.cumsum(rng.normal(0.0, shift_sd, size=n_periods)))
    records = []
    for k, period in enumerate(periods):
        for i in range(n_dmus):
            x = base_in * size[i] * rng.lognormal(0.0, 0.25, size=n_inputs)
            core = np.exp(elasticity @ np.log(x / base_in))
            eff = np.exp(-np.abs(rng.normal(0.0, 0.35)))
            y = base_out * core * tech[k] * eff * rng.lognormal(0.0, 0.15, size=n_outputs)
            records.append(DmuRecord(f"D{i + 1:02d}", period,
                                     tuple(float(v) for v in np.round(x, 2)),
                                     tuple(float(v) for v in np.round(y, 2))))
    return PanelDataset(
        input_names=tuple(f"x{j + 1}" for j in range(n_inputs)),
        output_names=tuple(f"y{r + 1}" for r in range(n_outputs)),
        periods=tuple(periods),
        records=tuple(records),
    )
