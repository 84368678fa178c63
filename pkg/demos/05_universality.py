"""Rademacher against gaussian weights in the n = 16, beta = 5/2 frame.

Runs the bundled config and compares the two empirical laws of the rescaled
passage time.  Takes a few seconds.
"""

import numpy as np

from thinscale import ExperimentConfig, run_experiment
from thinscale.cli import bundled_config

cfg = ExperimentConfig.load(bundled_config("universality-small"))
res = run_experiment(cfg)
rep = res.reports()[0]
for role, s in rep.summaries.items():
    q = ", ".join(f"{v:+.3f}" for v in s.quantiles)
    print(f"{role:9s} mean {s.mean:+.4f}  sd {np.sqrt(s.variance):.4f}  quantiles [{q}]")
print(f"KS distance {rep.ks_statistic:.4f} (p = {rep.ks_pvalue:.3f}); gates: {res.evaluate_gates()}")
