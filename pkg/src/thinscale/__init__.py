"""Last passage percolation in thin rectangles: passage times, geodesics,
melons, rescaling and universality experiments."""

__version__ = "0.1.0"

from .environment import (  # noqa: E402
    DistributionSpec,
    LineEnsemble,
    WeightField,
    build_walk_ensemble,
    sample_brownian_ensemble,
    sample_weights,
)
from .passage import (  # noqa: E402
    GeodesicProfile,
    LatticePoint,
    PassageResult,
    geodesic_gamma,
    horizontal_lpp,
    lattice_lpp,
    semidiscrete_lpp,
)
from .melon import Melon, melon_oracle, melon_topk  # noqa: E402
from .scaling import (  # noqa: E402
    RescaledSample,
    ScalingFrame,
    coord_map,
    rescale_geodesic,
    rescale_melon,
    rescale_passage,
)
from .stats import (  # noqa: E402
    DiscrepancyReport,
    StatsReport,
    bridge_dominance_test,
    discrepancy_check,
    exponent_fit,
    ks_two_sample,
)
from .experiment import ExperimentConfig, run_experiment  # noqa: E402
