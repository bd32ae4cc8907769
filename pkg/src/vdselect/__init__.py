"""Variable selection with virtual dummies: exact sequential sampling of
rotationally invariant dummy projections, forward-selection paths, and
FDR-calibrated aggregation."""

from .ambient import AmbientSpace, OrthonormalBasis, center_project, standardize_column
from .dummies import DummyLaw, DummyPool
from .selectors import (
    MatrixColumns,
    PathEvent,
    PathResult,
    StoppingRule,
    ad_lars_run,
    run_path,
    vd_omp_run,
)
from .simlab import (
    CoordinateLaw,
    ModelInstance,
    eta_bound,
    fdp_tpp,
    gen_iid_dummy_matrix,
    gen_linear_model,
    ks_statistic,
    wasserstein1,
)
from .trex import Calibration, OccurrenceTable, TrexConfig, calibrate, trex_select

__version__ = "0.1.0"

__all__ = [
    "AmbientSpace",
    "OrthonormalBasis",
    "center_project",
    "standardize_column",
    "DummyLaw",
    "DummyPool",
    "MatrixColumns",
    "PathEvent",
    "PathResult",
    "StoppingRule",
    "ad_lars_run",
    "run_path",
    "vd_omp_run",
    "CoordinateLaw",
    "ModelInstance",
    "eta_bound",
    "fdp_tpp",
    "gen_iid_dummy_matrix",
    "gen_linear_model",
    "ks_statistic",
    "wasserstein1",
    "Calibration",
    "OccurrenceTable",
    "TrexConfig",
    "calibrate",
    "trex_select",
    "__version__",
]
