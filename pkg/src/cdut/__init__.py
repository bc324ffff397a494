"""Chamfer distance under translation.

Exact evaluation and nearest-neighbor indexes (``core``), the exact 1D
sweep and its l1/linf extension (``sweep1d``), multi-scale LSH
(``ann``), sampled-candidate and local-net approximations (``approx``,
``localnet``), the separation-gated decision procedure (``decision``),
hardness-gadget generators (``gadgets``), and brute-force oracles
(``oracle``).
"""

from .ann import AnnAnswer, ScaleLadder, build_ladder
from .approx import (
    CandidateTranslation,
    EstimatorConfig,
    EstimatorError,
    cdut_approx,
    cdut_approx_v1,
    cdut_approx_v2,
    median_boosted,
    sample_anchors,
)
from .core import (
    L1,
    L2,
    LINF,
    ChamferReport,
    Metric,
    NearestIndex,
    PointSet,
    bbox_diameter,
    build_index,
    chamfer,
    chamfer_many,
    chamfer_translated,
)
from .decision import (
    AssumptionError,
    DecisionResult,
    DifferenceSet,
    MedianResult,
    SeparationCertificate,
    SeparationError,
    check_separation,
    decide_cdut,
    difference_set,
    geometric_median,
    total_distance,
    verify_emd_equivalence,
)
from .gadgets import GadgetInstance, combine_gadgets, gadget_a, gadget_b, gadget_width, ov_pair
from .localnet import LocalNetConfig, NetSpec, build_net, cdut_localnet, cdut_localnet_union, covering_audit
from .oracle import GridOracleResult, GridSearchSpec, oracle_cdut_1d, oracle_cdut_grid
from .sweep1d import SweepEvent, build_events, cdut_exact_1d, cdut_exact_l1_linf, sweep_curve

__version__ = "0.1.0"

__all__ = [
    "AnnAnswer",
    "AssumptionError",
    "CandidateTranslation",
    "ChamferReport",
    "DecisionResult",
    "DifferenceSet",
    "EstimatorConfig",
    "EstimatorError",
    "GadgetInstance",
    "GridOracleResult",
    "GridSearchSpec",
    "L1",
    "L2",
    "LINF",
    "LocalNetConfig",
    "MedianResult",
    "Metric",
    "NearestIndex",
    "NetSpec",
    "PointSet",
    "ScaleLadder",
    "SeparationCertificate",
    "SeparationError",
    "SweepEvent",
    "bbox_diameter",
    "build_events",
    "build_index",
    "build_ladder",
    "build_net",
    "cdut_approx",
    "cdut_approx_v1",
    "cdut_approx_v2",
    "cdut_exact_1d",
    "cdut_exact_l1_linf",
    "cdut_localnet",
    "cdut_localnet_union",
    "chamfer",
    "chamfer_many",
    "chamfer_translated",
    "check_separation",
    "combine_gadgets",
    "covering_audit",
    "decide_cdut",
    "difference_set",
    "gadget_a",
    "gadget_b",
    "gadget_width",
    "geometric_median",
    "median_boosted",
    "oracle_cdut_1d",
    "oracle_cdut_grid",
    "ov_pair",
    "sample_anchors",
    "sweep_curve",
    "total_distance",
    "verify_emd_equivalence",
]
