"""Symbol detection and constellation design under residual amplitude and phase distortion."""

from .channel import ImpairmentParams, RandomStream, sample_received, snr_to_sigma_n2
from .constellation import (
    Constellation,
    SapskSpec,
    load_constellation,
    make_qam,
    make_sapsk,
    normalize,
    save_constellation,
)
from .detector import DetectorKind, detect, metric_euc, metric_gap, metric_pad
from .mc_engine import SepEstimate, estimate_sep, sweep
from .optimizer import OptimizeConfig, OptimizeResult, optimize
from .sep_analytic import error_floor, pairwise_coeffs, pairwise_pep, sep_union

__all__ = [
    "Constellation",
    "DetectorKind",
    "ImpairmentParams",
    "OptimizeConfig",
    "OptimizeResult",
    "RandomStream",
    "SapskSpec",
    "SepEstimate",
    "detect",
    "error_floor",
    "estimate_sep",
    "load_constellation",
    "make_qam",
    "make_sapsk",
    "metric_euc",
    "metric_gap",
    "metric_pad",
    "normalize",
    "optimize",
    "pairwise_coeffs",
    "pairwise_pep",
    "sample_received",
    "save_constellation",
    "sep_union",
    "snr_to_sigma_n2",
    "sweep",
]
