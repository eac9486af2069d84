"""Rank inference for network and low-rank matrices via residual statistics."""

from .core import (
    VARIANTS,
    SubsampleMask,
    TestOutcome,
    default_m,
    full_mask,
    residual,
    sample_mask,
    statistic_diagonal,
    statistic_fullsum,
    statistic_subsampled,
    test_rank,
    validate_m,
)
from .errors import (
    DegenerateDenominator,
    InvalidArgument,
    InvalidVariant,
    NumericalFailure,
    ParseError,
    RIRSError,
    UnsupportedFormat,
)
from .graph_io import (
    EdgeList,
    bipartite_double,
    largest_connected_component,
    read_edgelist,
    read_matrix_market,
    strip_selfloops,
    symmetrize_sum,
    write_edgelist,
)
from .models import ModelSpec, band_b_matrix, dcmm_mean, sample_adjacency, sbm_mean
from .montecarlo import ExperimentReport, ExperimentSpec, ks_normality, read_report, run_experiment, write_report
from .normal import normal_cdf, normal_quantile, two_sided_p
from .rank_select import RankEstimate, estimate_k
from .spectra import SpectralDecomposition, SymMatrix, canonical_sign, eigs_topk

__version__ = "0.1.0"
