"""Community detection in sparse stochastic block models.

Detection down to the spectral threshold via acyclic belief propagation
(equivalently, power iteration with a generalized nonbacktracking
operator), the information-theoretic typical-set sampler at enumerable
scale, closed-form threshold formulas, parameter learning from cycle
counts, and graph-topology statistics, with a reproducible CLI harness.
"""

from .abp import (AbpConfig, abp_full, abp_star, abp_star_vanilla,
                  aggregate_depth, compensate, find_short_cycles)
from .graph import Graph, read_edgelist, read_labels, write_edgelist, write_labels
from .learner import count_cycles, estimate_params, nb_closed_walks_total
from .metrics import Partition, agreement, bad_set_membership, detection_margin
from .model import (SbmParams, Spectrum, SymmetricSbm, sample, snr_symmetric,
                    spectrum)
from .nonbacktracking import (PathBasis, build_path_basis, nb_walk_count,
                              power_iteration_detect, sigma_t, w_r_apply)
from .topology import component_stats, predicted_fractions
from .typicality import (ThresholdReport, TypicalityParams, enumerate_typical,
                         is_typical, it_bound_holds, psi, sample_typical, tau,
                         threshold_report, union_bound_holds)

__version__ = "0.1.0"

__all__ = [
    "AbpConfig", "Graph", "Partition", "PathBasis", "SbmParams", "Spectrum",
    "SymmetricSbm", "ThresholdReport", "TypicalityParams",
    "abp_full", "abp_star", "abp_star_vanilla", "aggregate_depth",
    "agreement", "bad_set_membership", "build_path_basis", "compensate",
    "component_stats", "count_cycles", "detection_margin", "enumerate_typical",
    "estimate_params", "find_short_cycles", "is_typical", "it_bound_holds",
    "nb_closed_walks_total", "nb_walk_count", "power_iteration_detect",
    "predicted_fractions", "psi", "read_edgelist", "read_labels", "sample",
    "sample_typical", "sigma_t", "snr_symmetric", "spectrum", "tau",
    "threshold_report", "union_bound_holds", "w_r_apply", "write_edgelist",
    "write_labels",
]
