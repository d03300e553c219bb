"""Ranked-node CPT generation, structural property checks, and experiments."""

from .analysis import (ModePair, WeightInterval, bisect_wmax,
                       check_consecutive_top2, equal_pair_gap, flank_pair_gap,
                       gap_integrand, gap_upper_bound, mixminmax_difference,
                       mixminmax_gap, mixminmax_weight_interval, mode_pair,
                       wmean_equal_pair_weight, wmean_flank_pair_weight,
                       wmean_weight_interval, wmin_reduces)
from .cpt_generator import generate_cpt, generate_distribution, limit_distribution
from .errors import BracketingError, ResourceLimitError, ValidationError
from .experiments import (run_fig2, run_fig3, run_property_checks,
                          run_weight_update, update_weight_interval)
from .model import (Cpt, GenerationParams, RankedFragment, WeightExpressionSpec,
                    lone_low_scenario, state_interval, validate_spec)
from .truncnorm import normal_mass, tnorm_mass
from .weight_expressions import (evaluate_mu, mu_bounds, sample_points,
                                 wmin_equivalent_wmean)

__version__ = "0.1.0"

__all__ = [
    "BracketingError",
    "Cpt",
    "GenerationParams",
    "ModePair",
    "RankedFragment",
    "ResourceLimitError",
    "ValidationError",
    "WeightExpressionSpec",
    "WeightInterval",
    "bisect_wmax",
    "check_consecutive_top2",
    "equal_pair_gap",
    "evaluate_mu",
    "flank_pair_gap",
    "gap_integrand",
    "gap_upper_bound",
    "generate_cpt",
    "generate_distribution",
    "limit_distribution",
    "lone_low_scenario",
    "mixminmax_difference",
    "mixminmax_gap",
    "mixminmax_weight_interval",
    "mode_pair",
    "mu_bounds",
    "normal_mass",
    "run_fig2",
    "run_fig3",
    "run_property_checks",
    "run_weight_update",
    "sample_points",
    "state_interval",
    "tnorm_mass",
    "update_weight_interval",
    "validate_spec",
    "wmean_equal_pair_weight",
    "wmean_flank_pair_weight",
    "wmean_weight_interval",
    "wmin_equivalent_wmean",
    "wmin_reduces",
]
