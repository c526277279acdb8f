"""Zagreb-index toolkit for three random network models.

Simulation (exact-reproducible), exact rational moment sequences, an
exhaustive small-n enumeration oracle, and a Monte Carlo harness that
cross-checks them, for:

* extended random recursive networks (uniform m-subset attachment),
* plain-oriented recursive trees (degree-proportional attachment),
* random caterpillars (degree-proportional leaf attachment to a fixed spine).
"""

__version__ = "0.1.0"

from .errors import (
    BudgetExceededError,
    DegenerateDistributionError,
    ParameterError,
    UndefinedSkewnessError,
)
from .indices import IndexBundle, apply_attachment_delta, compute_bundle
from .models import (
    RNG_ALGORITHM,
    Caterpillar,
    ExtendedRRT,
    GrowthState,
    ModelSpec,
    Port,
    RngStream,
    StepRecord,
    grow_to,
    init_state,
    sample_degree_proportional,
    sample_uniform_subset,
    step,
)
from .moments import (
    AuditFinding,
    AuditReport,
    CltParams,
    MomentRow,
    MomentTable,
    caterpillar_cubic_closed,
    caterpillar_mean_closed,
    caterpillar_mean_offset,
    caterpillar_moment_table,
    caterpillar_variance_leading,
    closed_form_audit,
    clt_params,
    exact_skewness,
    ext_rrt_mean,
    ext_rrt_moment_table,
    ext_rrt_second_moment,
    ext_rrt_variance,
    gamma_half_ratio,
    harmonic_number,
    port_cubic_closed,
    port_mean_closed,
    port_moment_table,
    port_quartic_closed,
    port_skewness,
)
from .oracle import ExactDistribution, enumerate_distribution, history_count
from .mc import (
    SampleSummary,
    empirical_skewness,
    ks_normal,
    normal_cdf,
    run_replicates,
    simulate_batch,
    standardize_clt,
)

__all__ = [
    "BudgetExceededError",
    "DegenerateDistributionError",
    "ParameterError",
    "UndefinedSkewnessError",
    "IndexBundle",
    "apply_attachment_delta",
    "compute_bundle",
    "RNG_ALGORITHM",
    "Caterpillar",
    "ExtendedRRT",
    "GrowthState",
    "ModelSpec",
    "Port",
    "RngStream",
    "StepRecord",
    "grow_to",
    "init_state",
    "sample_degree_proportional",
    "sample_uniform_subset",
    "step",
    "AuditFinding",
    "AuditReport",
    "CltParams",
    "MomentRow",
    "MomentTable",
    "caterpillar_cubic_closed",
    "caterpillar_mean_closed",
    "caterpillar_mean_offset",
    "caterpillar_moment_table",
    "caterpillar_variance_leading",
    "closed_form_audit",
    "clt_params",
    "exact_skewness",
    "ext_rrt_mean",
    "ext_rrt_moment_table",
    "ext_rrt_second_moment",
    "ext_rrt_variance",
    "gamma_half_ratio",
    "harmonic_number",
    "port_cubic_closed",
    "port_mean_closed",
    "port_moment_table",
    "port_quartic_closed",
    "port_skewness",
    "ExactDistribution",
    "enumerate_distribution",
    "history_count",
    "SampleSummary",
    "empirical_skewness",
    "ks_normal",
    "normal_cdf",
    "run_replicates",
    "simulate_batch",
    "standardize_clt",
]
