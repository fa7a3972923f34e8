"""Lacunary ideal convergence in probabilistic normed spaces, at a finite evidence horizon."""

from .algebra import (
    EPS0,
    MIN,
    PRODUCT,
    DistributionFunction,
    GridDF,
    TNorm,
    check_tnorm_axioms,
    df_eval,
    ratio_df,
    tconorm_eval,
    tnorm_eval,
    triangle_eval,
)
from .classical import N_theta_check, real_I_convergence_check, real_I_theta_check, statistical_convergence_check
from .convergence import (
    ConvergenceReport,
    ParamGrid,
    I_theta_convergence_check,
    equivalent_statements,
    extract_convergent_subsequence,
    limit_scan,
    nu_convergence_check,
    planted_instance,
    seq_combine,
    theta_convergence_check,
)
from .ideals import (
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    DensityIdeal,
    FiniteIdeal,
    IndexSet,
    Status,
    Verdict,
    filter_contains,
    ideal_contains,
    natural_density,
)
from .lacunary import (
    LacunaryScheme,
    SequenceSource,
    alternating,
    block_average,
    block_range,
    from_array,
    make_scheme,
    reciprocal,
    squares_indicator,
)
from .pn_space import PNSpace, check_pn_axioms, nu_eval, open_ball_contains, simple_space
from .points import (
    I_star_theta_cauchy_check,
    I_theta_cauchy_check,
    cluster_points_scan,
    decompose,
    limit_points_scan,
    modify_on_null_set,
    theta_cauchy_check,
)

__version__ = "0.1.0"
