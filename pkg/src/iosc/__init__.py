"""Exact exponential sums of polynomial ideals modulo prime powers,
truncated local zeta data, singular series, and major-arc diagnostics.

The package is organized around an exact sparse polynomial core (poly),
counting kernels over finite rings and fields (ringcount), character
sums with cyclotomic-exact identity checks (expsum), truncated zeta
series and their consistency identities (zeta), composite-modulus sums
and densities (sseries), closed-form exponent bounds (bounds), and
major-arc / Waring-type numerics (circle).  A command-line front end
lives in iosc.cli.
"""

from .errors import BudgetExceeded, OracleDisagreement, ZeroIdealError, DEFAULT_BUDGET
from .poly import (
    IdealSpec,
    Poly,
    PolyParseError,
    Weight,
    build_pairing,
    eval_mod,
    highpart_check,
    jacobian_minors,
    jet_expand,
    parse_poly,
    top_part,
    torus_transform,
    wdeg,
    weighted_parts,
)
from .ringcount import (
    DimEstimate,
    Full,
    PrimitiveBlock,
    ReductionIn,
    Region,
    UnitModP,
    ZeroModP,
    bsing_dim,
    count_ff,
    count_zpm,
    dim_estimate,
)
from .expsum import (
    CycloValue,
    PhaseHistogram,
    E_charsum,
    E_counts,
    cyclo_reduce,
    equals_rational,
    ff_char_sum,
    phase_histogram,
    to_complex,
    torus_sum_check,
    verify_moidef,
)
from .zeta import (
    QSeries,
    RationalFunc,
    compa_check,
    ord_distribution,
    poincare_relation,
    pole_report,
    rational_reconstruct,
    theta_probe,
    zeta_series,
)
from .sseries import (
    E_composite,
    irreducibility_probe,
    p_adic_density,
    singular_series_partial,
    verify_multiplicativity,
)
from .bounds import (
    ExtRational,
    INFINITY,
    bhb_tau0,
    birch_bound,
    convolution_thresholds,
    moi_fit,
    sigma0,
    sigma_tilde0w,
)
from .circle import (
    BoxSpec,
    convolution_fiber_ideal,
    count_box_solutions,
    major_arc_prediction,
    singular_integral,
    waring_surjectivity,
)

__version__ = "0.1.0"
