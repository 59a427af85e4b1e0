"""Total variation bounds for the closeness of convolution products.

Exact arithmetic on finitely supported signed measures over integer
lattices, the elementary-symmetric expansion of a convolution product
around a reference power, explicit-constant error bounds with magic
factors, and the report tables comparing them against prior comparator
bounds and exact distances.
"""

from .bounds import (
    BoundResult,
    CategoricalFamily,
    EtaReport,
    SymmetricFamily,
    bernoulli_two_sided,
    chained_mean_bound,
    eta_categorical,
    eta_chi2_tv,
    eta_chi2_tv_mean,
    eta_exact,
    eta_symmetric,
    expansion_bound,
    expansion_bound_simple,
    pair_determinant_bound,
    per_category_bounds,
    smoothing_bound,
    zero_sum_product_checks,
)
from .constants import ConstantsTable, c1, constants_table, s_ell, u_ell, utilde_ell
from .expansion import (
    ExpansionInput,
    exact_distance,
    exact_product,
    expansion_input,
    gamma_k,
    mean_measure,
    v_k_bruteforce,
    v_k_recursive,
    w_ell,
)
from .kernels import backend_name
from .measure import (
    SignedMeasure,
    compound,
    convolve,
    delta,
    delta0,
    density_wrt,
    from_text,
    linear_combine,
    power,
    restrict,
    to_text,
    tv_distance,
    tv_norm,
)
from .scenarios import (
    ScenarioSpec,
    gen_example1,
    gen_example2,
    gen_symmetric,
    to_integer_line,
    to_unit_vectors,
)

__version__ = "0.1.0"
