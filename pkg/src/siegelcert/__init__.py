"""Certified numerics for Siegel modular forms of small genus.

Exact arithmetic on half-integral symmetric matrices, Minkowski and
Siegel-set reduction, lattice enumeration, rigorous series bounds and
Sturm-type cutoffs, and checks on tables of Fourier coefficients.
"""

from .bounds import (
    BoundParams,
    BoundReport,
    c_const,
    coeff_bound_from_sup,
    d_const,
    d_const_uniform,
    power_exp_bound,
    s_bound,
    s_partial,
    sturm_cutoff,
    sturm_report,
    sup_bound_from_coeffs,
    tail_bound,
    tail_partial,
    trace_tail_bound,
)
from .enumeration import (
    CapExceeded,
    EnumSpec,
    by_trace,
    count_bound,
    count_by_trace,
    orbit_canonical,
    orbit_members,
    reduced_by_det,
)
from .reduction import (
    EPSILON,
    PrecisionExhausted,
    ReductionCert,
    SymplecticMat,
    canonical_transforms,
    minkowski_reduce,
    siegel_reduce,
    symplectic_act,
)
from .series import (
    CoeffTable,
    GrowthCertificate,
    GrowthSchedule,
    NonCanonicalKey,
    check_p_symmetry,
    delta_coeffs,
    delta_table,
    eval_certified,
    eval_partial,
    fj_slice,
    growth_certify,
    read_table,
    write_table,
)
from .symmat import HalfSpacePoint, SymMat, gl_action, in_dual_lattice, is_positive_definite, pairing

__version__ = "0.1.0"
