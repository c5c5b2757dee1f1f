"""Completeness classification and integration of quadratic geodesic
flows attached to left-invariant metrics on SL(2).

A metric is encoded by an invertible self-adjoint map with respect to
the Killing form; this package reduces the map to one of four adapted
normal forms, builds the corresponding quadratic flow on the algebra,
decides completeness of the metric and of every single trajectory, and
integrates the flows numerically (real time, complex rays and loops)
with blow-up detection and conserved-quantity monitoring.

The hot integration kernel is a compiled extension when built
(``sl2flow._core``) with a pure-Python fallback; see
``sl2flow.benchmark`` for a comparison.
"""

from ._backend import HAVE_COMPILED
from .algebra import (
    AlgebraElement,
    Basis,
    BasisKind,
    BasisKindTag,
    STANDARD_BASIS,
    bracket,
    check_self_adjoint,
    classify_basis,
    killing,
)
from .charts import (
    Chart,
    EscapeTime,
    InfinitySingularity,
    LeafAtInfinity,
    escape_quadrature,
    field_in_chart,
    infinity_singularities,
    leaf_at_infinity,
    to_chart,
)
from .completeness import (
    CausalType,
    GeodesicClass,
    GeodesicVerdict,
    IdempotentRay,
    MetricVerdict,
    blowup_time,
    build_complete_metric,
    causal_type,
    find_idempotents,
    geodesic_verdict,
    metric_verdict,
)
from .euler_arnold import (
    EAField,
    build_field,
    eval_field,
    field_from_coeffs,
    first_integrals,
    group_reconstruct,
    lax_rhs,
)
from .integrator import (
    ComplexLoop,
    ComplexRay,
    IntegratorOptions,
    Termination,
    Trajectory,
    estimate_endpoints,
    integrate,
    integrate_complex_ray,
    monodromy_loop,
    prescan_loop,
)
from .normal_form import Case, NormalForm, Spectrum, invert_params, reduce, spectrum3

__version__ = "0.1.0"
