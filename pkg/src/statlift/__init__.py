"""Statistical manifolds, their dual connections, and lifts to higher tangent bundles."""
from ._kernels import HAVE_NUMBA, select_backend, set_backend
from .contrast import (
    ContrastFunction,
    contrast_structure,
    induced_all,
    induced_connection,
    induced_dual_connection,
    induced_metric,
    induced_skewness,
    swap_contrast,
    validate_contrast,
)
from .expr import ParseError, SmoothMap, jet_evaluate, parse, to_text
from .geometry import (
    Chart,
    Connection,
    CoordinateMap,
    CovariantTensor,
    DegenerateError,
    Metric,
    OneForm,
    ScalarField,
    TangentChart,
    TensorField,
    VectorField,
    curvature,
    dual_connection,
    horizontal_lift,
    is_nondegenerate,
    levi_civita,
    lie_bracket,
    nabla_g,
    signature,
    torsion,
    transform_connection,
    transform_metric,
    transform_tensor,
)
from .jet import Algebra, Jet, derivative, fd_oracle, taylor_partials
from .lifting import (
    JetPoint,
    lift_connection,
    lift_contrast,
    lift_covariant_tensor,
    lift_function,
    lift_one_form,
    lift_tensor,
    lift_vector_field,
    sample_jets,
    tangent_manifold,
)
from .modelfile import Target, builtin_target, load_model_file, parse_model_text
from .models import (
    DensityModel,
    ExponentialFamily,
    NormalizationError,
    amari_chentsov,
    exponential_family_structure,
    fisher_rao,
    gaussian_structure,
    kl_contrast,
    quartic_family,
)
from .series import DomainError, TruncatedSeries
from .statistical import (
    CouplingError,
    Report,
    StatisticalStructure,
    alpha_connection,
    is_codazzi,
    is_dual_pair,
    is_torsion_coupled,
    skewness_from_pair,
)
from .verify import CheckResult, run_suite

__version__ = "0.1.0"
