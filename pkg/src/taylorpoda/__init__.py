"""Model-agnostic local feature attribution with optimizable interaction allocation.

Explains individual predictions of black-box models by allocating the
output across input features. Five methods share one masked-output table
per instance: occlusion (OCC-1), exact Shapley values, AUP-selected
semivalues (WeightedSHAP), a weighted-ridge surrogate (LIME), and
TaylorPODA, whose per-coalition interaction allocation is optimized by
Dirichlet random search against AUP.
"""

__version__ = "0.1.0"

from ._kernels import HAVE_COMPILED
from .allocation import (
    DirichletParams,
    XiAllocation,
    generate_candidates,
    optimize_xi,
    sample_simplex,
)
from .attribution import (
    Attribution,
    LimeConfig,
    Method,
    WeightFamily,
    lime,
    occ1,
    shap_exact,
    taylorpoda,
    taylorpoda_capped,
    weighted_shap,
)
from .dividends import DividendMap, harsanyi, harsanyi_all, mobius_identity_check
from .masking import (
    BackgroundSet,
    CoalitionValueTable,
    build_table,
    masked_output,
)
from .metrics import (
    MetricReport,
    aggregate,
    aup,
    discrepancy,
    importance_order,
    inclusion_auc,
    inclusion_mse,
)
from .oracle import (
    ExternalModel,
    FeatureVector,
    MlpModel,
    PolynomialModel,
    evaluate,
    evaluate_batch,
    load_model,
)
from .reference import (
    GenericAllocation,
    PostulateReport,
    TaylorTerm,
    check_postulates,
    independent_sum,
    interaction_sum,
    taylor_terms,
)

__all__ = [
    "__version__",
    "HAVE_COMPILED",
    "Attribution",
    "BackgroundSet",
    "CoalitionValueTable",
    "DirichletParams",
    "DividendMap",
    "ExternalModel",
    "FeatureVector",
    "GenericAllocation",
    "LimeConfig",
    "Method",
    "MetricReport",
    "MlpModel",
    "PolynomialModel",
    "PostulateReport",
    "TaylorTerm",
    "WeightFamily",
    "XiAllocation",
    "aggregate",
    "aup",
    "build_table",
    "check_postulates",
    "discrepancy",
    "evaluate",
    "evaluate_batch",
    "generate_candidates",
    "harsanyi",
    "harsanyi_all",
    "importance_order",
    "inclusion_auc",
    "inclusion_mse",
    "independent_sum",
    "interaction_sum",
    "lime",
    "load_model",
    "masked_output",
    "mobius_identity_check",
    "occ1",
    "optimize_xi",
    "sample_simplex",
    "shap_exact",
    "taylor_terms",
    "taylorpoda",
    "taylorpoda_capped",
    "weighted_shap",
]
