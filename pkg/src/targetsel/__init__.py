"""Targeted data subset selection via submodular mutual information."""

__version__ = "0.1.0"

from .datastore import (  # noqa: F401
    FeatureMatrix,
    LabelVector,
    ProbabilityMatrix,
    load_features,
    load_labels,
    load_probabilities,
    save_features,
)
from .kernel import KernelConfig, SimilarityKernel, build_kernel, regularize_psd  # noqa: F401
from .objectives import (  # noqa: F401
    KINDS,
    ObjectiveSpec,
    ObjectiveState,
    build_objective,
    commit,
    evaluate,
    marginal_gain,
)
from .optimizer import (  # noqa: F401
    SelectionConfig,
    SelectionResult,
    exhaustive_maximize,
    greedy_maximize,
)
