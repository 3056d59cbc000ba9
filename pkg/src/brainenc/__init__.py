"""brainenc: voxelwise fMRI brain-encoding evaluation toolkit."""

__version__ = "0.1.0"

from .errors import BrainencError  # noqa: F401
from .types import (  # noqa: F401
    TASK_CODES,
    EncodingConfig,
    FeatureMatrix,
    FoldAssignment,
    PairedDataset,
    ResponseMatrix,
    RoiSpec,
    TaskId,
    validate_pairing,
)
from .io import read_array, write_array  # noqa: F401
from .manifest import Manifest, load_manifest  # noqa: F401
from .encoder import (  # noqa: F401
    EncodingRun,
    FoldwiseRidge,
    RidgeModel,
    StandardizationParams,
    assign_folds,
    fit_ridge,
    run_encoding,
)
from .metrics import (  # noqa: F401
    MetricReport,
    compute_report,
    cosine_distance,
    mae,
    pearson_metric,
    per_sample_pearson,
    per_voxel_mae,
    per_voxel_pearson,
    two_v_two,
)
from .stats import (  # noqa: F401
    AnovaResult,
    PairwiseTable,
    bonferroni,
    f_sf,
    one_way_anova,
    pairwise_posthoc,
    reg_inc_beta,
)
from .taskonomy import (  # noqa: F401
    Dendrogram,
    TaskSimilarity,
    cluster,
    parse_newick,
    prediction_similarity,
    representation_similarity,
    to_newick,
)
from .brainmap import VoxelScoreTable, export_voxel_scores  # noqa: F401
