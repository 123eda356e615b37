"""Sharpness, SAM and generalization diagnostics for binary spoof detection.

Thin Python facade over the C++ core: models with exact gradients, Adam/SAM
steps, the m-sharpness estimator, loss-landscape grids, EER scoring, the
correlation battery and the synthetic domain-shift task generator.
"""

from sharpbench._core import (  # noqa: F401
    AdamConfig,
    AdamState,
    Batch,
    ClassWeights,
    Dataset,
    DirectionPair,
    EerResult,
    GeneratedDataset,
    LandscapeGrid,
    MlpModel,
    SamConfig,
    SharpnessConfig,
    SharpnessReport,
    ShiftSpec,
    StepReport,
    TaskSpec,
    adam_step,
    batch_loss,
    batch_sharpness,
    compute_eer,
    cosine_lr,
    dataset_loss,
    dataset_sharpness,
    evaluate_eer,
    evaluate_grid,
    forward,
    generate_matched_eval,
    generate_shifted_test,
    generate_train,
    grid_spread,
    kendall_tau,
    load_checkpoint,
    loss_and_grad,
    pearson,
    read_dataset_csv,
    sam_step,
    sample_directions,
    save_checkpoint,
    score_dataset,
    sharpness_report_json,
    spearman,
    weighted_cross_entropy,
    write_dataset_csv,
)

__version__ = "0.1.0"
