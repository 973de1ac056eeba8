from .config import (
    CodebookConfig,
    DatasetConfig,
    LossConfig,
    ModelConfig,
    OptimizerConfig,
    RunConfig,
    bundled_config,
    load_config,
    save_config,
)
from .benchmark import HeadRun, compare, run_benchmark
from .data import SyntheticDataset, generate_synthetic
from .model import ToyModel, forward
from .train import (
    EpochRecord,
    EvalResult,
    TrainingDiverged,
    build_model,
    evaluate,
    evaluate_predictions,
    head_gradcheck,
    objective,
    predict_labels,
    resolve_codebook,
    run,
    train,
)
