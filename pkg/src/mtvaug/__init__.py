"""Token-level text augmentation trained as a weighted original + augmented objective."""

__version__ = "0.1.0"

from .augment import AugmentationConfig, Operator, augment, perturbation_count
from .classifier import LinearModel, LossKind, MixWeights, TrainConfig, evaluate, train_mtv
from .experiment import RunSpec, SweepResult, emit_report, load_dataset, run, sweep
from .rng import RandomStream
from .textcore import Dataset, SynonymLexicon, TokenSequence, load_lexicon, tokenize

__all__ = [
    "AugmentationConfig", "Dataset", "LinearModel", "LossKind", "MixWeights", "Operator",
    "RandomStream", "RunSpec", "SweepResult", "SynonymLexicon", "TokenSequence", "TrainConfig",
    "augment", "emit_report", "evaluate", "load_dataset", "load_lexicon", "perturbation_count",
    "run", "sweep", "tokenize", "train_mtv",
]
