"""scikit-learn compatible wrappers: featurizer, augmenter and classifier."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .augment import AugmentationConfig, Operator, augment
from .classifier import LinearModel, MixWeights, TrainConfig, train_mtv
from .experiment import DESK_DIM
from .features import featurize_batch
from .rng import RandomStream
from .textcore import Dataset, LabeledExample, SynonymLexicon, detokenize
from .validation import check_lexicon, check_positive_int, check_texts, check_unit_interval


class HashingFeaturizer(BaseEstimator, TransformerMixin):
    """Texts to L2-normalized hashed unigram + bigram rows (CSR). Stateless."""

    def __init__(self, n_features=DESK_DIM):
        self.n_features = n_features

    def fit(self, X, y=None):
        check_positive_int(self.n_features, "n_features")
        return self

    def transform(self, X):
        dim = check_positive_int(self.n_features, "n_features")
        return featurize_batch(check_texts(X), dim).to_csr()


class TextAugmenter(BaseEstimator, TransformerMixin):
    """Returns ``copies`` augmented strings per input, copies of one text adjacent.

    Every ``transform`` call restarts the stream from ``random_state``, so
    equal inputs give equal outputs.
    """

    def __init__(self, operator="substitution", alpha=0.1, lexicon=None, copies=1,
                 random_state=0):
        self.operator = operator
        self.alpha = alpha
        self.lexicon = lexicon
        self.copies = copies
        self.random_state = random_state

    def fit(self, X, y=None):
        self._config()
        return self

    def _config(self):
        op = Operator(self.operator)
        check_lexicon(op, self.lexicon)
        return AugmentationConfig(op, check_unit_interval(self.alpha, "alpha"))

    def transform(self, X):
        cfg = self._config()
        copies = check_positive_int(self.copies, "copies")
        lexicon = SynonymLexicon(self.lexicon or {})
        rng = RandomStream(int(self.random_state))
        return [detokenize(augment(seq, cfg, lexicon, rng))
                for seq in check_texts(X) for _ in range(copies)]


class MTVClassifier(BaseEstimator, ClassifierMixin):
    """Linear text classifier trained on the weighted original + augmented loss.

    ``operator=None`` (or ``gamma_o=1`` or ``alpha=0``) is plain training;
    ``gamma_o=0`` trains on augmented batches only.
    """

    def __init__(self, operator="substitution", alpha=0.1, gamma_o=0.5, lexicon=None,
                 n_features=DESK_DIM, loss="hinge_ovr", epochs=5, batch_size=32,
                 learning_rate=4.0, l2_lambda=1e-4, random_state=0):
        self.operator = operator
        self.alpha = alpha
        self.gamma_o = gamma_o
        self.lexicon = lexicon
        self.n_features = n_features
        self.loss = loss
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.l2_lambda = l2_lambda
        self.random_state = random_state

    def fit(self, X, y):
        seqs = check_texts(X)
        y = np.asarray(y)
        if y.ndim != 1 or len(y) != len(seqs):
            raise ValueError(f"y must be 1-d with {len(seqs)} labels")
        self.classes_, encoded = np.unique(y, return_inverse=True)
        if len(self.classes_) < 2:
            raise ValueError("need at least two classes")
        op = None if self.operator is None else Operator(self.operator)
        check_lexicon(op, self.lexicon)
        gamma_o = check_unit_interval(self.gamma_o, "gamma_o")
        aug = None if op is None else AugmentationConfig(op, check_unit_interval(self.alpha, "alpha"))
        cfg = TrainConfig(self.loss, self.epochs, self.batch_size, self.learning_rate,
                          self.l2_lambda, int(self.random_state))
        train = Dataset(tuple(LabeledExample(s, int(c)) for s, c in zip(seqs, encoded)),
                        tuple(str(c) for c in self.classes_))
        dim = check_positive_int(self.n_features, "n_features")
        self.model_ = train_mtv(train, cfg, aug, SynonymLexicon(self.lexicon or {}),
                                MixWeights(gamma_o), dim)
        return self

    def decision_function(self, X):
        check_is_fitted(self, "model_")
        dim = self.model_.dim
        return self.model_.scores(featurize_batch(check_texts(X), dim).to_csr())

    def predict(self, X):
        return self.classes_[np.argmax(self.decision_function(X), axis=1)]

    @property
    def coef_(self) -> np.ndarray:
        check_is_fitted(self, "model_")
        return self.model_.weights

    @property
    def intercept_(self) -> np.ndarray:
        check_is_fitted(self, "model_")
        return self.model_.bias

    @classmethod
    def from_model(cls, model: LinearModel, classes, **params) -> "MTVClassifier":
        est = cls(n_features=model.dim, **params)
        est.model_ = model
        est.classes_ = np.asarray(classes)
        return est
