"""Binary logistic regression trained with mini-batch Adam, the jointly
trained two-level stacked classifier (TF-IDF branch + one branch per
heuristic), and the two-step embedding-fusion classifier.

Everything is plain numpy over a flat parameter vector, so analytic
gradients can be checked against finite differences.
"""

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import CovrankError
from .features import FEATURE_NAMES
from .vectorize import EmbeddingStore, SparseVector


@dataclass
class TrainConfig:
    batch_size: int = 32
    learning_rate: float = 1e-5
    adam_epsilon: float = 1e-9
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    epochs: int = 200
    l2_penalty: float = 0.0
    seed: int = 0
    plain_gd: bool = False  # diagnostic: full-batch plain gradient descent

    def __post_init__(self):
        if self.batch_size < 1 or self.epochs < 0 or self.learning_rate <= 0:
            raise CovrankError("batch_size >= 1, epochs >= 0 and learning_rate > 0 required")
        if self.l2_penalty < 0:
            raise CovrankError("l2_penalty must be >= 0")


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)


def _bce(z: np.ndarray, y: np.ndarray) -> float:
    # log(1 + e^-|z|) + max(z, 0) - z*y, stable for large |z|
    return float(np.mean(np.log1p(np.exp(-np.abs(z))) + np.maximum(z, 0.0) - z * y))


@dataclass
class Standardizer:
    means: np.ndarray
    stds: np.ndarray  # constant features stored with std 1

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        means = X.mean(axis=0)
        stds = X.std(axis=0)
        stds = np.where(stds > 0, stds, 1.0)
        return cls(means=means, stds=stds)

    @classmethod
    def identity(cls, dim: int) -> "Standardizer":
        return cls(means=np.zeros(dim), stds=np.ones(dim))

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.means) / self.stds

    def to_json(self) -> list[list[float]]:
        return [[float(m), float(s)] for m, s in zip(self.means, self.stds)]

    @classmethod
    def from_json(cls, data: list[list[float]]) -> "Standardizer":
        arr = np.asarray(data, dtype=float)
        return cls(means=arr[:, 0], stds=arr[:, 1])


def adam_minimize(loss_grad, n_params: int, n_samples: int, config: TrainConfig) -> np.ndarray:
    """Minimize from zero initialization. loss_grad(params, idx) returns the
    loss and flat gradient over the sample rows idx."""
    params = np.zeros(n_params)
    if config.epochs == 0:
        return params
    if config.plain_gd:
        everything = np.arange(n_samples)
        for _ in range(config.epochs):
            _, grad = loss_grad(params, everything)
            params = params - config.learning_rate * grad
        return params

    rng = np.random.default_rng(config.seed)
    m = np.zeros(n_params)
    v = np.zeros(n_params)
    t = 0
    for _ in range(config.epochs):
        order = rng.permutation(n_samples)
        for start in range(0, n_samples, config.batch_size):
            idx = order[start:start + config.batch_size]
            _, grad = loss_grad(params, idx)
            t += 1
            m = config.adam_beta1 * m + (1.0 - config.adam_beta1) * grad
            v = config.adam_beta2 * v + (1.0 - config.adam_beta2) * grad * grad
            m_hat = m / (1.0 - config.adam_beta1 ** t)
            v_hat = v / (1.0 - config.adam_beta2 ** t)
            params = params - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_epsilon)
    return params


# ---------------------------------------------------------------------------
# Plain logistic regression
# ---------------------------------------------------------------------------


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: float
    standardizer: Standardizer
    threshold: float = 0.5
    config: TrainConfig | None = None

    @property
    def dimension(self) -> int:
        return len(self.weights)

    def decision(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise CovrankError(f"input has shape {x.shape}, model expects ({self.dimension},)")
        z = self.standardizer.transform(x)
        return float(self.weights @ z + self.bias)

    def predict(self, x) -> float:
        return float(sigmoid(self.decision(x)))

    def predict_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dimension:
            raise CovrankError(f"input has shape {X.shape}, model expects (n, {self.dimension})")
        Z = self.standardizer.transform(X)
        return sigmoid(Z @ self.weights + self.bias)

    def predict_sparse(self, vec: SparseVector) -> float:
        # Sparse inputs skip standardization (identity by construction).
        z = sum(self.weights[i] * w for i, w in vec.entries) + self.bias
        return float(sigmoid(z))


def lr_loss_and_gradient(
    params: np.ndarray,
    Z: np.ndarray,
    y: np.ndarray,
    l2: float = 0.0,
) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy plus (l2/2)*||w||^2 and its gradient at
    params = [w..., b] over already-standardized inputs Z."""
    w, b = params[:-1], params[-1]
    z = Z @ w + b
    p = sigmoid(z)
    loss = _bce(z, y) + 0.5 * l2 * float(w @ w)
    resid = (p - y) / len(y)
    grad = np.concatenate([Z.T @ resid + l2 * w, [np.sum(resid)]])
    return loss, grad


def _check_xy(X: np.ndarray, y: np.ndarray) -> None:
    if X.ndim != 2 or len(X) != len(y):
        raise CovrankError(f"X has shape {X.shape} but y has length {len(y)}")
    if len(y) < 2:
        raise CovrankError("training needs at least two samples")
    if not (np.any(y == 0) and np.any(y == 1)):
        raise CovrankError("training needs both classes present")


def train_lr(X, y, config: TrainConfig, standardize: bool = True) -> LogisticModel:
    """Fit a logistic model by seeded mini-batch Adam from zero init;
    features are z-scored internally on the training data unless
    standardize=False (already-normalized inputs such as TF-IDF vectors)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_xy(X, y)
    scaler = Standardizer.fit(X) if standardize else Standardizer.identity(X.shape[1])
    Z = scaler.transform(X)

    def loss_grad(params, idx):
        return lr_loss_and_gradient(params, Z[idx], y[idx], config.l2_penalty)

    params = adam_minimize(loss_grad, X.shape[1] + 1, len(y), config)
    return LogisticModel(
        weights=params[:-1], bias=float(params[-1]), standardizer=scaler, config=config
    )


def train_lr_sparse(
    rows: list[SparseVector],
    y,
    config: TrainConfig,
    dimension: int,
) -> LogisticModel:
    """train_lr over sparse rows without standardization, so high-dimensional
    TF-IDF inputs never densify."""
    y = np.asarray(y, dtype=float)
    if len(rows) != len(y):
        raise CovrankError("rows and labels must align")
    if len(y) < 2 or not (np.any(y == 0) and np.any(y == 1)):
        raise CovrankError("training needs at least two samples and both classes")

    def loss_grad(params, idx):
        w, b = params[:-1], params[-1]
        z = np.fromiter(
            (sum(w[i] * v for i, v in rows[k].entries) + b for k in idx),
            dtype=float, count=len(idx),
        )
        yb = y[idx]
        loss = _bce(z, yb) + 0.5 * config.l2_penalty * float(w @ w)
        resid = (sigmoid(z) - yb) / len(idx)
        grad = np.zeros_like(params)
        for r, k in zip(resid, idx):
            if r != 0.0:
                for i, v in rows[k].entries:
                    grad[i] += r * v
        grad[:-1] += config.l2_penalty * w
        grad[-1] = np.sum(resid)
        return loss, grad

    params = adam_minimize(loss_grad, dimension + 1, len(y), config)
    return LogisticModel(
        weights=params[:-1], bias=float(params[-1]),
        standardizer=Standardizer.identity(dimension), config=config,
    )


def predict_lr(model: LogisticModel, x) -> float:
    return model.predict(x)


def lr_gradient(model: LogisticModel, X, y, l2: float = 0.0) -> np.ndarray:
    """Analytic gradient of the training loss at the model's parameters over
    the given batch, as [dw..., db]. Exposed for gradient checking."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    Z = model.standardizer.transform(X)
    params = np.concatenate([model.weights, [model.bias]])
    _, grad = lr_loss_and_gradient(params, Z, y, l2)
    return grad


# ---------------------------------------------------------------------------
# Stacked two-level model: TF-IDF branch + six single-heuristic branches
# ---------------------------------------------------------------------------

N_HEURISTICS = len(FEATURE_NAMES)
N_LEVEL1 = N_HEURISTICS + 1


@dataclass
class StackedModel:
    tfidf_weights: np.ndarray  # (V,)
    tfidf_bias: float
    heur_weights: np.ndarray  # (6,) one scalar weight per heuristic branch
    heur_biases: np.ndarray  # (6,)
    level2_weights: np.ndarray  # (7,) over [tfidf prob, heuristic probs...]
    level2_bias: float
    standardizer: Standardizer  # for the heuristic inputs
    threshold: float = 0.5
    config: TrainConfig | None = None

    @property
    def vocab_size(self) -> int:
        return len(self.tfidf_weights)

    def level1_probs(self, vec: SparseVector, heur) -> np.ndarray:
        h = self.standardizer.transform(np.asarray(heur, dtype=float))
        z_t = sum(self.tfidf_weights[i] * w for i, w in vec.entries) + self.tfidf_bias
        z_h = self.heur_weights * h + self.heur_biases
        return sigmoid(np.concatenate([[z_t], z_h]))

    def predict(self, vec: SparseVector, heur) -> float:
        p1 = self.level1_probs(vec, heur)
        return float(sigmoid(p1 @ self.level2_weights + self.level2_bias))


def _stacked_unpack(params: np.ndarray, vocab_size: int):
    v = vocab_size
    w_t = params[:v]
    b_t = params[v]
    w_h = params[v + 1:v + 1 + N_HEURISTICS]
    b_h = params[v + 1 + N_HEURISTICS:v + 1 + 2 * N_HEURISTICS]
    w2 = params[v + 1 + 2 * N_HEURISTICS:v + 1 + 2 * N_HEURISTICS + N_LEVEL1]
    b2 = params[-1]
    return w_t, b_t, w_h, b_h, w2, b2


def stacked_n_params(vocab_size: int) -> int:
    return vocab_size + 1 + 2 * N_HEURISTICS + N_LEVEL1 + 1


def stacked_loss_and_gradient(
    params: np.ndarray,
    tfidf_rows: list[SparseVector],
    H: np.ndarray,
    y: np.ndarray,
    vocab_size: int,
    l2: float = 0.0,
) -> tuple[float, np.ndarray]:
    """End-to-end loss and gradient of the two-level model; the final
    cross-entropy backpropagates through every level-1 sigmoid."""
    w_t, b_t, w_h, b_h, w2, b2 = _stacked_unpack(params, vocab_size)
    n = len(y)

    z_t = np.fromiter(
        (sum(w_t[i] * w for i, w in row.entries) + b_t for row in tfidf_rows),
        dtype=float, count=n,
    )
    z_h = H * w_h + b_h  # (n, 6)
    P = sigmoid(np.column_stack([z_t, z_h]))  # (n, 7)
    z2 = P @ w2 + b2
    weight_sq = float(w_t @ w_t + w_h @ w_h + w2 @ w2)
    loss = _bce(z2, y) + 0.5 * l2 * weight_sq

    dz2 = (sigmoid(z2) - y) / n  # (n,)
    g_w2 = P.T @ dz2 + l2 * w2
    g_b2 = np.sum(dz2)
    dP = np.outer(dz2, w2)  # (n, 7)
    dz1 = dP * P * (1.0 - P)  # (n, 7)

    g_wt = np.zeros(vocab_size)
    for k, row in enumerate(tfidf_rows):
        d = dz1[k, 0]
        if d != 0.0:
            for i, w in row.entries:
                g_wt[i] += d * w
    g_wt += l2 * w_t
    g_bt = np.sum(dz1[:, 0])
    g_wh = np.einsum("ij,ij->j", dz1[:, 1:], H) + l2 * w_h
    g_bh = dz1[:, 1:].sum(axis=0)

    grad = np.concatenate([g_wt, [g_bt], g_wh, g_bh, g_w2, [g_b2]])
    return loss, grad


def train_stacked(
    tfidf_rows: list[SparseVector],
    heuristics,
    y,
    config: TrainConfig,
    vocab_size: int,
) -> StackedModel:
    H_raw = np.asarray(heuristics, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(tfidf_rows) != len(y) or len(H_raw) != len(y):
        raise CovrankError("tfidf rows, heuristics and labels must align")
    if H_raw.shape[1] != N_HEURISTICS:
        raise CovrankError(f"expected {N_HEURISTICS} heuristic columns, got {H_raw.shape[1]}")
    _check_xy(H_raw, y)
    scaler = Standardizer.fit(H_raw)
    H = scaler.transform(H_raw)

    def loss_grad(params, idx):
        rows = [tfidf_rows[i] for i in idx]
        return stacked_loss_and_gradient(
            params, rows, H[idx], y[idx], vocab_size, config.l2_penalty
        )

    params = adam_minimize(loss_grad, stacked_n_params(vocab_size), len(y), config)
    w_t, b_t, w_h, b_h, w2, b2 = _stacked_unpack(params, vocab_size)
    return StackedModel(
        tfidf_weights=w_t.copy(), tfidf_bias=float(b_t),
        heur_weights=w_h.copy(), heur_biases=b_h.copy(),
        level2_weights=w2.copy(), level2_bias=float(b2),
        standardizer=scaler, config=config,
    )


# ---------------------------------------------------------------------------
# Embedding-fusion model: frozen embedding classifier + logistic fusion
# ---------------------------------------------------------------------------


@dataclass
class HerbModel:
    embedding_classifier: LogisticModel
    fusion: LogisticModel  # over [embedding prob, 6 heuristics]
    threshold: float = 0.5
    config: TrainConfig | None = None

    def predict(self, embedding, heur) -> float:
        p_emb = self.embedding_classifier.predict(embedding)
        return self.fusion.predict(np.concatenate([[p_emb], np.asarray(heur, dtype=float)]))


def train_herb(
    store: EmbeddingStore,
    doc_ids: list[str],
    heuristics,
    y,
    config: TrainConfig,
) -> HerbModel:
    """Step one trains the embedding classifier; step two freezes it and
    trains the fusion layer on its probability joined with the heuristics."""
    missing = [d for d in doc_ids if d not in store]
    if missing:
        raise CovrankError(
            "missing embeddings for labeled documents: " + ", ".join(sorted(missing))
        )
    H = np.asarray(heuristics, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(doc_ids) != len(y) or len(H) != len(y):
        raise CovrankError("doc_ids, heuristics and labels must align")

    E = np.stack([store.get(d) for d in doc_ids]).astype(float)
    embedding_classifier = train_lr(E, y, config)
    p_emb = embedding_classifier.predict_batch(E)
    fusion_inputs = np.column_stack([p_emb, H])
    fusion = train_lr(fusion_inputs, y, config)
    return HerbModel(embedding_classifier=embedding_classifier, fusion=fusion, config=config)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _lr_to_json(model: LogisticModel) -> dict:
    return {
        "kind": "lr",
        "dimension": model.dimension,
        "weights": [float(w) for w in model.weights],
        "bias": model.bias,
        "standardization": model.standardizer.to_json(),
        "threshold": model.threshold,
        "config": asdict(model.config) if model.config else None,
    }


def _lr_from_json(data: dict) -> LogisticModel:
    return LogisticModel(
        weights=np.asarray(data["weights"], dtype=float),
        bias=float(data["bias"]),
        standardizer=Standardizer.from_json(data["standardization"]),
        threshold=float(data.get("threshold", 0.5)),
        config=TrainConfig(**data["config"]) if data.get("config") else None,
    )


def model_to_json(model) -> dict:
    if isinstance(model, LogisticModel):
        return _lr_to_json(model)
    if isinstance(model, StackedModel):
        return {
            "kind": "stacked",
            "dimension": model.vocab_size,
            "tfidf": {"weights": [float(w) for w in model.tfidf_weights], "bias": model.tfidf_bias},
            "heuristics": [
                {"weight": float(w), "bias": float(b)}
                for w, b in zip(model.heur_weights, model.heur_biases)
            ],
            "level2": {"weights": [float(w) for w in model.level2_weights], "bias": model.level2_bias},
            "standardization": model.standardizer.to_json(),
            "threshold": model.threshold,
            "config": asdict(model.config) if model.config else None,
        }
    if isinstance(model, HerbModel):
        return {
            "kind": "herb",
            "embedding_classifier": _lr_to_json(model.embedding_classifier),
            "fusion": _lr_to_json(model.fusion),
            "threshold": model.threshold,
            "config": asdict(model.config) if model.config else None,
        }
    raise CovrankError(f"cannot serialize model of type {type(model).__name__}")


def model_from_json(data: dict):
    kind = data.get("kind")
    if kind == "lr":
        return _lr_from_json(data)
    if kind == "stacked":
        return StackedModel(
            tfidf_weights=np.asarray(data["tfidf"]["weights"], dtype=float),
            tfidf_bias=float(data["tfidf"]["bias"]),
            heur_weights=np.asarray([h["weight"] for h in data["heuristics"]], dtype=float),
            heur_biases=np.asarray([h["bias"] for h in data["heuristics"]], dtype=float),
            level2_weights=np.asarray(data["level2"]["weights"], dtype=float),
            level2_bias=float(data["level2"]["bias"]),
            standardizer=Standardizer.from_json(data["standardization"]),
            threshold=float(data.get("threshold", 0.5)),
            config=TrainConfig(**data["config"]) if data.get("config") else None,
        )
    if kind == "herb":
        return HerbModel(
            embedding_classifier=_lr_from_json(data["embedding_classifier"]),
            fusion=_lr_from_json(data["fusion"]),
            threshold=float(data.get("threshold", 0.5)),
            config=TrainConfig(**data["config"]) if data.get("config") else None,
        )
    raise CovrankError(f"unknown model kind {kind!r}")


def save_model(model, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_json(model), sort_keys=True, indent=2) + "\n")


def load_model(path: str | Path):
    return model_from_json(json.loads(Path(path).read_text()))
