"""Dense two-layer graph convolution with analytic gradients, in float64.

Forward pass: H1 = relu(P X W1), logits = P H1 W2, probabilities by
row-wise softmax. Training minimizes summed cross-entropy over the labeled
document rows. There are no bias terms. Dropout (inverted scaling, rate r)
applies to X and H1 during training only. Identity propagation turns the
same parameterization into the no-graph feature baseline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import NumericError, ValidationError

# Probabilities are floored at this value inside the log loss so that a
# confidently wrong prediction yields a large finite penalty.
LOSS_FLOOR = 1e-12


@dataclass
class GcnModel:
    w1: np.ndarray  # (d_in, d_hidden)
    w2: np.ndarray  # (d_hidden, n_classes)
    dropout_rate: float = 0.5

    @property
    def d_in(self) -> int:
        return self.w1.shape[0]

    @property
    def d_hidden(self) -> int:
        return self.w1.shape[1]

    @property
    def n_classes(self) -> int:
        return self.w2.shape[1]


@dataclass(frozen=True)
class TrainConfig:
    hidden_dim: int
    learning_rate: float
    epochs: int
    seed: int
    dropout_rate: float = 0.5
    beta1: float = 0.9
    beta2: float = 0.999
    adam_epsilon: float = 1e-8

    def __post_init__(self):
        if self.hidden_dim < 1:
            raise ValidationError(f"hidden_dim must be >= 1, got {self.hidden_dim}")
        if self.learning_rate <= 0:
            raise ValidationError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 0:
            raise ValidationError(f"epochs must be >= 0, got {self.epochs}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValidationError(f"dropout_rate must lie in [0, 1), got {self.dropout_rate}")


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


def init_model(
    d_in: int, d_hidden: int, n_classes: int, rng: np.random.Generator, dropout_rate: float = 0.5
) -> GcnModel:
    """Glorot-uniform weights drawn from the given generator, in draw order W1, W2."""
    if min(d_in, d_hidden, n_classes) < 1:
        raise ValidationError("all model dimensions must be >= 1")
    w1 = _glorot(rng, d_in, d_hidden)
    w2 = _glorot(rng, d_hidden, n_classes)
    return GcnModel(w1=w1, w2=w2, dropout_rate=dropout_rate)


def make_dropout_masks(
    rng: np.random.Generator, rate: float, x_shape, h1_shape
) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """Keep-masks for X and H1, drawn in that order; None when rate is 0."""
    if rate == 0.0:
        return None
    mask_x = rng.random(x_shape) >= rate
    mask_h1 = rng.random(h1_shape) >= rate
    return mask_x, mask_h1


def _check_shapes(model: GcnModel, prop: np.ndarray, x: np.ndarray) -> None:
    if prop.ndim != 2 or prop.shape[0] != prop.shape[1]:
        raise ValidationError(f"propagation matrix must be square, got {prop.shape}")
    if x.ndim != 2 or x.shape[0] != prop.shape[0]:
        raise ValidationError(f"features {x.shape} do not match propagation {prop.shape}")
    if x.shape[1] != model.d_in:
        raise ValidationError(f"feature dimension {x.shape[1]} != model d_in {model.d_in}")


def _run(model: GcnModel, prop: np.ndarray, x: np.ndarray, masks) -> dict:
    rate = model.dropout_rate
    if masks is not None:
        mask_x, mask_h1 = masks
        if mask_x.shape != x.shape:
            raise ValidationError(f"dropout mask {mask_x.shape} does not match X {x.shape}")
        x_drop = x * mask_x / (1.0 - rate)
    else:
        x_drop = x
    with np.errstate(invalid="ignore", over="ignore"):
        a1 = prop @ x_drop
        z1 = a1 @ model.w1
        h1 = np.maximum(z1, 0.0)
        if masks is not None:
            if masks[1].shape != h1.shape:
                raise ValidationError(
                    f"dropout mask {masks[1].shape} does not match H1 {h1.shape}"
                )
            h1_drop = h1 * masks[1] / (1.0 - rate)
        else:
            h1_drop = h1
        a2 = prop @ h1_drop
        h2 = a2 @ model.w2
    if not np.all(np.isfinite(z1)):
        raise NumericError("non-finite values in the first convolution layer")
    if not np.all(np.isfinite(h2)):
        raise NumericError("non-finite logits in the second convolution layer")
    return {"a1": a1, "z1": z1, "a2": a2, "h2": h2, "p": softmax(h2)}


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax, stabilized by subtracting the row maximum."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def forward(
    model: GcnModel,
    prop: np.ndarray,
    x: np.ndarray,
    *,
    masks: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Logits and probabilities; pass masks only for a training-mode pass."""
    _check_shapes(model, prop, x)
    cache = _run(model, prop, x, masks)
    return cache["h2"], cache["p"]


def baseline_forward(
    model: GcnModel,
    x: np.ndarray,
    *,
    masks: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Identical to forward with identity propagation; rows never interact."""
    return forward(model, np.eye(x.shape[0], dtype=np.float64), x, masks=masks)


def loss(probs: np.ndarray, labels: np.ndarray, mask: Sequence[int]) -> float:
    """Summed (not averaged) cross-entropy over the masked rows."""
    if len(mask) == 0:
        raise ValidationError("loss mask must not be empty")
    rows = np.asarray(mask, dtype=np.intp)
    picked = probs[rows, np.asarray(labels)[rows]]
    return float(-np.sum(np.log(np.maximum(picked, LOSS_FLOOR))))


def gradients(
    model: GcnModel,
    prop: np.ndarray,
    x: np.ndarray,
    labels: np.ndarray,
    mask: Sequence[int],
    masks: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic dLoss/dW1, dLoss/dW2 for the pass defined by the same masks."""
    _check_shapes(model, prop, x)
    cache = _run(model, prop, x, masks)
    rows = np.asarray(mask, dtype=np.intp)
    if rows.size == 0:
        raise ValidationError("loss mask must not be empty")

    g2 = np.zeros_like(cache["p"])
    g2[rows] = cache["p"][rows]
    g2[rows, np.asarray(labels)[rows]] -= 1.0

    grad_w2 = cache["a2"].T @ g2
    g_h1_drop = (prop.T @ g2) @ model.w2.T
    if masks is not None:
        g_h1 = g_h1_drop * masks[1] / (1.0 - model.dropout_rate)
    else:
        g_h1 = g_h1_drop
    g_z1 = g_h1 * (cache["z1"] > 0.0)
    grad_w1 = cache["a1"].T @ g_z1
    return grad_w1, grad_w2


@dataclass
class OptimizerState:
    """Adam first and second moments per parameter, plus the step counter."""

    m: list[np.ndarray]
    v: list[np.ndarray]
    step: int = 0


def init_optimizer(params: Sequence[np.ndarray]) -> OptimizerState:
    return OptimizerState(
        m=[np.zeros_like(p) for p in params], v=[np.zeros_like(p) for p in params]
    )


def adam_step(
    state: OptimizerState,
    params: Sequence[np.ndarray],
    grads: Sequence[np.ndarray],
    *,
    learning_rate: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    epsilon: float = 1e-8,
) -> list[np.ndarray]:
    """One bias-corrected Adam update; returns new arrays and mutates state."""
    state.step += 1
    t = state.step
    out = []
    for slot, (param, grad) in enumerate(zip(params, grads)):
        state.m[slot] = beta1 * state.m[slot] + (1.0 - beta1) * grad
        state.v[slot] = beta2 * state.v[slot] + (1.0 - beta2) * grad * grad
        m_hat = state.m[slot] / (1.0 - beta1**t)
        v_hat = state.v[slot] / (1.0 - beta2**t)
        out.append(param - learning_rate * m_hat / (np.sqrt(v_hat) + epsilon))
    return out


def train(
    prop: np.ndarray,
    x: np.ndarray,
    labels: np.ndarray,
    mask: Sequence[int],
    n_classes: int,
    cfg: TrainConfig,
) -> tuple[GcnModel, list[tuple[int, float, float]]]:
    """Full-batch training loop; history rows are (epoch, loss, train_accuracy)."""
    if n_classes < 2:
        raise ValidationError(f"n_classes must be >= 2, got {n_classes}")
    rng = np.random.default_rng(cfg.seed)
    model = init_model(x.shape[1], cfg.hidden_dim, n_classes, rng, cfg.dropout_rate)
    _check_shapes(model, prop, x)
    state = init_optimizer([model.w1, model.w2])
    rows = np.asarray(mask, dtype=np.intp)
    gold = np.asarray(labels)[rows]

    history: list[tuple[int, float, float]] = []
    for epoch in range(1, cfg.epochs + 1):
        masks = make_dropout_masks(rng, cfg.dropout_rate, x.shape, (x.shape[0], cfg.hidden_dim))
        cache = _run(model, prop, x, masks)
        epoch_loss = loss(cache["p"], labels, mask)

        g2 = np.zeros_like(cache["p"])
        g2[rows] = cache["p"][rows]
        g2[rows, gold] -= 1.0
        grad_w2 = cache["a2"].T @ g2
        g_h1_drop = (prop.T @ g2) @ model.w2.T
        if masks is not None:
            g_h1 = g_h1_drop * masks[1] / (1.0 - cfg.dropout_rate)
        else:
            g_h1 = g_h1_drop
        g_z1 = g_h1 * (cache["z1"] > 0.0)
        grad_w1 = cache["a1"].T @ g_z1

        model.w1, model.w2 = adam_step(
            state,
            [model.w1, model.w2],
            [grad_w1, grad_w2],
            learning_rate=cfg.learning_rate,
            beta1=cfg.beta1,
            beta2=cfg.beta2,
            epsilon=cfg.adam_epsilon,
        )
        train_acc = float(np.mean(np.argmax(cache["p"][rows], axis=1) == gold))
        history.append((epoch, epoch_loss, train_acc))
    return model, history


def save_checkpoint(model: GcnModel, path) -> None:
    payload = {
        "d_in": model.d_in,
        "d_hidden": model.d_hidden,
        "n_classes": model.n_classes,
        "dropout_rate": model.dropout_rate,
        "w1": model.w1.tolist(),
        "w2": model.w2.tolist(),
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True)
        handle.write("\n")


def load_checkpoint(path) -> GcnModel:
    with open(path, encoding="utf-8") as handle:
        payload = json.load(handle)
    w1 = np.array(payload["w1"], dtype=np.float64)
    w2 = np.array(payload["w2"], dtype=np.float64)
    if w1.shape != (payload["d_in"], payload["d_hidden"]) or w2.shape != (
        payload["d_hidden"],
        payload["n_classes"],
    ):
        raise ValidationError(f"{path}: checkpoint shapes do not match header")
    return GcnModel(w1=w1, w2=w2, dropout_rate=float(payload.get("dropout_rate", 0.5)))


def write_history_csv(path, history: Sequence[tuple[int, float, float]], header_comment: str = "") -> None:
    lines = []
    if header_comment:
        lines.append("# " + header_comment)
    lines.append("epoch,loss,train_acc")
    for epoch, epoch_loss, train_acc in history:
        lines.append(f"{epoch},{epoch_loss!r},{train_acc!r}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
