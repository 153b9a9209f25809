"""
GNN forward pass with a recording tape, exact reverse-mode gradients w.r.t. the
filter taps, a multi-feature forward used for reference targets, and plain
gradient-descent fitting against targets.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from loguru import logger

from ..errors import DimensionError, NonFiniteGradient, TapeMismatch
from .filters import filter_apply_transpose, shifted_signals
from .schemas import GnnParams, Nonlinearity, NonlinearityKind, OutputSquash

# ============== CONFIGURATION ==============
FIT_STEP = 0.05
FIT_ITERS = 300
FIT_GRAD_CLIP = 10.0


@dataclass(eq=False)
class GnnTape:
    """Intermediates of one forward call; consumed by exactly one gnn_backward."""
    params: GnnParams
    gso: object
    shifts: list = field(default_factory=list)  # per layer, (K+1, n) = [S^k x_{l-1}]
    pre: list = field(default_factory=list)  # per layer, z_l
    outputs: list = field(default_factory=list)  # per layer, x_l (last one squashed)
    used: bool = False

    @property
    def n(self) -> int:
        return self.pre[0].shape[0]

    @property
    def pre_squash(self) -> np.ndarray:
        return self.pre[-1]


def gnn_forward(params: GnnParams, gso, x: np.ndarray) -> tuple[np.ndarray, GnnTape]:
    """
    x_l = sigma(sum_k h_lk S^k x_{l-1}) for l = 1..L.

    With a sigmoid output squash the last layer applies the sigmoid in place
    of sigma, so the output lies in (0, 1)^n.
    """
    tape = GnnTape(params=params, gso=gso)
    signal = np.asarray(x, dtype=float)
    last = params.n_layers - 1
    for l, h in enumerate(params.taps):
        shifts = shifted_signals(gso, signal, params.order)
        z = h @ shifts
        signal = params.squash(z) if l == last else params.nonlinearity(z)
        tape.shifts.append(shifts)
        tape.pre.append(z)
        tape.outputs.append(signal)
    return signal, tape


def _squash_derivative(params: GnnParams, z: np.ndarray, out: np.ndarray) -> np.ndarray:
    if params.output_squash is OutputSquash.SIGMOID:
        return out * (1.0 - out)
    return params.nonlinearity.derivative(z)


def gnn_backward(tape: GnnTape, grad_output: np.ndarray) -> np.ndarray:
    """Gradient of a scalar loss w.r.t. every h_lk, shaped like params.taps."""
    if tape.used:
        raise TapeMismatch("tape was already consumed by a backward pass")
    grad_output = np.asarray(grad_output, dtype=float)
    if grad_output.shape != tape.outputs[-1].shape:
        raise TapeMismatch(f"upstream gradient has shape {grad_output.shape}, forward output {tape.outputs[-1].shape}")
    tape.used = True

    params = tape.params
    grads = np.zeros_like(params.taps)
    last = params.n_layers - 1
    dz = grad_output * _squash_derivative(params, tape.pre[last], tape.outputs[last])
    for l in range(last, -1, -1):
        grads[l] = tape.shifts[l] @ dz
        if l == 0:
            break
        dx = filter_apply_transpose(params.taps[l], tape.gso, dz)
        dz = dx * params.nonlinearity.derivative(tape.pre[l - 1])
    return grads


@dataclass(frozen=True, eq=False)
class MultiFeatureGnn:
    """
    GNN with F features per hidden layer.

    layers[l] has shape (F_out, F_in, K+1); the first layer reads one input
    feature and the last writes one output feature.
    """
    layers: tuple
    nonlinearity: Nonlinearity = field(default_factory=Nonlinearity)

    def __post_init__(self):
        layers = tuple(np.asarray(h, dtype=float) for h in self.layers)
        for prev, cur in zip(layers, layers[1:]):
            if prev.shape[0] != cur.shape[1]:
                raise DimensionError(f"layer widths do not chain: {prev.shape} -> {cur.shape}")
        object.__setattr__(self, "layers", layers)

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def width(self) -> int:
        """F, the widest feature count, used in the F^L factor."""
        return max(max(h.shape[0], h.shape[1]) for h in self.layers)

    @property
    def order(self) -> int:
        return max(h.shape[2] for h in self.layers) - 1

    def filters(self) -> list[np.ndarray]:
        """Every scalar filter h_l^{fg} as a tap vector."""
        return [h[f, g] for h in self.layers for f in range(h.shape[0]) for g in range(h.shape[1])]

    def forward(self, gso, x: np.ndarray) -> np.ndarray:
        features = np.asarray(x, dtype=float).reshape(-1, 1)
        for h in self.layers:
            shifts = shifted_signals(gso, features, h.shape[2] - 1)  # (K+1, n, F_in)
            z = np.einsum("kng,fgk->nf", shifts, h)
            features = self.nonlinearity(z)
        return features[:, 0] if features.shape[1] == 1 else features

    @classmethod
    def random(
        cls,
        depth: int,
        width: int,
        order: int,
        seed: int,
        nonnegative: bool = False,
        nonlinearity: Optional[Nonlinearity] = None,
    ) -> "MultiFeatureGnn":
        """Random GNN whose filters each have sum_k |h_k| = 1 / F_in."""
        rng = np.random.default_rng(seed)
        layers = []
        for l in range(depth):
            f_in = 1 if l == 0 else width
            f_out = 1 if l == depth - 1 else width
            h = rng.uniform(0.0, 1.0, size=(f_out, f_in, order + 1)) if nonnegative else rng.normal(size=(f_out, f_in, order + 1))
            h /= np.abs(h).sum(axis=2, keepdims=True) * f_in
            layers.append(h)
        return cls(layers=tuple(layers), nonlinearity=nonlinearity or Nonlinearity(NonlinearityKind.RELU))


def mse_loss(params: GnnParams, gso, x: np.ndarray, target: np.ndarray) -> float:
    """(1/n) ||Phi(S, x) - target||^2."""
    out, _ = gnn_forward(params, gso, x)
    return float(np.mean((out - target) ** 2))


def fit_supervised(
    params: GnnParams,
    samples: Sequence[tuple],
    iters: int = FIT_ITERS,
    step: float = FIT_STEP,
    grad_clip: float = FIT_GRAD_CLIP,
) -> tuple[GnnParams, list[float]]:
    """
    Gradient descent on the mean over samples (gso, x, target) of (1/n)||Phi - target||^2.

    Returns the fitted params and the loss before each step.
    """
    if not samples:
        raise ValueError("fit_supervised needs at least one sample")
    history = []
    for it in range(iters):
        grad = np.zeros_like(params.taps)
        loss = 0.0
        for gso, x, target in samples:
            out, tape = gnn_forward(params, gso, x)
            resid = out - target
            loss += float(np.mean(resid ** 2))
            grad += gnn_backward(tape, 2.0 * resid / resid.size)
        grad /= len(samples)
        history.append(loss / len(samples))
        if not np.all(np.isfinite(grad)):
            raise NonFiniteGradient(f"non-finite gradient at fitting iteration {it}")
        norm = float(np.linalg.norm(grad))
        if norm > grad_clip:
            grad *= grad_clip / norm
        params = params.with_taps(params.taps - step * grad)
    logger.debug(f"fit_supervised: loss {history[0]:.4g} -> {history[-1]:.4g} over {iters} iterations")
    return params, history
