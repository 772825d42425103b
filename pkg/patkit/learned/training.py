"""Supervised training of reconstruction networks.

End-to-end training minimises the mean squared error of the whole network
output. Greedy training of learned gradient descent fits one block at a time
against the ground truth, feeding it the iterates of the already-trained
blocks; gradients never cross block boundaries.
"""

import logging
import math
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd

from patkit.bench.dataset import Dataset
from patkit.bench.metrics import batch_scores
from patkit.config.train import Architecture, TrainConfig
from patkit.core.io import write_csv
from patkit.core.rng import RngStream
from patkit.exceptions import ConfigError, MetricError, NumericError, TrainingError
from patkit.learned.recon_net import Domain, ReconNet
from patkit.nn.losses import l1_penalty, mse_loss
from patkit.nn.network import backward_pass, forward_pass
from patkit.nn.params import ParamSet, adam_step

logger = logging.getLogger(__name__)

LOG_COLUMNS = ['step', 'train_loss', 'val_loss', 'val_psnr', 'val_ssim']


@dataclass
class PairSet:
    """Network inputs with their regression targets and, for image outputs, ground-truth images."""

    inputs: np.ndarray
    targets: np.ndarray
    fingerprint: str | None = None

    def __post_init__(self):
        if len(self.inputs) != len(self.targets):
            raise TrainingError(f"{len(self.inputs)} inputs but {len(self.targets)} targets")

    def __len__(self) -> int:
        return len(self.inputs)

    def batch(self, index: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.inputs[index], self.targets[index]

    @classmethod
    def from_dataset(cls, dataset: Dataset, net: ReconNet) -> 'PairSet':
        if net.output_domain != Domain.Image:
            raise ConfigError("Data-domain targets are not stored in a dataset; build the PairSet directly")
        net.check_geometry(dataset.fingerprint)
        return cls(dataset.inputs(net.input_domain), dataset.f, dataset.fingerprint)


class TrainLog:
    """Loss curve rows keyed by step; validation columns stay empty between evaluations."""

    def __init__(self):
        self._rows: dict[int, dict] = {}

    def record(self, step: int, **values) -> None:
        row = self._rows.setdefault(step, {'step': step})
        row.update(values)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([self._rows[s] for s in sorted(self._rows)])
        return frame.reindex(columns=LOG_COLUMNS)

    def column(self, name: str) -> pd.Series:
        return self.to_frame().set_index('step')[name].dropna()

    def save(self, path: str | os.PathLike) -> None:
        write_csv(path, self.to_frame())

    def __len__(self) -> int:
        return len(self._rows)


def _check_loss(loss: float, step: int) -> None:
    if not math.isfinite(loss):
        raise TrainingError("loss is not finite", step=step)


def evaluate_loss(net: ReconNet, pairs: PairSet, chunk: int = 16) -> float:
    """Mean squared error over a whole pair set."""
    total = 0.0
    for start in range(0, len(pairs), chunk):
        x, y = pairs.batch(slice(start, start + chunk))
        loss, _ = mse_loss(net.predict(x, chunk), y)
        total += loss * len(x)
    return total / max(len(pairs), 1)


def validate(net: ReconNet, pairs: PairSet) -> dict[str, float]:
    """Validation loss and, for image outputs, mean PSNR / SSIM against the targets."""
    predictions = net.predict(pairs.inputs)
    loss, _ = mse_loss(predictions, pairs.targets)
    scores = {'val_loss': loss, 'val_psnr': float('nan'), 'val_ssim': float('nan')}
    if net.output_domain == Domain.Image:
        try:
            p, s = batch_scores(predictions, pairs.targets)
        except MetricError as e:
            logger.warning("Skipping validation image scores: %s", e)
        else:
            scores['val_psnr'] = float(np.mean(p))
            scores['val_ssim'] = float(np.mean(s))
    return scores


def _adam(params: ParamSet, grads, tcfg: TrainConfig, step: int, names: list[str] | None = None) -> None:
    try:
        adam_step(params, grads, tcfg, names)
    except NumericError as e:
        raise TrainingError(e.msg, step=step) from e


def train_supervised(net: ReconNet, data: PairSet, tcfg: TrainConfig,
                     val: PairSet | None = None, log: TrainLog | None = None) -> ParamSet:
    """Adam on the mean squared error plus the optional L1 penalty.

    The training loss at step k is measured with the parameters after k
    updates. When a validation set is given the parameters with the lowest
    validation loss are restored before returning.
    """
    if len(data) == 0:
        raise TrainingError("training set is empty")
    net.check_geometry(data.fingerprint)
    log = log if log is not None else TrainLog()
    rng = RngStream(tcfg.seed)
    l1_weight = tcfg.l1_for(net.arch)
    best_loss, best_state = math.inf, None

    def checkpoint(step: int) -> None:
        nonlocal best_loss, best_state
        scores = validate(net, val)
        log.record(step, **scores)
        logger.info("step %d: validation loss %.4e, psnr %.2f", step, scores['val_loss'], scores['val_psnr'])
        if scores['val_loss'] < best_loss:
            best_loss, best_state = scores['val_loss'], net.params.state()

    for step in range(tcfg.n_steps):
        if val is not None and step % tcfg.val_every == 0:
            checkpoint(step)
        x, y = data.batch(rng.integers(tcfg.batch_size, 0, len(data)))
        state = net.forward(x)
        loss, grad_out = mse_loss(state.output, y)
        grads = net.backward(state, grad_out)
        if l1_weight:
            penalty, penalty_grads = l1_penalty(net.params, l1_weight)
            loss += penalty
            grads = {name: grads[name] + penalty_grads[name] for name in grads}
        _check_loss(loss, step)
        if step % tcfg.log_every == 0:
            log.record(step, train_loss=loss)
            logger.debug("step %d: train loss %.4e", step, loss)
        _adam(net.params, grads, tcfg, step)

    if val is not None:
        checkpoint(tcfg.n_steps)
        if best_state is not None:
            net.params.load_state(best_state)
        else:
            logger.warning("No finite validation loss for %s; keeping the final parameters", net.arch.value)
    logger.info("Trained %s for %d steps", net.arch.value, tcfg.n_steps)
    return net.params


def train_greedy(net: ReconNet, data: PairSet, tcfg: TrainConfig,
                 val: PairSet | None = None, log: TrainLog | None = None) -> ParamSet:
    """Block-wise training of learned gradient descent.

    Each block gets ``n_steps // n_iter`` Adam steps with a fresh moment
    estimate. Later blocks start from the identity, so the full network
    evaluated after block n yields the iterate of block n.
    """
    if net.arch != Architecture.LearnedGD:
        raise ConfigError(f"Greedy training applies to learned-gd only, got {net.arch.value}")
    if len(data) == 0:
        raise TrainingError("training set is empty")
    net.check_geometry(data.fingerprint)
    log = log if log is not None else TrainLog()
    rng = RngStream(tcfg.seed)
    l1_weight = tcfg.l1_for(net.arch)
    steps_per_block = tcfg.n_steps // net.n_iter
    g = np.asarray(data.inputs, dtype=net.params.dtype)
    iterate = np.concatenate([net.initial(g[i:i + 16]) for i in range(0, len(g), 16)])
    offset = 0

    for n in range(net.n_iter):
        block = net.blocks[n]
        names = block.param_names()
        net.params.step = 0
        for k in range(steps_per_block):
            step = offset + k
            index = rng.integers(tcfg.batch_size, 0, len(data))
            f_in, y = iterate[index], data.targets[index]
            update, trace = forward_pass(block, net.block_input(f_in, g[index]))
            loss, grad_out = mse_loss(f_in + update[:, 0], y)
            grads = backward_pass(block, trace, grad_out[:, None]).params
            if l1_weight:
                penalty, penalty_grads = l1_penalty(net.params, l1_weight, names)
                loss += penalty
                grads = {name: grads[name] + penalty_grads[name] for name in names}
            _check_loss(loss, step)
            if step % tcfg.log_every == 0:
                log.record(step, train_loss=loss)
            _adam(net.params, grads, tcfg, step, names)
        offset += steps_per_block
        iterate = np.concatenate([net.step(n, iterate[i:i + 16], g[i:i + 16])[0] for i in range(0, len(g), 16)])
        block_loss, _ = mse_loss(iterate, data.targets)
        logger.info("Block %d trained: training loss %.4e", n, block_loss)
        if val is not None:
            log.record(offset, **validate(net, val))
    return net.params
