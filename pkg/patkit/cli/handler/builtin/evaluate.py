import numpy as np

from patkit.bench.metrics import batch_scores
from patkit.cli.command import Command
from patkit.cli.handler.builtin.support import require
from patkit.cli.handler.result import HandlerResult
from patkit.config.patkit import PatKitConfig
from patkit.core.io import read_tensor


class EvaluateHandler:
    def __init__(self, config: PatKitConfig):
        self.config = config

    def handle(self, command: Command) -> HandlerResult:
        require(command, 'pred', 'truth')
        pred = read_tensor(command.get('pred'))
        truth = read_tensor(command.get('truth'))
        if pred.ndim == 2:
            pred, truth = pred[None], truth[None]
        p, s = batch_scores(pred, truth)
        return HandlerResult(
            message=[f"PSNR: {np.mean(p):.2f} dB", f"SSIM: {np.mean(s):.4f}"],
            details={'psnr': float(np.mean(p)), 'ssim': float(np.mean(s))},
        )
