import logging
from typing import Callable

import numpy as np

from patkit.classical import (
    adjoint_recon,
    backproject,
    fft_planar_recon,
    gradient_descent,
    iterative_time_reversal,
    proximal_gradient_tv,
    tikhonov_solve,
    time_reversal,
    ubp2d,
)
from patkit.cli.command import Command
from patkit.cli.handler.builtin.support import open_matrix, override, require
from patkit.cli.handler.result import HandlerResult
from patkit.config.patkit import PatKitConfig
from patkit.config.solver import VariationalConfig
from patkit.core.io import read_tensor, write_pgm, write_tensor
from patkit.core.types import Image
from patkit.exceptions import HandlerError
from patkit.forward.matrix import ForwardMatrix
from patkit.learned.recon_net import Domain, reconstruct
from patkit.learned.storage import load_recon_net
from patkit.tracer import trace_stage

logger = logging.getLogger(__name__)

Solver = Callable[[ForwardMatrix, np.ndarray, VariationalConfig], Image]

CLASSICAL: dict[str, Solver] = {
    'adjoint': lambda A, g, s: adjoint_recon(A, g),
    'bp': lambda A, g, s: backproject(g, A.config),
    'ubp2d': lambda A, g, s: ubp2d(g, A.config),
    'fft': lambda A, g, s: fft_planar_recon(g, A.config),
    'tr': lambda A, g, s: time_reversal(g, A.config),
    'itr': lambda A, g, s: iterative_time_reversal(g, A.config, s.tr_iterations, A).image,
    'gd': lambda A, g, s: gradient_descent(A, g, s).image,
    'pgd-tv': lambda A, g, s: proximal_gradient_tv(A, g, s).image,
    'tikhonov': lambda A, g, s: tikhonov_solve(A, g, s.alpha, s),
}
METHODS = sorted(CLASSICAL) + ['learned']


@trace_stage("solve")
def solve_batch(method: str, A: ForwardMatrix, batch: np.ndarray, solver: VariationalConfig) -> np.ndarray:
    return np.stack([CLASSICAL[method](A, g, solver).data for g in batch])


class ReconstructHandler:
    """Reconstruct one (n_det, n_t) record or a (B, n_det, n_t) batch from a PATT file."""

    def __init__(self, config: PatKitConfig):
        self.config = config

    def _learned(self, command: Command, A: ForwardMatrix, batch: np.ndarray) -> np.ndarray:
        require(command, 'ckpt')
        net = load_recon_net(command.get('ckpt'), A)
        if net.input_domain == Domain.Image:
            batch = A.adjoint_batch(batch.reshape(len(batch), -1)).reshape(len(batch), A.m, A.m)
        return np.stack([reconstruct(net, x).data for x in batch])

    def handle(self, command: Command) -> HandlerResult:
        require(command, 'method', 'data', 'out')
        method = command.get('method')
        if method not in METHODS:
            raise HandlerError(f"Unknown method '{method}'; choose one of {', '.join(METHODS)}")
        A = open_matrix(command, self.config)
        data = read_tensor(command.get('data'))
        batch = data[None] if data.ndim == 2 else data
        if method == 'learned':
            images = self._learned(command, A, batch)
        else:
            solver = override(self.config.solver, alpha=command.get('alpha'), eta=command.get('eta'),
                              n_iter=command.get('iters'))
            images = solve_batch(method, A, batch, solver)
        result = images[0] if data.ndim == 2 else images
        write_tensor(command.get('out'), result)
        if command.get('pgm'):
            write_pgm(command.get('pgm'), images[0])
        logger.info("Reconstructed %d record(s) with %s", len(batch), method)
        return HandlerResult(
            message=[f"{len(batch)} reconstruction(s) written to {command.get('out')}"],
            details={'method': method, 'count': len(batch)},
        )
