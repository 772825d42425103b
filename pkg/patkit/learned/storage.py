import logging
import os

from patkit.config.forward import ForwardConfig
from patkit.config.train import NetworkConfig
from patkit.exceptions import FormatError, GeometryError
from patkit.forward.matrix import ForwardMatrix
from patkit.learned.architectures import build_recon_net
from patkit.learned.recon_net import Domain, ReconNet
from patkit.nn.checkpoint import load_checkpoint, save_checkpoint

logger = logging.getLogger(__name__)


def save_recon_net(path: str | os.PathLike, net: ReconNet) -> None:
    save_checkpoint(path, net.params, net.describe())


def load_recon_net(path: str | os.PathLike, matrix: ForwardMatrix | None = None) -> ReconNet:
    """Rebuild a network from its checkpoint descriptor and load the trained parameters.

    Model-based networks need ``matrix``; it must carry the fingerprint
    recorded at training time.
    """
    tensors, descriptor = load_checkpoint(path)
    try:
        arch = descriptor['architecture']
        cfg = NetworkConfig.model_validate(descriptor['network'])
        geometry = ForwardConfig.model_validate(descriptor['geometry'])
    except KeyError as e:
        raise FormatError(f"Checkpoint {path} has no {e.args[0]!r} entry in its descriptor")
    recorded = descriptor.get('fingerprint')
    if matrix is not None and recorded is not None and matrix.fingerprint != recorded:
        raise GeometryError(recorded, matrix.fingerprint)
    kwargs = {}
    if descriptor.get('output_domain') == Domain.Data:
        kwargs['output_domain'] = Domain.Data
    net = build_recon_net(arch, cfg, geometry, matrix, **kwargs)
    net.params.load_state(tensors)
    logger.info("Loaded %s from %s", arch, path)
    return net
