from .architectures import (
    build_fully_learned,
    build_learned_gd,
    build_learned_pd,
    build_postproc_unet,
    build_preproc_cnn,
    build_recon_net,
)
from .recon_net import Domain, ReconNet, reconstruct
from .storage import load_recon_net, save_recon_net
from .training import PairSet, TrainLog, train_greedy, train_supervised
