from .checkpoint import load_checkpoint, save_checkpoint
from .layers import LayerKind, LayerSpec
from .losses import l1_penalty, mse_loss
from .network import Backward, Network, Trace, backward_pass, forward_pass
from .params import Gradients, ParamSet, adam_step
