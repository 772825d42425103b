from .backprojection import adjoint_recon, backproject, ubp2d
from .fourier import fft_planar_recon, propagating_mask
from .results import SolverResult
from .time_reversal import iterative_time_reversal, time_reversal
from .variational import gradient_descent, proximal_gradient_tv, tikhonov_solve, tv_norm, tv_prox
