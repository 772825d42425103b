from .geometry import detector_positions, geometry_fingerprint
from .matrix import (
    ForwardMatrix,
    apply_adjoint,
    apply_forward,
    assemble_matrix,
    estimate_operator_norm,
    load_matrix,
    save_matrix,
)
from .noise import add_noise
from .wave import WaveSolver, simulate_wave
