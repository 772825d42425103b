from .io import read_tensor, write_tensor, write_pgm, read_pgm
from .rng import RngStream, normal_draws
from .types import Image, SensorData, as_tensor
