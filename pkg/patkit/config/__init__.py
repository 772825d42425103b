from .bench import BenchConfig, CaseSpec, PhantomFamily, PhantomKind
from .forward import Aperture, ForwardConfig
from .patkit import PatKitConfig
from .solver import VariationalConfig
from .train import Architecture, NetworkConfig, TrainConfig, resolve_architecture
