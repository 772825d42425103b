from .assemble import AssembleMatrixHandler
from .case import RunCaseHandler
from .data import GenDataHandler
from .evaluate import EvaluateHandler
from .reconstruct import ReconstructHandler
from .train import TrainHandler
