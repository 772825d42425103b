from patkit.cli.command import Command
from patkit.cli.handler.builtin.support import override, require
from patkit.cli.handler.result import HandlerResult
from patkit.config.patkit import PatKitConfig
from patkit.forward.matrix import assemble_matrix, save_matrix
from patkit.tracer import annotate


class AssembleMatrixHandler:
    def __init__(self, config: PatKitConfig):
        self.config = config

    def handle(self, command: Command) -> HandlerResult:
        require(command, 'out')
        forward = override(
            self.config.forward,
            m=command.get('m'),
            n_det=command.get('n_det'),
            n_t=command.get('n_t'),
            aperture=command.get('aperture'),
            workers=command.get('workers'),
        )
        A = assemble_matrix(forward)
        save_matrix(A, command.get('out'))
        annotate('fingerprint', A.fingerprint)
        return HandlerResult(
            message=[f"Forward matrix {A.shape[0]} x {A.shape[1]} (fingerprint {A.fingerprint}) "
                     f"written to {command.get('out')}"],
            details={'fingerprint': A.fingerprint, 'shape': A.shape},
        )
