import logging
from dataclasses import dataclass

from patkit.cli.command import Command
from patkit.cli.handler.builtin import (
    AssembleMatrixHandler,
    EvaluateHandler,
    GenDataHandler,
    ReconstructHandler,
    RunCaseHandler,
    TrainHandler,
)
from patkit.cli.handler.registry import HandlerRegistry
from patkit.config.patkit import PatKitConfig
from patkit.exceptions import HandlerNotFoundError
from patkit.tracer import annotate

logger = logging.getLogger(__name__)


@dataclass
class Response:
    messages: list[str]


class Session:
    def __init__(self, *, handlers: HandlerRegistry, config: PatKitConfig):
        self.handler_registry = handlers
        self.config = config

    @classmethod
    def from_config(cls, config: PatKitConfig) -> 'Session':
        handlers = HandlerRegistry(
            assemble_matrix=AssembleMatrixHandler(config),
            reconstruct=ReconstructHandler(config),
            train=TrainHandler(config),
            gen_data=GenDataHandler(config),
            run_case=RunCaseHandler(config),
            evaluate=EvaluateHandler(config),
        )
        return cls(handlers=handlers, config=config)

    def invoke(self, command: Command) -> Response:
        handler = self.handler_registry.get(command.handler)
        if not handler:
            raise HandlerNotFoundError(command.handler or '')
        logger.debug("Running %s", command.text)
        annotate("command", command.text)
        result = handler.handle(command)
        return Response(messages=list(result.message or []))
