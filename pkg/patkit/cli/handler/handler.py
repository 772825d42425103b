from typing import Protocol

from patkit.cli.command import Command

from .result import HandlerResult


class Handler(Protocol):
    def handle(self, command: Command) -> HandlerResult:
        ...
