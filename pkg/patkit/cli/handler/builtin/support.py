import logging
from typing import Any, TypeVar

from pydantic import BaseModel, ValidationError

from patkit.cli.command import Command
from patkit.config.patkit import PatKitConfig
from patkit.exceptions import ConfigError, HandlerError
from patkit.forward.matrix import ForwardMatrix, assemble_matrix, load_matrix

logger = logging.getLogger(__name__)

M = TypeVar('M', bound=BaseModel)


def override(model: M, **updates: Any) -> M:
    """Copy of ``model`` with every non-None update applied and validated."""
    updates = {k: v for k, v in updates.items() if v is not None}
    if not updates:
        return model
    try:
        return type(model).model_validate({**model.model_dump(), **updates})
    except ValidationError as e:
        raise ConfigError(str(e))


def require(command: Command, *keys: str) -> None:
    missing = [f"--{k.replace('_', '-')}" for k in keys if command.options.get(k) is None]
    if missing:
        raise HandlerError(f"{command.handler} needs {', '.join(missing)}")


def open_matrix(command: Command, config: PatKitConfig) -> ForwardMatrix:
    """Load ``--matrix`` when given, otherwise assemble one for the configured geometry."""
    if command.get('matrix'):
        return load_matrix(command.get('matrix'))
    logger.warning("No --matrix given; assembling one for the configured geometry")
    return assemble_matrix(config.forward)
