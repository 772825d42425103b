from .handler import Handler
from .result import HandlerResult
from .registry import HandlerRegistry

__all__ = [
    'Handler',
    'HandlerResult',
    'HandlerRegistry',
]
