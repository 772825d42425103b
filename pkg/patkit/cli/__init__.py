from .command import Command
from .session import Session
from .handler import Handler, HandlerResult, HandlerRegistry
