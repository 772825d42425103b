from dataclasses import dataclass, field
from typing import Any


@dataclass
class HandlerResult:
    message: list[str] | None = None
    details: dict[str, Any] = field(default_factory=dict)
