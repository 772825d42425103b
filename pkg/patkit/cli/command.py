from dataclasses import dataclass, field
from typing import Any


@dataclass
class Command:
    handler: str | None = None
    options: dict[str, Any] = field(default_factory=dict)

    def get(self, key: str, default: Any = None) -> Any:
        value = self.options.get(key)
        return default if value is None else value

    @property
    def text(self):
        flags = [f"--{k.replace('_', '-')} {v}" for k, v in self.options.items() if v not in (None, False)]
        return " ".join([self.handler or ''] + flags).strip()
