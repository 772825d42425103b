import time
import uuid
from contextvars import ContextVar, Token
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Optional

import numpy as np


class SpanKind(str, Enum):
    """Level of a span in a run trace.

    ``SESSION`` is one CLI command, ``CASE`` one benchmark case, ``METHOD``
    one reconstruction method inside it and ``STAGE`` a timed step such as
    ``simulate``, ``train`` or ``evaluate``. A span may skip levels: a
    ``reconstruct`` session holds a single METHOD span.
    """

    SESSION = "session"
    CASE = "case"
    METHOD = "method"
    STAGE = "stage"


def _plain(value: Any) -> Any:
    """Numpy scalars and arrays as builtins so the YAML dump stays readable."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


@dataclass
class Span:
    kind: SpanKind
    name: str
    span_id: str = field(default_factory=lambda: uuid.uuid4().hex[:12])
    started: datetime = field(default_factory=datetime.now)
    elapsed_s: Optional[float] = None
    status: str = "ok"
    error: Optional[str] = None
    attributes: dict[str, Any] = field(default_factory=dict)
    children: list['Span'] = field(default_factory=list)
    parent: Optional['Span'] = field(default=None, repr=False)
    _clock: float = field(default_factory=time.perf_counter, repr=False)

    def set_attribute(self, key: str, value: Any) -> None:
        self.attributes[key] = _plain(value)

    def add_child(self, child: 'Span') -> None:
        child.parent = self
        self.children.append(child)

    def finish(self, error: Exception | None = None) -> None:
        self.elapsed_s = time.perf_counter() - self._clock
        if error is not None:
            self.status, self.error = "error", str(error)

    def find(self, kind: SpanKind) -> list['Span']:
        """All spans of ``kind`` in this subtree, self included, depth first."""
        found = [self] if self.kind == kind else []
        for child in self.children:
            found += child.find(kind)
        return found

    def to_dict(self) -> dict[str, Any]:
        record = {
            "kind": self.kind.value,
            "name": self.name,
            "span_id": self.span_id,
            "started": self.started.isoformat(timespec="milliseconds"),
            "elapsed_s": None if self.elapsed_s is None else round(self.elapsed_s, 4),
            "status": self.status,
            "error": self.error,
            "attributes": self.attributes or None,
            "children": [c.to_dict() for c in self.children] or None,
        }
        return {k: v for k, v in record.items() if v is not None}


_current_span: ContextVar[Optional[Span]] = ContextVar("current_span", default=None)


def get_current_span() -> Optional[Span]:
    return _current_span.get()


def set_current_span(span: Optional[Span]) -> Token:
    return _current_span.set(span)


def annotate(key: str, value: Any) -> None:
    """Attach an attribute to the current span; a no-op outside a trace."""
    span = get_current_span()
    if span is not None:
        span.set_attribute(key, value)
