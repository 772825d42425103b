import logging
from contextlib import contextmanager
from contextvars import ContextVar, Token
from typing import Any, Iterator, Optional

from patkit.tracer.exporter import YAMLExporter
from patkit.tracer.span import Span, SpanKind, _current_span, get_current_span, set_current_span

logger = logging.getLogger(__name__)


class Tracer:
    """Collects the span tree of one command.

    Spans nest under whichever span is current in the calling context. The
    outermost SESSION span is the root handed to the exporter; without an
    exporter the tree stays in memory, which is what the tests inspect.
    """

    def __init__(self, exporter: YAMLExporter | None = None) -> None:
        self.exporter = exporter
        self.root: Optional[Span] = None

    @property
    def session_span(self) -> Optional[Span]:
        return self.root

    def activate(self) -> Token:
        return _active_tracer.set(self)

    def deactivate(self, token: Token) -> None:
        _active_tracer.reset(token)

    def start_span(self, kind: SpanKind, name: str,
                   attributes: dict[str, Any] | None = None) -> tuple[Span, Token]:
        span = Span(kind=kind, name=name)
        for key, value in (attributes or {}).items():
            span.set_attribute(key, value)
        parent = get_current_span()
        if parent is not None:
            parent.add_child(span)
        elif kind == SpanKind.SESSION or self.root is None:
            self.root = span
        return span, set_current_span(span)

    def end_span(self, span: Span, token: Token, error: Exception | None = None) -> None:
        span.finish(error=error)
        _current_span.reset(token)
        logger.debug("%s %s finished in %.3fs (%s)", span.kind.value, span.name, span.elapsed_s, span.status)

    @contextmanager
    def span(self, kind: SpanKind, name: str, attributes: dict[str, Any] | None = None) -> Iterator[Span]:
        span, token = self.start_span(kind, name, attributes)
        error = None
        try:
            yield span
        except Exception as exc:
            error = exc
            raise
        finally:
            self.end_span(span, token, error)

    def export(self) -> None:
        if self.exporter is None or self.root is None:
            logger.debug("Trace not exported (exporter=%s, root=%s)", self.exporter, self.root)
            return
        self.exporter.export(self.root)


_active_tracer: ContextVar[Tracer | None] = ContextVar("active_tracer", default=None)


def get_active_tracer() -> Tracer | None:
    return _active_tracer.get()


@contextmanager
def stage(name: str, **attributes: Any) -> Iterator[Span | None]:
    """STAGE span under the active tracer, or nothing when tracing is off."""
    tracer = get_active_tracer()
    if tracer is None:
        yield None
        return
    with tracer.span(SpanKind.STAGE, name, attributes) as span:
        yield span
