from patkit.tracer.tracer import get_active_tracer, stage
from patkit.tracer.decorators import trace_case, trace_method, trace_session, trace_stage
from patkit.tracer.exporter import YAMLExporter
from patkit.tracer.span import Span, SpanKind, annotate, get_current_span, set_current_span
from patkit.tracer.tracer import Tracer

__all__ = [
    "Tracer",
    "YAMLExporter",
    "Span",
    "SpanKind",
    "annotate",
    "get_active_tracer",
    "get_current_span",
    "set_current_span",
    "stage",
    "trace_session",
    "trace_case",
    "trace_method",
    "trace_stage",
]
