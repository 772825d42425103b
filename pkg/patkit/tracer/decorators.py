"""Tracer decorators for the four span levels.

Each decorator wraps the call in a span of its :class:`SpanKind` and makes it
the current span for the duration of the call. Without an activated tracer
the function runs untraced.

Usage::

    from patkit.tracer import trace_session, trace_case, trace_method, trace_stage

    @trace_session(name_arg="command", label=lambda command: command.handler)
    def invoke(session, command):
        ...

    @trace_case(name_arg="spec", label=lambda spec: f"case-{spec.case}")
    def run_case(spec, A, ...):
        ...

    @trace_method(name_arg="method")
    def _run_method(method, ...):
        ...
"""

import functools
import inspect
from typing import Any, Callable, TypeVar

from patkit.tracer.span import SpanKind
from patkit.tracer.tracer import get_active_tracer

F = TypeVar("F", bound=Callable[..., Any])


def _make_decorator(
    kind: SpanKind,
    name: str | None = None,
    *,
    auto_export: bool = False,
    name_arg: str | None = None,
    label: Callable[[Any], str] = str,
) -> Callable[[F], F]:
    """Build a decorator that wraps a function in a span.

    Parameters
    ----------
    name:
        Fixed label for the span; defaults to the function name.
    auto_export:
        Export the trace after the span finishes (session spans).
    name_arg:
        Read the span name from this argument at call time, formatted by
        ``label``.
    """

    def decorator(fn: F) -> F:
        signature = inspect.signature(fn)

        @functools.wraps(fn)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            tracer = get_active_tracer()
            if tracer is None:
                return fn(*args, **kwargs)

            span_name = name or fn.__name__
            if name_arg is not None:
                bound = signature.bind_partial(*args, **kwargs)
                if name_arg in bound.arguments:
                    span_name = label(bound.arguments[name_arg])

            span, token = tracer.start_span(kind, span_name)
            error = None
            try:
                return fn(*args, **kwargs)
            except Exception as exc:
                error = exc
                raise
            finally:
                tracer.end_span(span, token, error)
                if auto_export:
                    tracer.export()

        return wrapper  # type: ignore[return-value]

    return decorator


def trace_session(name: str | None = None, *, name_arg: str | None = None,
                  label: Callable[[Any], str] = str) -> Callable[[F], F]:
    """Root span of one command; the trace is exported when it ends."""
    return _make_decorator(SpanKind.SESSION, name, auto_export=True, name_arg=name_arg, label=label)


def trace_case(name: str | None = None, *, name_arg: str | None = None,
               label: Callable[[Any], str] = str) -> Callable[[F], F]:
    return _make_decorator(SpanKind.CASE, name, name_arg=name_arg, label=label)


def trace_method(name: str | None = None, *, name_arg: str | None = "method",
                 label: Callable[[Any], str] = str) -> Callable[[F], F]:
    """One reconstruction method: training plus evaluation, or a classical solve."""
    return _make_decorator(SpanKind.METHOD, name, name_arg=name_arg, label=label)


def trace_stage(name: str) -> Callable[[F], F]:
    return _make_decorator(SpanKind.STAGE, name)
