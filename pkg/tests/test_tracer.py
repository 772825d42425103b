"""Tests for the patkit.tracer run traces."""

import numpy as np
import pytest
import yaml

from patkit.tracer import (
    Span,
    SpanKind,
    Tracer,
    YAMLExporter,
    annotate,
    get_active_tracer,
    get_current_span,
    stage,
    trace_case,
    trace_method,
    trace_session,
    trace_stage,
)


@pytest.fixture
def tracer():
    tracer = Tracer()
    token = tracer.activate()
    yield tracer
    tracer.deactivate(token)


# ---------------------------------------------------------------------------
# Span
# ---------------------------------------------------------------------------


class TestSpan:
    def test_create_span(self):
        span = Span(kind=SpanKind.SESSION, name="run-case")
        assert span.status == "ok"
        assert span.children == []
        assert span.parent is None
        assert len(span.span_id) == 12

    def test_numpy_attributes_become_plain(self):
        span = Span(kind=SpanKind.METHOD, name="lgd")
        span.set_attribute("psnr", np.float64(31.5))
        span.set_attribute("shape", np.array([2, 3]))
        span.set_attribute("scores", {"ssim": np.float32(0.5)})
        assert type(span.attributes["psnr"]) is float
        assert span.attributes["shape"] == [2, 3]
        assert span.attributes["scores"] == {"ssim": 0.5}

    def test_finish_error(self):
        span = Span(kind=SpanKind.STAGE, name="train")
        span.finish(error=ValueError("diverged"))
        assert span.status == "error"
        assert span.error == "diverged"
        assert span.elapsed_s >= 0

    def test_find_depth_first(self):
        root = Span(kind=SpanKind.SESSION, name="s")
        case = Span(kind=SpanKind.CASE, name="case-i")
        root.add_child(case)
        for name in ("fl", "unet"):
            method = Span(kind=SpanKind.METHOD, name=name)
            case.add_child(method)
            method.add_child(Span(kind=SpanKind.STAGE, name="train"))
        assert [s.name for s in root.find(SpanKind.METHOD)] == ["fl", "unet"]
        assert len(root.find(SpanKind.STAGE)) == 2
        assert root.find(SpanKind.SESSION) == [root]

    def test_to_dict(self):
        root = Span(kind=SpanKind.SESSION, name="s")
        child = Span(kind=SpanKind.STAGE, name="simulate")
        child.set_attribute("count", 4)
        root.add_child(child)
        child.finish()
        root.finish()
        d = root.to_dict()
        assert d["kind"] == "session"
        assert "elapsed_s" in d
        assert d["children"][0]["attributes"] == {"count": 4}
        assert "error" not in d


# ---------------------------------------------------------------------------
# Tracer
# ---------------------------------------------------------------------------


class TestTracer:
    def test_nesting_follows_current_span(self, tracer):
        with tracer.span(SpanKind.SESSION, "run") as session:
            with tracer.span(SpanKind.CASE, "case-i") as case:
                assert get_current_span() is case
            assert get_current_span() is session
        assert get_current_span() is None
        assert tracer.session_span is session
        assert session.children == [case]

    def test_error_marks_span(self, tracer):
        with pytest.raises(RuntimeError):
            with tracer.span(SpanKind.SESSION, "run"):
                raise RuntimeError("boom")
        assert tracer.session_span.status == "error"
        assert get_current_span() is None

    def test_activation(self):
        tracer = Tracer()
        assert get_active_tracer() is None
        token = tracer.activate()
        assert get_active_tracer() is tracer
        tracer.deactivate(token)
        assert get_active_tracer() is None

    def test_export_without_exporter(self, tracer):
        with tracer.span(SpanKind.SESSION, "run"):
            pass
        tracer.export()

    def test_yaml_export(self, tmp_path):
        tracer = Tracer(exporter=YAMLExporter(tmp_path / "traces"))
        token = tracer.activate()
        try:
            with tracer.span(SpanKind.SESSION, "gen-data", {"case": "ii"}):
                with stage("simulate", count=3):
                    annotate("fingerprint", "abc")
            tracer.export()
        finally:
            tracer.deactivate(token)
        files = list((tmp_path / "traces").glob("trace_gen-data_*.yaml"))
        assert len(files) == 1
        tree = yaml.safe_load(files[0].read_text())
        assert tree["attributes"] == {"case": "ii"}
        assert tree["children"][0]["attributes"] == {"count": 3, "fingerprint": "abc"}


# ---------------------------------------------------------------------------
# Decorators and helpers
# ---------------------------------------------------------------------------


class CaseLike:
    def __init__(self, case):
        self.case = case


@trace_case(name_arg="spec", label=lambda spec: f"case-{spec.case}")
def run_case(spec, methods):
    return [run_method(m) for m in methods]


@trace_method()
def run_method(method):
    with stage("evaluate"):
        annotate("method", method)
    return method


@trace_stage("simulate")
def simulate():
    raise ValueError("unstable")


class TestDecorators:
    def test_untraced_without_tracer(self):
        assert run_case(CaseLike("i"), ["fl"]) == ["fl"]
        with stage("train") as span:
            assert span is None
        annotate("ignored", 1)

    def test_span_names_from_arguments(self, tracer):
        with tracer.span(SpanKind.SESSION, "run"):
            run_case(CaseLike("iii"), ["unet", "lpd"])
        root = tracer.session_span
        assert [s.name for s in root.find(SpanKind.CASE)] == ["case-iii"]
        methods = root.find(SpanKind.METHOD)
        assert [s.name for s in methods] == ["unet", "lpd"]
        assert methods[1].children[0].attributes == {"method": "lpd"}

    def test_keyword_argument_name(self, tracer):
        with tracer.span(SpanKind.SESSION, "run"):
            run_method(method="pgd-tv")
        assert tracer.session_span.find(SpanKind.METHOD)[0].name == "pgd-tv"

    def test_stage_error_recorded(self, tracer):
        with tracer.span(SpanKind.SESSION, "run"):
            with pytest.raises(ValueError):
                simulate()
        (span,) = tracer.session_span.find(SpanKind.STAGE)
        assert span.name == "simulate"
        assert span.status == "error"
        assert span.error == "unstable"

    def test_session_auto_export(self, tmp_path):
        @trace_session("assemble-matrix")
        def command():
            return 1

        tracer = Tracer(exporter=YAMLExporter(tmp_path))
        token = tracer.activate()
        try:
            assert command() == 1
        finally:
            tracer.deactivate(token)
        assert len(list(tmp_path.glob("trace_assemble-matrix_*.yaml"))) == 1
