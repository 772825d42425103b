class PatKitError(Exception):
    """Base exception for patkit errors"""
    def __init__(self, msg: str):
        self.msg = msg

    def __str__(self):
        return self.msg


class ConfigError(PatKitError):
    pass


class FormatError(PatKitError):
    pass


class SizeError(PatKitError):
    pass


class DimensionError(PatKitError):
    pass


class DatasetError(PatKitError):
    pass


class HandlerError(PatKitError):
    pass


class MetricError(PatKitError):
    pass


class NumericError(PatKitError):
    """Raised when a computation produces non-finite values"""
    def __init__(self, what: str, step: int | None = None):
        self.what = what
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(f"Non-finite values in {what}{where}")


class GeometryError(PatKitError):
    """Raised when data or a network was built for a different forward geometry"""
    def __init__(self, expected: str | None, actual: str | None):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"Geometry fingerprint mismatch: expected {expected!r}, got {actual!r}"
        )


class ConvergenceError(PatKitError):
    def __init__(self, solver: str, residual: float, iterations: int):
        self.solver = solver
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"{solver} did not converge after {iterations} iterations "
            f"(relative residual {residual:.3e})"
        )


class DivergenceError(PatKitError):
    def __init__(self, solver: str, iteration: int, ratio: float):
        self.solver = solver
        self.iteration = iteration
        self.ratio = ratio
        super().__init__(
            f"{solver} diverged at iteration {iteration}: "
            f"residual grew {ratio:.1f}x from its initial value"
        )


class StaleTraceError(PatKitError):
    def __init__(self, trace_version: int, params_version: int):
        self.trace_version = trace_version
        self.params_version = params_version
        super().__init__(
            f"Activation trace was recorded at parameter version {trace_version}, "
            f"but parameters are now at version {params_version}"
        )


class LayerShapeError(DimensionError):
    """Raised when a layer receives an input it cannot process"""
    def __init__(self, layer: str, expected: str, actual: tuple[int, ...]):
        self.layer = layer
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"Layer '{layer}' expected input {expected}, got shape {actual}"
        )


class TrainingError(PatKitError):
    """Raised when training aborts; carries the step and run context"""
    def __init__(self, reason: str, step: int | None = None,
                 method: str | None = None, case: str | None = None):
        self.reason = reason
        self.step = step
        self.method = method
        self.case = case
        context = []
        if case:
            context.append(f"case {case}")
        if method:
            context.append(f"method {method}")
        if step is not None:
            context.append(f"step {step}")
        suffix = f" ({', '.join(context)})" if context else ""
        super().__init__(f"Training aborted: {reason}{suffix}")

    def with_context(self, method: str | None = None, case: str | None = None) -> 'TrainingError':
        return TrainingError(
            self.reason,
            step=self.step,
            method=method or self.method,
            case=case or self.case,
        )


class HandlerNotFoundError(HandlerError):
    """Raised when a CLI command has no registered handler"""
    def __init__(self, handler: str):
        self.handler = handler
        super().__init__(f"Handler '{handler}' not found")
