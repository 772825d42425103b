from patkit.cli.handler.handler import Handler


class HandlerRegistry:
    def __init__(self, **kwargs: Handler):
        self.handlers = kwargs

    def names(self) -> list[str]:
        return sorted(self.handlers)

    def get(self, name: str | None) -> Handler | None:
        if name is None:
            return None
        return self.handlers.get(name) or self.handlers.get(name.replace('-', '_'))
