import logging
from pathlib import Path

import yaml

from patkit.tracer.span import Span

logger = logging.getLogger(__name__)


class YAMLExporter:
    """Writes each finished session tree to ``trace_<name>_<time>_<id>.yaml``."""

    def __init__(self, output_dir: Path | str) -> None:
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def export(self, root_span: Span, filename: str | None = None) -> Path:
        stamp = root_span.started.strftime("%Y%m%d_%H%M%S")
        path = self.output_dir / (filename or f"trace_{root_span.name}_{stamp}_{root_span.span_id}.yaml")
        path.write_text(
            yaml.safe_dump(root_span.to_dict(), sort_keys=False, allow_unicode=True),
            encoding="utf-8",
        )
        logger.info("Trace of %s written to %s", root_span.name, path)
        return path
