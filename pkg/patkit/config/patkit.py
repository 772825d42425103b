import logging

from pydantic import BaseModel, Field, model_validator
from typing_extensions import Annotated

from patkit.config.bench import BenchConfig
from patkit.config.forward import ForwardConfig
from patkit.config.solver import VariationalConfig

_logger = logging.getLogger(__name__)


class PatKitConfig(BaseModel):
    forward: Annotated[ForwardConfig, Field(default_factory=ForwardConfig)]
    solver: Annotated[VariationalConfig, Field(default_factory=VariationalConfig)]
    bench: Annotated[BenchConfig, Field(default_factory=BenchConfig)]
    output_dir: Annotated[str, Field(default='runs', description='Directory for reports, panels and loss curves')]
    trace_dir: Annotated[str | None, Field(
        default=None,
        description='Directory for YAML run traces. Tracing is disabled when unset.',
    )]

    @model_validator(mode='before')
    @classmethod
    def _migrate_geometry(cls, data):
        """Backward compatibility: rename geometry -> forward."""
        if isinstance(data, dict) and 'geometry' in data:
            if data.get('forward') is None:
                data['forward'] = data.pop('geometry')
                _logger.warning(
                    "Config field 'geometry' is deprecated. "
                    "Please use 'forward' instead."
                )
            else:
                data.pop('geometry')
                _logger.warning(
                    "Both 'geometry' and 'forward' are set in config. "
                    "Using 'forward' value. Please remove 'geometry'."
                )
        return data
