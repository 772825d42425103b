import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field
from typing_extensions import Annotated

from patkit.exceptions import ConfigError

GIB = 1024 ** 3


class Aperture(str, Enum):
    Top = "top"
    Full = "full"


class ForwardConfig(BaseModel):
    """Geometry and discretisation of the acoustic forward model.

    All lengths are in pixels (grid spacing h = 1) and times in the same
    normalised units, so the simulation step is ``dt = cfl / c``.
    """

    model_config = ConfigDict(frozen=True, use_enum_values=True)

    m: Annotated[int, Field(default=64, ge=2, description="Side length of the square image grid")]
    c: Annotated[float, Field(default=1.0, gt=0, description="Constant sound speed")]
    cfl: Annotated[float, Field(default=0.5, gt=0, description="Courant number c * dt / h")]
    n_det: Annotated[int | None, Field(
        default=None, ge=1,
        description="Number of detectors. Defaults to one per top-row pixel, "
                    "or every boundary node for the full aperture.",
    )]
    n_t: Annotated[int, Field(default=192, ge=2, description="Number of recorded time samples")]
    pad: Annotated[int, Field(default=16, ge=0, description="Width of the absorbing layer in pixels")]
    sponge_strength: Annotated[float, Field(
        default=2.0, ge=0,
        description="Damping rate at the outer edge of the absorbing layer in units of c / h, "
                    "ramped quadratically from zero",
    )]
    aperture: Annotated[Aperture, Field(
        default=Aperture.Top,
        description="'top' places a line detector on the top edge, 'full' surrounds the image",
    )]
    memory_cap_bytes: Annotated[int, Field(
        default=2 * GIB, gt=0,
        description="Refuse to allocate a dense forward matrix larger than this",
    )]
    workers: Annotated[int, Field(default=1, ge=1, description="Threads used to assemble matrix columns")]
    chunk_size: Annotated[int, Field(default=256, ge=1, description="Impulses simulated together per batch")]

    @property
    def dt(self) -> float:
        return self.cfl / self.c

    @property
    def detector_count(self) -> int:
        if self.n_det is not None:
            return self.n_det
        if self.aperture == Aperture.Full.value:
            return 4 * (self.m - 1)
        return self.m

    @property
    def n_pixels(self) -> int:
        return self.m * self.m

    @property
    def n_samples(self) -> int:
        return self.detector_count * self.n_t

    @property
    def grid_side(self) -> int:
        return self.m + 2 * self.pad

    def check(self) -> None:
        """Raise ConfigError unless the configuration describes a stable, covering simulation."""
        if self.cfl > 1 / math.sqrt(2) + 1e-12:
            raise ConfigError(
                f"CFL number {self.cfl} exceeds the 2D stability bound 1/sqrt(2)"
            )
        travel = math.sqrt(2) * self.m / self.c
        if self.n_t * self.dt < travel - 1e-9:
            raise ConfigError(
                f"Recording time n_t * dt = {self.n_t * self.dt:.3f} does not cover "
                f"the diagonal travel time {travel:.3f}; increase n_t"
            )
        if self.aperture == Aperture.Full.value:
            if self.detector_count != 4 * (self.m - 1):
                raise ConfigError(
                    f"The full aperture places one detector on each of the "
                    f"{4 * (self.m - 1)} boundary nodes, got n_det={self.detector_count}"
                )
        elif self.detector_count > self.m or self.m % self.detector_count != 0:
            raise ConfigError(
                f"{self.detector_count} detectors cannot be placed with uniform pitch "
                f"on a top edge of {self.m} pixels"
            )

    def matrix_bytes(self, itemsize: int = 8) -> int:
        return self.n_samples * self.n_pixels * itemsize

    def geometry_dict(self) -> dict:
        """Fields that determine the matrix entries (execution knobs excluded)."""
        return self.model_dump(exclude={"memory_cap_bytes", "workers", "chunk_size"})

    def to_sidecar(self) -> str:
        lines = [f"{key} = {value}" for key, value in self.model_dump().items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_sidecar(cls, text: str) -> 'ForwardConfig':
        data: dict[str, str | None] = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"Malformed sidecar line: {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            data[key] = None if value == "None" else value
        return cls.model_validate(data)
