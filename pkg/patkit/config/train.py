from enum import Enum

from pydantic import BaseModel, ConfigDict, Field
from typing_extensions import Annotated, Literal


class Architecture(str, Enum):
    FullyLearned = "fully-learned"
    PostProcUNet = "postproc-unet"
    PreProcCNN = "preproc-cnn"
    LearnedGD = "learned-gd"
    LearnedPD = "learned-pd"


ARCH_ALIASES: dict[str, Architecture] = {
    "fl": Architecture.FullyLearned,
    "unet": Architecture.PostProcUNet,
    "pre": Architecture.PreProcCNN,
    "lgd": Architecture.LearnedGD,
    "lpd": Architecture.LearnedPD,
}


def resolve_architecture(name: str) -> Architecture:
    if name in ARCH_ALIASES:
        return ARCH_ALIASES[name]
    return Architecture(name)


class NetworkConfig(BaseModel):
    """Architecture hyper-parameters."""

    model_config = ConfigDict(frozen=True)

    n_iter: Annotated[int, Field(default=5, ge=1, description="Unroll depth of learned-gd / learned-pd")]
    channels: Annotated[int, Field(default=32, ge=1, description="Hidden channels of the small CNN blocks")]
    unet_channels: Annotated[tuple[int, int, int], Field(
        default=(32, 64, 128), description="Channels of the three U-Net scales",
    )]
    dense_widths: Annotated[tuple[int, int] | None, Field(
        default=None,
        description="Widths of the first two dense layers of the fully-learned net; "
                    "defaults to (2M, M)",
    )]
    memory_cap_bytes: Annotated[int, Field(default=2 * 1024 ** 3, gt=0)]
    precision: Annotated[Literal["float32", "float64"], Field(default="float64")]
    seed: Annotated[int, Field(default=0, description="Seed of the weight initialisation")]


class TrainConfig(BaseModel):
    """Optimisation settings for supervised training."""

    model_config = ConfigDict(frozen=True)

    learning_rate: Annotated[float, Field(default=1e-4, gt=0)]
    batch_size: Annotated[int, Field(default=4, ge=1)]
    n_steps: Annotated[int, Field(default=5000, ge=0, description="Adam steps (5e4 at full scale)")]
    beta1: Annotated[float, Field(default=0.9, ge=0, lt=1)]
    beta2: Annotated[float, Field(default=0.999, ge=0, lt=1)]
    eps: Annotated[float, Field(default=1e-8, gt=0)]
    l1_weight: Annotated[float | None, Field(
        default=None, ge=0,
        description="Weight of the ||theta||_1 penalty. Unset means 1e-6 for the "
                    "fully-learned architecture and 0 elsewhere.",
    )]
    seed: Annotated[int, Field(default=0)]
    log_every: Annotated[int, Field(default=10, ge=1, description="Record train loss every N steps")]
    val_every: Annotated[int, Field(default=250, ge=1, description="Evaluate validation every N steps")]

    def l1_for(self, arch: Architecture | str) -> float:
        if self.l1_weight is not None:
            return self.l1_weight
        return 1e-6 if Architecture(arch) == Architecture.FullyLearned else 0.0
