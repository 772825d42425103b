from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Annotated

from patkit.config.train import NetworkConfig, TrainConfig


class PhantomKind(str, Enum):
    Piecewise = "piecewise"
    Smooth = "smooth"


class PhantomFamily(BaseModel):
    """Generator parameters of a synthetic vessel-like phantom prior."""

    model_config = ConfigDict(frozen=True, use_enum_values=True)

    kind: Annotated[PhantomKind, Field(description="Piecewise-constant or smooth vessels")]
    branches: Annotated[tuple[int, int], Field(default=(2, 6), description="Inclusive range of branch count")]
    width: Annotated[tuple[float, float], Field(default=(0.8, 2.5), description="Vessel half-width range in pixels")]
    amplitude: Annotated[tuple[float, float], Field(default=(0.3, 1.0), description="Per-branch amplitude range")]
    steps: Annotated[tuple[int, int], Field(default=(12, 48), description="Random-walk length range per branch")]
    persistence: Annotated[float, Field(default=0.75, ge=0, le=1, description="Direction memory of the walk")]
    sigma: Annotated[float, Field(default=1.5, gt=0, description="Gaussian smoothing for the smooth kind")]

    @model_validator(mode='after')
    def _check_ranges(self):
        for name in ("branches", "width", "amplitude", "steps"):
            low, high = getattr(self, name)
            if low > high:
                raise ValueError(f"{name} range is empty: ({low}, {high})")
        if self.branches[1] > 8:
            raise ValueError("At most 8 branches are supported (one amplitude level each)")
        if self.amplitude[0] < 0 or self.amplitude[1] > 1:
            raise ValueError("Amplitudes must lie in [0, 1]")
        return self


class CaseName(str, Enum):
    Consistent = "i"
    DifferentTest = "ii"
    Combined = "iii"


class CaseSpec(BaseModel):
    """Train / test composition of one of the three comparison scenarios."""

    model_config = ConfigDict(frozen=True, use_enum_values=True)

    case: Annotated[CaseName, Field(description="i: consistent, ii: different test prior, iii: combined")]
    train_families: Annotated[tuple[PhantomKind, ...], Field(description="Families mixed in the training pool")]
    test_families: Annotated[tuple[PhantomKind, ...], Field(description="Families mixed in the test pool")]
    n_train: Annotated[int, Field(default=200, ge=1, description="Size of the training pool (train/val/holdout)")]
    n_test: Annotated[int, Field(default=50, ge=1)]
    noise_level: Annotated[float, Field(default=0.01, ge=0, description="Noise std as a fraction of max |g|")]
    seed: Annotated[int, Field(default=7)]

    @model_validator(mode='after')
    def _check_case(self):
        train, test = set(self.train_families), set(self.test_families)
        if self.case == CaseName.Consistent.value and not (train == test and len(train) == 1):
            raise ValueError("case i trains and tests on the same single family")
        if self.case == CaseName.DifferentTest.value and train & test:
            raise ValueError("case ii tests on a family absent from training")
        if self.case == CaseName.Combined.value and not (train == test and len(train) > 1):
            raise ValueError("case iii trains and tests on the same mixed families")
        return self

    @classmethod
    def standard(cls, case: str, *, full_scale: bool = False, seed: int = 7,
                 n_train: int | None = None, n_test: int | None = None,
                 noise_level: float = 0.01) -> 'CaseSpec':
        """Return the case layout used in the three-scenario comparison."""
        smooth, piecewise = PhantomKind.Smooth, PhantomKind.Piecewise
        case = CaseName(case)
        if case == CaseName.Consistent:
            train, test, sizes = (smooth,), (smooth,), (1000, 151)
        elif case == CaseName.DifferentTest:
            train, test, sizes = (smooth,), (piecewise,), (1000, 151)
        else:
            train, test, sizes = (smooth, piecewise), (smooth, piecewise), (3760, 308)
        default_train, default_test = sizes if full_scale else (200, 50)
        return cls(
            case=case,
            train_families=train,
            test_families=test,
            n_train=n_train or default_train,
            n_test=n_test or default_test,
            noise_level=noise_level,
            seed=seed,
        )


class BenchConfig(BaseModel):
    """Settings of the three-case experiment harness."""

    model_config = ConfigDict(frozen=True)

    piecewise: Annotated[PhantomFamily, Field(
        default_factory=lambda: PhantomFamily(kind=PhantomKind.Piecewise),
    )]
    smooth: Annotated[PhantomFamily, Field(
        default_factory=lambda: PhantomFamily(kind=PhantomKind.Smooth),
    )]
    methods: Annotated[tuple[str, ...], Field(
        default=("fl", "unet", "lgd"),
        description="Methods compared per case: fl, unet, pre, lgd, lpd, pgd-tv",
    )]
    train: Annotated[TrainConfig, Field(default_factory=lambda: TrainConfig(n_steps=2000))]
    network: Annotated[NetworkConfig, Field(default_factory=NetworkConfig)]
    full_scale: Annotated[bool, Field(default=False, description="Use the large sample counts and 5e4 steps")]
    panel_index: Annotated[int, Field(default=0, ge=0, description="Test sample shown in the PGM panel")]
    image_dirs: Annotated[dict[str, str], Field(
        default_factory=dict,
        description="Optional family -> directory of PGM images replacing the synthetic generator",
    )]

    def family(self, kind: PhantomKind | str) -> PhantomFamily:
        return self.smooth if PhantomKind(kind) == PhantomKind.Smooth else self.piecewise

    def effective_train(self) -> TrainConfig:
        if self.full_scale:
            return self.train.model_copy(update={"n_steps": 50_000})
        return self.train
