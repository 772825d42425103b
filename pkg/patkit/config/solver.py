from pydantic import BaseModel, ConfigDict, Field
from typing_extensions import Annotated


class VariationalConfig(BaseModel):
    """Parameters shared by the iterative classical solvers."""

    model_config = ConfigDict(frozen=True)

    alpha: Annotated[float, Field(default=0.0, ge=0, description="Regularisation weight")]
    eta: Annotated[float | None, Field(
        default=None, gt=0,
        description="Step size. When unset, 1 / ||A||^2 from a power iteration is used.",
    )]
    n_iter: Annotated[int, Field(default=100, ge=1, description="Outer iterations")]
    prox_inner: Annotated[int, Field(default=20, ge=1, description="Inner iterations of the TV prox")]
    tol: Annotated[float | None, Field(
        default=None, gt=0,
        description="Stop when the relative objective decrease stays below tol for "
                    "`patience` consecutive iterations",
    )]
    patience: Annotated[int, Field(default=5, ge=1)]
    nonnegative: Annotated[bool, Field(
        default=True, description="Project onto f >= 0 after each proximal step",
    )]
    power_iterations: Annotated[int, Field(default=50, ge=1)]
    seed: Annotated[int, Field(default=0, description="Seed of the power-iteration start vector")]
    tr_iterations: Annotated[int, Field(default=5, ge=1, description="Iterations of iterative time reversal")]
    cg_tol: Annotated[float, Field(default=1e-10, gt=0)]
    cg_max_iter: Annotated[int, Field(default=2000, ge=1)]
