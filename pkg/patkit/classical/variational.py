"""Model-based reconstructions built on the explicit forward matrix.

Least squares gradient descent, Tikhonov regularisation through conjugate
gradients on the normal equations, and proximal gradient descent with an
isotropic total variation penalty.
"""

import logging

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from patkit.config.solver import VariationalConfig
from patkit.core.rng import RngStream
from patkit.core.types import Image, SensorData
from patkit.classical.results import EarlyStopper, SolverResult
from patkit.exceptions import ConfigError, ConvergenceError
from patkit.forward.matrix import ForwardMatrix, data_vector, estimate_operator_norm

logger = logging.getLogger(__name__)

CHAMBOLLE_STEP = 0.249
LOG_EVERY = 25


# ---------------------------------------------------------------------------
# Total variation
# ---------------------------------------------------------------------------

def gradient(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Forward differences with a zero last difference (Neumann boundary)."""
    du_row = np.zeros_like(u)
    du_col = np.zeros_like(u)
    du_row[:-1, :] = u[1:, :] - u[:-1, :]
    du_col[:, :-1] = u[:, 1:] - u[:, :-1]
    return du_row, du_col


def divergence(p_row: np.ndarray, p_col: np.ndarray) -> np.ndarray:
    """Negative adjoint of :func:`gradient`."""
    div = np.zeros_like(p_row)
    div[0, :] += p_row[0, :]
    div[1:-1, :] += p_row[1:-1, :] - p_row[:-2, :]
    div[-1, :] -= p_row[-2, :]
    div[:, 0] += p_col[:, 0]
    div[:, 1:-1] += p_col[:, 1:-1] - p_col[:, :-2]
    div[:, -1] -= p_col[:, -2]
    return div


def tv_norm(u: np.ndarray) -> float:
    du_row, du_col = gradient(np.asarray(u, dtype=np.float64))
    return float(np.sum(np.sqrt(du_row ** 2 + du_col ** 2)))


def chambolle_prox(h: np.ndarray, lam: float, inner: int,
                   dual: tuple[np.ndarray, np.ndarray] | None = None
                   ) -> tuple[np.ndarray, tuple[np.ndarray, np.ndarray]]:
    """Dual projection iteration for the TV proximal map; returns the image and the dual field."""
    if dual is None:
        p_row, p_col = np.zeros_like(h), np.zeros_like(h)
    else:
        p_row, p_col = (p.copy() for p in dual)
    for _ in range(inner):
        u_row, u_col = gradient(divergence(p_row, p_col) - h / lam)
        norm = np.sqrt(u_row ** 2 + u_col ** 2)
        p_row = (p_row + CHAMBOLLE_STEP * u_row) / (1 + CHAMBOLLE_STEP * norm)
        p_col = (p_col + CHAMBOLLE_STEP * u_col) / (1 + CHAMBOLLE_STEP * norm)
    return h - lam * divergence(p_row, p_col), (p_row, p_col)


def tv_prox(h: Image | np.ndarray, lam: float, inner: int = 20) -> Image:
    """Approximate minimiser of ``lam * TV(y) + 0.5 * ||h - y||^2``."""
    if lam < 0:
        raise ConfigError(f"TV weight must be non-negative, got {lam}")
    array = np.asarray(h, dtype=np.float64)
    if lam == 0:
        return h if isinstance(h, Image) else Image(array)
    result, _ = chambolle_prox(array, lam, inner)
    return Image(result)


# ---------------------------------------------------------------------------
# Gradient methods
# ---------------------------------------------------------------------------

def data_objective(A: ForwardMatrix, f: np.ndarray, g: np.ndarray) -> float:
    r = A.entries @ f - g
    return 0.5 * float(r @ r)


def step_size(A: ForwardMatrix, cfg: VariationalConfig) -> float:
    """Configured step size, or 1 / ||A||^2; raises ConfigError if it breaks the descent bound."""
    norm = estimate_operator_norm(A, cfg.power_iterations, RngStream(cfg.seed))
    if norm == 0:
        return cfg.eta if cfg.eta is not None else 1.0
    eta = cfg.eta if cfg.eta is not None else 1.0 / norm ** 2
    if eta * norm ** 2 >= 2:
        raise ConfigError(
            f"Step size {eta:g} violates eta * ||A||^2 < 2 (||A|| ~ {norm:.4g})"
        )
    return eta


def gradient_descent(A: ForwardMatrix, g: SensorData | np.ndarray, cfg: VariationalConfig) -> SolverResult:
    data = data_vector(A, g)
    eta = step_size(A, cfg)
    f = np.zeros(A.shape[1])
    history = [data_objective(A, f, data)]
    stopper = EarlyStopper(cfg.tol, cfg.patience)
    n = 0
    for n in range(1, cfg.n_iter + 1):
        f = f - eta * (A.entries.T @ (A.entries @ f - data))
        history.append(data_objective(A, f, data))
        if n % LOG_EVERY == 0:
            logger.debug("Gradient descent %d: objective %.6e", n, history[-1])
        if stopper.update(history[-2], history[-1]):
            logger.info("Gradient descent stopped early at iteration %d", n)
            return SolverResult(Image(f.reshape(A.m, A.m)), history, n, converged_early=True)
    return SolverResult(Image(f.reshape(A.m, A.m)), history, n)


def proximal_gradient_tv(A: ForwardMatrix, g: SensorData | np.ndarray, cfg: VariationalConfig) -> SolverResult:
    """Gradient step on the data term followed by the TV proximal map.

    The dual field of the proximal iteration is carried over between outer
    iterations.
    """
    data = data_vector(A, g)
    eta = step_size(A, cfg)
    m = A.m
    f = np.zeros(A.shape[1])

    def objective(x: np.ndarray) -> float:
        return data_objective(A, x, data) + cfg.alpha * tv_norm(x.reshape(m, m))

    history = [objective(f)]
    stopper = EarlyStopper(cfg.tol, cfg.patience)
    dual = None
    n = 0
    for n in range(1, cfg.n_iter + 1):
        z = f - eta * (A.entries.T @ (A.entries @ f - data))
        if cfg.alpha > 0:
            image, dual = chambolle_prox(z.reshape(m, m), eta * cfg.alpha, cfg.prox_inner, dual)
            z = image.reshape(-1)
        if cfg.nonnegative:
            z = np.maximum(z, 0.0)
        f = z
        history.append(objective(f))
        if n % LOG_EVERY == 0:
            logger.debug("Proximal gradient %d: objective %.6e", n, history[-1])
        if stopper.update(history[-2], history[-1]):
            logger.info("Proximal gradient stopped early at iteration %d", n)
            return SolverResult(Image(f.reshape(m, m)), history, n, converged_early=True)
    return SolverResult(Image(f.reshape(m, m)), history, n)


def tikhonov_solve(A: ForwardMatrix, g: SensorData | np.ndarray, alpha: float,
                   cfg: VariationalConfig | None = None) -> Image:
    """Solve (A^T A + alpha I) f = A^T g by conjugate gradients."""
    if alpha <= 0:
        raise ConfigError(f"Tikhonov weight must be positive, got {alpha}")
    cfg = cfg or VariationalConfig()
    rhs = data_vector(A, g) @ A.entries
    rhs_norm = float(np.linalg.norm(rhs))
    if rhs_norm == 0:
        return Image(np.zeros((A.m, A.m)))

    size = A.shape[1]
    normal = LinearOperator(
        (size, size),
        matvec=lambda x: A.entries.T @ (A.entries @ x) + alpha * x,
        dtype=np.float64,
    )
    iterations = 0

    def count(_):
        nonlocal iterations
        iterations += 1

    f, info = cg(normal, rhs, rtol=cfg.cg_tol, atol=0.0, maxiter=cfg.cg_max_iter, callback=count)
    residual = float(np.linalg.norm(normal.matvec(f) - rhs)) / rhs_norm
    if info != 0:
        raise ConvergenceError("conjugate gradients", residual, iterations)
    logger.debug("Tikhonov CG converged in %d iterations (residual %.2e)", iterations, residual)
    return Image(f.reshape(A.m, A.m))
