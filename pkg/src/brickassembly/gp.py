"""Gaussian-process regression over 4-dimensional placement encodings.

A placement is encoded as (center1, center2, layer, direction) and modeled
with an isotropic Matern 5/2 kernel; the direction enters as a real
coordinate, putting lengthwise and breadthwise placements at distance 1.
Hyperparameters are chosen by maximizing the log marginal likelihood with
a bounded quasi-Newton search in log space, restarted from a fixed set of
start points so fits are fully deterministic. Targets are standardized
before fitting and posteriors are mapped back to the raw scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize
from scipy.spatial.distance import cdist

from .lattice import Primitive

NOISE_FLOOR = 1e-6

LENGTHSCALE_BOUNDS = (1e-2, 1e2)
SIGNAL_BOUNDS = (1e-3, 1e3)
NOISE_BOUNDS = (NOISE_FLOOR, 1e1)

_JITTERS = (0.0, 1e-6, 1e-4, 1e-2)


@dataclass(frozen=True)
class GpHyperparams:
    """Matern 5/2 hyperparameters: lengthscale, signal and noise variances."""

    lengthscale: float = 1.0
    signal_var: float = 1.0
    noise_var: float = NOISE_FLOOR

    def __post_init__(self):
        if self.lengthscale <= 0 or self.signal_var <= 0:
            raise ValueError("lengthscale and signal variance must be positive")
        if self.noise_var < NOISE_FLOOR:
            raise ValueError(f"noise variance must be >= {NOISE_FLOOR}")


def encode(p: Primitive) -> np.ndarray:
    """4-vector (center1, center2, z, d) for one placement."""
    c1, c2 = p.center
    return np.array([c1, c2, float(p.z), float(p.d)])


def encode_batch(primitives) -> np.ndarray:
    return np.array([encode(p) for p in primitives], dtype=float).reshape(-1, 4)


def matern52(u: np.ndarray, v: np.ndarray, h: GpHyperparams) -> float:
    """Matern 5/2 covariance between two encoded placements."""
    r = float(np.linalg.norm(np.asarray(u, dtype=float) - np.asarray(v, dtype=float)))
    s = np.sqrt(5.0) * r / h.lengthscale
    return h.signal_var * (1.0 + s + s * s / 3.0) * np.exp(-s)


def _kernel_matrix(X: np.ndarray, Y: np.ndarray, h: GpHyperparams) -> np.ndarray:
    r = cdist(X, Y)
    s = np.sqrt(5.0) * r / h.lengthscale
    return h.signal_var * (1.0 + s + s * s / 3.0) * np.exp(-s)


def log_marginal_likelihood(
    X: np.ndarray, y: np.ndarray, h: GpHyperparams, with_gradient: bool = False
):
    """LML of standardized targets; optionally with its gradient in
    (log lengthscale, log signal_var, log noise_var)."""
    r = cdist(X, X)
    s = np.sqrt(5.0) * r / h.lengthscale
    decay = np.exp(-s)
    K = h.signal_var * (1.0 + s + s * s / 3.0) * decay
    Kn = K + h.noise_var * np.eye(len(y))
    try:
        L = cholesky(Kn, lower=True)
    except np.linalg.LinAlgError:
        if with_gradient:
            return -np.inf, np.zeros(3)
        return -np.inf
    alpha = cho_solve((L, True), y)
    lml = (
        -0.5 * float(y @ alpha)
        - float(np.sum(np.log(np.diag(L))))
        - 0.5 * len(y) * np.log(2.0 * np.pi)
    )
    if not with_gradient:
        return lml
    Kinv = cho_solve((L, True), np.eye(len(y)))
    W = np.outer(alpha, alpha) - Kinv
    dK_dlog_ell = h.signal_var * decay * (s * s * (1.0 + s) / 3.0)
    grad = np.array([
        0.5 * float(np.sum(W * dK_dlog_ell)),
        0.5 * float(np.sum(W * K)),
        0.5 * h.noise_var * float(np.trace(W)),
    ])
    return lml, grad


class GpModel:
    """Fitted surrogate: training encodings, hyperparameters, and the cached
    Cholesky factorization used by posterior queries. Immutable after build."""

    def __init__(self, X: np.ndarray, y: np.ndarray, hyperparams: GpHyperparams):
        X = np.asarray(X, dtype=float).reshape(-1, 4)
        y = np.asarray(y, dtype=float).ravel()
        if len(y) < 1:
            raise ValueError("need at least one observation")
        if len(y) != X.shape[0]:
            raise ValueError("mismatched inputs and targets")
        if not np.all(np.isfinite(y)):
            raise ValueError("targets must be finite")
        self.X = X
        self.y = y
        self.hyperparams = hyperparams
        self.y_mean = float(np.mean(y))
        std = float(np.std(y))
        self.y_std = std if std > 0 else 1.0
        self._yn = (y - self.y_mean) / self.y_std

        K = _kernel_matrix(X, X, hyperparams)
        Kn = K + hyperparams.noise_var * np.eye(len(y))
        self.L = None
        for jitter in _JITTERS:
            try:
                self.L = cholesky(Kn + jitter * np.eye(len(y)), lower=True)
                break
            except np.linalg.LinAlgError:
                continue
        if self.L is None:
            raise np.linalg.LinAlgError(
                "covariance matrix not positive definite after jitter escalation"
            )
        self.alpha = cho_solve((self.L, True), self._yn)

    def posterior_batch(self, X_query: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and variance (raw scale) at each query row."""
        X_query = np.asarray(X_query, dtype=float).reshape(-1, 4)
        k_star = _kernel_matrix(X_query, self.X, self.hyperparams)
        mu = k_star @ self.alpha
        v = solve_triangular(self.L, k_star.T, lower=True)
        var = self.hyperparams.signal_var - np.sum(v * v, axis=0)
        var = np.maximum(var, 0.0)
        return mu * self.y_std + self.y_mean, var * self.y_std**2


def posterior(model: GpModel, p: Primitive) -> tuple[float, float]:
    """Posterior (mean, variance) at one placement."""
    mu, var = model.posterior_batch(encode(p).reshape(1, 4))
    return float(mu[0]), float(var[0])


def _start_points(X: np.ndarray) -> list[np.ndarray]:
    """Five fixed fit starts; one is scaled to the median pairwise distance."""
    d = cdist(X, X)
    off = d[np.triu_indices_from(d, k=1)]
    med = float(np.median(off[off > 0])) if np.any(off > 0) else 1.0
    med = float(np.clip(med, *LENGTHSCALE_BOUNDS))
    starts = [
        (1.0, 1.0, 1e-2),
        (0.3, 1.0, 1e-2),
        (3.0, 1.0, 1e-2),
        (1.0, 0.1, 1e-1),
        (med, 1.0, 1e-4),
    ]
    return [np.log(np.array(s)) for s in starts]


def fit(primitives_or_X, y, maxiter: int = 200) -> GpModel:
    """Fit hyperparameters by bounded multi-start likelihood maximization.

    Accepts either a sequence of placements or an already-encoded (r, 4)
    matrix. With fewer than two observations the defaults are kept: there
    is nothing to learn from a single standardized point.
    """
    if len(y) and isinstance(primitives_or_X[0], Primitive):
        X = encode_batch(primitives_or_X)
    else:
        X = np.asarray(primitives_or_X, dtype=float).reshape(-1, 4)
    y = np.asarray(y, dtype=float).ravel()

    if len(y) < 2 or np.all(y == y[0]):
        # A lone or constant target carries no structure to learn; the
        # standardized model already reverts to the constant everywhere.
        return GpModel(X, y, GpHyperparams())

    y_mean = float(np.mean(y))
    y_sd = float(np.std(y))
    yn = (y - y_mean) / (y_sd if y_sd > 0 else 1.0)

    bounds = [
        tuple(np.log(LENGTHSCALE_BOUNDS)),
        tuple(np.log(SIGNAL_BOUNDS)),
        tuple(np.log(NOISE_BOUNDS)),
    ]

    def objective(theta):
        h = _clamped_hyperparams(np.exp(theta))
        lml, grad = log_marginal_likelihood(X, yn, h, with_gradient=True)
        return -lml, -grad

    best_theta, best_val = None, np.inf
    for theta0 in _start_points(X):
        res = minimize(
            objective, theta0, jac=True, method="L-BFGS-B",
            bounds=bounds, options={"maxiter": maxiter},
        )
        if res.fun < best_val:
            best_val, best_theta = res.fun, res.x
    if best_theta is None or not np.isfinite(best_val):
        best_theta = np.log([1.0, 1.0, 1e-2])

    return GpModel(X, y, _clamped_hyperparams(np.exp(best_theta)))


def _clamped_hyperparams(values: np.ndarray) -> GpHyperparams:
    # L-BFGS-B iterates can step epsilon past the log-space box.
    return GpHyperparams(
        lengthscale=float(np.clip(values[0], *LENGTHSCALE_BOUNDS)),
        signal_var=float(np.clip(values[1], *SIGNAL_BOUNDS)),
        noise_var=float(np.clip(values[2], *NOISE_BOUNDS)),
    )
