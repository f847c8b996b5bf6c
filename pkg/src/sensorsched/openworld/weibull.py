"""Two-parameter Weibull fitting for extreme-value tails.

Maximum likelihood via Newton iteration on the shape, vectorised across rows so every tail of a
class is fitted at once. Rows that do not converge fall back to the method of moments.
"""

import logging

import numpy as np
from scipy import optimize, special

logger = logging.getLogger(__name__)

# Shape given to constant tails; their CDF is effectively a step at the constant.
CONSTANT_SHAPE = 1e3

_MIN_SAMPLE = 1e-12


class WeibullFitError(ValueError):
    pass


def weibull_psi(distance: np.ndarray | float, shape: np.ndarray | float, scale: np.ndarray | float):
    """Inclusion probability exp(-(d / scale) ** shape)."""
    return np.exp(-((np.asarray(distance) / scale) ** shape))


def _moment_fit(row: np.ndarray) -> tuple[float, float]:
    mean = row.mean()
    cv = row.std() / mean

    def cv_gap(k: float) -> float:
        g1 = special.gamma(1.0 + 1.0 / k)
        g2 = special.gamma(1.0 + 2.0 / k)
        return np.sqrt(g2 / g1**2 - 1.0) - cv

    if cv_gap(CONSTANT_SHAPE) >= 0:
        # Tighter than any shape up to the cap can express.
        return CONSTANT_SHAPE, mean / special.gamma(1.0 + 1.0 / CONSTANT_SHAPE)
    try:
        shape = optimize.brentq(cv_gap, 0.1, CONSTANT_SHAPE)
    except ValueError as e:
        raise WeibullFitError(f"moment fit failed for coefficient of variation {cv:.4g}") from e
    return shape, mean / special.gamma(1.0 + 1.0 / shape)


def fit_weibull_rows(
    samples: np.ndarray, tol: float = 1e-6, max_iter: int = 200
) -> tuple[np.ndarray, np.ndarray]:
    """Fit one Weibull per row of ``samples``; returns (shapes, scales)."""
    x = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    if x.shape[1] == 0:
        raise WeibullFitError("cannot fit a Weibull to an empty tail")
    if not np.all(np.isfinite(x)) or np.any(x < 0):
        raise WeibullFitError("tail samples must be finite and non-negative")
    x = np.maximum(x, _MIN_SAMPLE)

    n_rows = x.shape[0]
    shapes = np.ones(n_rows)
    scales = np.empty(n_rows)

    top = x.max(axis=1)
    constant = np.isclose(x.min(axis=1), top, rtol=1e-12, atol=0.0)
    shapes[constant] = CONSTANT_SHAPE
    scales[constant] = top[constant]

    # The shape estimate is scale free, so iterate on x / max to keep x**k bounded.
    z = x / top[:, None]
    ln_z = np.log(z)
    mean_ln = ln_z.mean(axis=1)

    active = ~constant
    converged = constant.copy()
    k = shapes.copy()
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        zk = z[idx] ** k[idx, None]
        s0 = zk.sum(axis=1)
        s1 = (zk * ln_z[idx]).sum(axis=1)
        s2 = (zk * ln_z[idx] ** 2).sum(axis=1)
        ratio = s1 / s0
        f = ratio - mean_ln[idx] - 1.0 / k[idx]
        f_prime = s2 / s0 - ratio**2 + 1.0 / k[idx] ** 2
        step = f / f_prime
        new_k = k[idx] - step
        # Newton can overshoot past zero from the left; halve instead.
        new_k = np.where(new_k > 0, new_k, k[idx] / 2.0)

        bad = ~np.isfinite(new_k)
        done = np.abs(new_k - k[idx]) < tol * np.maximum(1.0, k[idx])
        k[idx] = np.where(bad, k[idx], new_k)
        converged[idx[done & ~bad]] = True
        active[idx[done | bad]] = False

    fitted = converged & ~constant
    shapes[fitted] = k[fitted]
    scales[fitted] = top[fitted] * np.mean(z[fitted] ** k[fitted, None], axis=1) ** (
        1.0 / k[fitted]
    )

    for row in np.flatnonzero(~converged):
        logger.debug(f"Newton fit did not converge for tail {row}, using moments")
        shapes[row], scales[row] = _moment_fit(x[row])

    return shapes, scales


def fit_weibull(samples: np.ndarray, tol: float = 1e-6, max_iter: int = 200) -> tuple[float, float]:
    """Fit (shape, scale) to a one-dimensional sample."""
    shapes, scales = fit_weibull_rows(np.asarray(samples, dtype=np.float64)[None, :], tol, max_iter)
    return float(shapes[0]), float(scales[0])
