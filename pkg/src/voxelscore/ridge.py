"""Ridge regression with per-voxel penalty selection.

Each training design is factorized once (thin SVD) and the factorization is
reused across the entire penalty grid: with X = U S V', the ridge weights
at penalty a are V diag(s/(s^2+a)) U'Y, so sweeping penalties costs one
rescaling per value instead of one solve. Penalty selection runs an inner
cross-validation over contiguous temporal blocks (no shuffling; BOLD noise
is autocorrelated, and shuffled folds leak) and picks, per voxel, the
penalty with the lowest mean validation MSE, preferring the smallest
penalty on ties.

Selection arithmetic runs in float32: it only feeds a discrete argmin over
penalties nine decades apart, and single-precision GEMMs are about twice as
fast. The refit at the chosen penalty, and everything downstream, is
float64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass
class PenaltyGrid:
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64).ravel()
        if arr.size < 1:
            raise InputError("penalty grid is empty")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise InputError("penalties must be positive and finite")
        if arr.size > 1 and not np.all(np.diff(arr) > 0):
            raise InputError("penalties must be strictly increasing")
        self.values = arr

    def __len__(self):
        return self.values.size


def default_grid() -> PenaltyGrid:
    """Ten log-spaced penalties from 1e-1 to 1e8."""
    return PenaltyGrid(np.logspace(-1.0, 8.0, 10))


@dataclass
class RidgeFit:
    """Weights live in standardized-design space; predict() applies the
    stored column scaler, so callers never standardize themselves."""

    weights: np.ndarray  # (p, v)
    chosen_penalty: np.ndarray  # (v,)
    column_means: np.ndarray  # (p,)
    column_stds: np.ndarray  # (p,), 1.0 for excluded columns
    intercepts: np.ndarray  # (v,)
    excluded: np.ndarray  # (p,) bool, constant columns pinned to zero weight


def contiguous_folds(n: int, k: int) -> list[np.ndarray]:
    """Split frame indices 0..n-1 into k contiguous, nonempty blocks."""
    if k < 2:
        raise InputError(f"fold count must be >= 2, got {k}")
    if k > n:
        raise InputError(f"cannot split {n} frames into {k} folds")
    return np.array_split(np.arange(n), k)


def _scaler(X):
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    excluded = sd == 0.0
    return mu, np.where(excluded, 1.0, sd), excluded


def _select_penalties(Xs, Yc, lambdas, inner_folds, standardize):
    """Per-voxel index into lambdas minimizing mean inner-fold MSE."""
    n = Xs.shape[0]
    n_pen = lambdas.size
    lam32 = lambdas.astype(np.float32)
    err = np.zeros((n_pen, Yc.shape[1]), dtype=np.float64)
    for val in contiguous_folds(n, inner_folds):
        mask = np.ones(n, dtype=bool)
        mask[val] = False
        Xtr, Xva = Xs[mask], Xs[val]
        Ytr, Yva = Yc[mask], Yc[val]
        if standardize:
            mu_b, sd_b, _ = _scaler(Xtr)
            Xtr = (Xtr - mu_b) / sd_b
            Xva = (Xva - mu_b) / sd_b
            yb = Ytr.mean(axis=0)
            Ytr = Ytr - yb
            Yva = Yva - yb
        U, s, Vt = np.linalg.svd(Xtr, full_matrices=False)
        B = U.astype(np.float32).T @ Ytr.astype(np.float32)  # (r, v)
        A = Xva.astype(np.float32) @ Vt.T.astype(np.float32)  # (m, r)
        shrink = s.astype(np.float32) / (s.astype(np.float32) ** 2 + lam32[:, None])
        # one GEMM for the whole grid: stack the per-penalty projections
        stacked = (A[None, :, :] * shrink[:, None, :]).reshape(
            n_pen * val.size, -1
        )
        resid = (stacked @ B).reshape(n_pen, val.size, -1)
        resid -= Yva.astype(np.float32)[None]
        np.square(resid, out=resid)
        err += resid.mean(axis=1, dtype=np.float64)
    err /= inner_folds
    # argmin takes the first minimum, i.e. the smallest penalty on ties
    return np.argmin(err, axis=0)


def fit_ridge(X, Y, grid=None, inner_folds: int = 5, seed: int = 0,
              standardize: bool = True) -> RidgeFit:
    """Fit per-voxel ridge models with cross-validated penalties.

    Parameters
    ----------
    X : (n, p) array
        Training design (FIR-expanded features restricted to train frames).
    Y : (n, v) array
        Training responses, one column per voxel. A 1-D array is treated
        as a single voxel.
    grid : PenaltyGrid or sequence, optional
        Candidate penalties; defaults to the 10-point log grid. A
        single-value grid skips inner cross-validation.
    inner_folds : int
        Contiguous inner folds for penalty selection.
    seed : int
        Unused; folds are deterministic temporal blocks. Kept so callers
        can thread a seed through uniformly.
    standardize : bool
        Z-score design columns and center responses using training
        statistics (the default). Constant columns are excluded: their
        weights are zero. With False, X and Y are used raw and intercepts
        are zero; mainly for oracle comparisons.

    Returns
    -------
    RidgeFit
    """
    del seed
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.ndim != 2 or Y.ndim != 2:
        raise InputError("fit_ridge expects 2-D X and Y")
    if X.shape[0] != Y.shape[0]:
        raise InputError(
            f"X has {X.shape[0]} rows but Y has {Y.shape[0]}"
        )
    n, p = X.shape
    v = Y.shape[1]
    if n < 2:
        raise InputError(f"need at least 2 training frames, got {n}")
    if not np.all(np.isfinite(X)) or not np.all(np.isfinite(Y)):
        raise InputError("training data contains non-finite values")
    if grid is None:
        grid = default_grid()
    elif not isinstance(grid, PenaltyGrid):
        grid = PenaltyGrid(grid)
    lambdas = grid.values

    if standardize:
        mu, sd, excluded = _scaler(X)
        if excluded.all():
            raise InputError("design has no varying columns")
        Xs = (X - mu) / sd
        ybar = Y.mean(axis=0)
        Yc = Y - ybar
    else:
        mu = np.zeros(p)
        sd = np.ones(p)
        excluded = np.zeros(p, dtype=bool)
        ybar = np.zeros(v)
        Xs, Yc = X, Y

    if len(grid) > 1:
        lam_idx = _select_penalties(Xs, Yc, lambdas, inner_folds, standardize)
    else:
        lam_idx = np.zeros(v, dtype=np.int64)

    U, s, Vt = np.linalg.svd(Xs, full_matrices=False)
    Z = U.T @ Yc
    W = np.empty((p, v), dtype=np.float64)
    for li in np.unique(lam_idx):
        shrink = s / (s * s + lambdas[li])
        cols = lam_idx == li
        W[:, cols] = (Vt.T * shrink) @ Z[:, cols]
    if excluded.any():
        W[excluded, :] = 0.0
    return RidgeFit(W, lambdas[lam_idx], mu, sd, ybar, excluded)


def predict(fit: RidgeFit, X) -> np.ndarray:
    """Apply a fit to new design rows; returns (m, v) predictions."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != fit.weights.shape[0]:
        raise InputError(
            f"prediction design has shape {X.shape}, expected "
            f"(*, {fit.weights.shape[0]})"
        )
    Xs = (X - fit.column_means) / fit.column_stds
    return Xs @ fit.weights + fit.intercepts


def sweep_weights(X, Y, grid) -> np.ndarray:
    """Weights for every grid penalty from a single SVD, no standardization.

    Returns (len(grid), p, v); reference path for factorization-reuse and
    oracle checks.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    if not isinstance(grid, PenaltyGrid):
        grid = PenaltyGrid(grid)
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    Z = U.T @ Y
    out = np.empty((len(grid), X.shape[1], Y.shape[1]), dtype=np.float64)
    for i, lam in enumerate(grid.values):
        out[i] = (Vt.T * (s / (s * s + lam))) @ Z
    return out


def closed_form_oracle(X, y, penalty: float) -> np.ndarray:
    """Dense normal-equations ridge solve for small designs.

    Solves (X'X + penalty*I) w = X'y directly. Reference implementation
    for tests; refuses designs wider than 64 columns.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise InputError("oracle expects a 2-D design")
    if X.shape[1] > 64:
        raise InputError("oracle is for small designs (<= 64 columns)")
    if X.shape[0] != y.shape[0]:
        raise InputError("oracle design/response row mismatch")
    if penalty < 0 or not np.isfinite(penalty):
        raise InputError(f"penalty must be >= 0, got {penalty!r}")
    A = X.T @ X + penalty * np.eye(X.shape[1])
    try:
        return np.linalg.solve(A, X.T @ y)
    except np.linalg.LinAlgError:
        raise InputError(
            "normal equations are singular; use a positive penalty"
        ) from None
