"""Synthetic data generation and statistical diagnostics.

Covers linear-model instances, i.i.d. dummy ensembles with non-Gaussian
coordinate laws, Kolmogorov-Smirnov and 1-Wasserstein distances, residual
correlation order statistics, FDP/TPP scoring, the dummy norm-inflation
bound, and a delocalization proxy for basis directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._seeds import make_rng
from .ambient import AmbientSpace, center_project, standardize_column
from .errors import EmptySample, RankOutOfRange


@dataclass(frozen=True)
class ModelInstance:
    X: np.ndarray
    y: np.ndarray
    beta: np.ndarray
    active: frozenset
    sigma: float


# raw coordinate laws, each standardized analytically to mean 0, variance 1
# before any column-level normalization
_LAWS = ("gaussian", "rademacher", "exponential", "student_t", "lognormal", "pareto")


@dataclass(frozen=True)
class CoordinateLaw:
    """I.i.d. coordinate law for raw dummy vectors, unit variance by construction."""

    name: str

    def __post_init__(self):
        if self.name not in _LAWS:
            raise ValueError(f"unknown coordinate law {self.name!r}")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        name = self.name
        if name == "gaussian":
            return rng.standard_normal(size)
        if name == "rademacher":
            return np.where(rng.random(size) < 0.5, -1.0, 1.0)
        if name == "exponential":
            return rng.exponential(1.0, size) - 1.0
        if name == "student_t":
            # nu = 3: variance nu/(nu-2) = 3, rescale to 1
            return rng.standard_t(3, size) / math.sqrt(3.0)
        if name == "lognormal":
            # sigma_ln = 1: mean e^{1/2}, variance (e - 1) e
            mu = math.exp(0.5)
            sd = math.sqrt((math.e - 1.0) * math.e)
            return (rng.lognormal(0.0, 1.0, size) - mu) / sd
        # pareto a = 3: support (1, inf), mean a/(a-1) = 1.5,
        # variance a/((a-1)^2 (a-2)) = 3/4
        raw = 1.0 + rng.pareto(3.0, size)
        return (raw - 1.5) / math.sqrt(0.75)


def gen_linear_model(n: int, p: int, s: int, snr: float, seed) -> ModelInstance:
    """Gaussian design with unit-norm centered columns, +-1 signal amplitudes.

    The noise scale is chosen so that |X beta|^2 / (n sigma^2) equals ``snr``
    exactly; for s = 0 the response is pure centered noise with sigma = 1.
    """
    if not (0 <= s <= p):
        raise ValueError("need 0 <= s <= p")
    space = AmbientSpace(n)
    rng = make_rng(seed)
    X = rng.standard_normal((n, p))
    for j in range(p):
        X[:, j] = standardize_column(X[:, j], space)
    beta = np.zeros(p)
    support = rng.choice(p, size=s, replace=False)
    beta[support] = np.where(rng.random(s) < 0.5, -1.0, 1.0)
    mu = X @ beta
    if s > 0:
        if snr <= 0:
            raise ValueError("snr must be positive when s > 0")
        sigma = float(np.linalg.norm(mu) / math.sqrt(n * snr))
    else:
        sigma = 1.0
    eps = sigma * rng.standard_normal(n)
    y = center_project(mu + eps, space)
    return ModelInstance(
        X=X, y=y, beta=beta, active=frozenset(int(j) for j in support), sigma=sigma
    )


def gen_iid_dummy_matrix(
    n: int, L: int, law: CoordinateLaw, seed, unit_norm: bool = False
) -> np.ndarray:
    """Explicit dummy block: i.i.d. raw coordinates, centered, rescaled.

    Default normalization gives every column Euclidean norm sqrt(n); with
    ``unit_norm`` the columns are scaled to norm 1 instead.
    """
    space = AmbientSpace(n)
    rng = make_rng(seed)
    raw = law.sample(rng, (n, L))
    D = raw - raw.mean(axis=0)
    norms = np.linalg.norm(D, axis=0)
    if np.any(norms <= 1e-12):
        raise ValueError("degenerate dummy draw")
    scale = 1.0 if unit_norm else math.sqrt(n)
    return D * (scale / norms)


def ks_statistic(sample_a, sample_b_or_cdf) -> float:
    """KS sup-distance, two-sample or one-sample against a CDF callback."""
    a = np.sort(np.asarray(sample_a, dtype=float).ravel())
    if a.size == 0:
        raise EmptySample("first sample is empty")
    if callable(sample_b_or_cdf):
        F = np.asarray(sample_b_or_cdf(a), dtype=float)
        i = np.arange(1, a.size + 1)
        upper = np.max(i / a.size - F)
        lower = np.max(F - (i - 1) / a.size)
        return float(max(upper, lower, 0.0))
    b = np.sort(np.asarray(sample_b_or_cdf, dtype=float).ravel())
    if b.size == 0:
        raise EmptySample("second sample is empty")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(fa - fb).max())


def wasserstein1(sample_a, sample_b) -> float:
    """1-Wasserstein distance between empirical measures.

    Equal sizes reduce to the mean absolute difference of sorted samples; the
    general case integrates the absolute ECDF difference over the merged
    support.
    """
    a = np.sort(np.asarray(sample_a, dtype=float).ravel())
    b = np.sort(np.asarray(sample_b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise EmptySample("both samples must be nonempty")
    if a.size == b.size:
        return float(np.mean(np.abs(a - b)))
    grid = np.sort(np.concatenate([a, b]))
    fa = np.searchsorted(a, grid[:-1], side="right") / a.size
    fb = np.searchsorted(b, grid[:-1], side="right") / b.size
    return float(np.sum(np.abs(fa - fb) * np.diff(grid)))


def dummy_corr_order_stats(pool, basis, residual, ranks):
    """Rank-th largest |<d_l, r>| over unselected dummies, for each rank.

    Uses the projection table only (no ambient dummy vectors); exact partial
    selection via partition.
    """
    _, scores = pool.scores(basis.coeffs(residual))
    absval = np.abs(scores)
    out = []
    for rank in ranks:
        if not 1 <= rank <= absval.size:
            raise RankOutOfRange(f"rank {rank} with {absval.size} unselected dummies")
        out.append(float(np.partition(absval, absval.size - rank)[absval.size - rank]))
    return out


def fdp_tpp(selected, active):
    """False discovery and true positive proportions of a selected set."""
    selected = set(selected)
    active = set(active)
    fdp = len(selected - active) / max(1, len(selected))
    tpp = len(selected & active) / max(1, len(active))
    return fdp, tpp


def eta_bound(L: int, delta: float, m: int) -> float:
    """High-probability radial inflation of L Gaussian dummies in dimension m."""
    if L < 1 or m < 1 or not 0 < delta < 1:
        raise ValueError("need L >= 1, m >= 1, delta in (0, 1)")
    t = math.log(L / delta) / m
    return math.sqrt(2.0 * t) + t


def deloc_proxy(e) -> float:
    """Largest absolute coordinate of a basis direction."""
    return float(np.abs(np.asarray(e, dtype=float)).max())
