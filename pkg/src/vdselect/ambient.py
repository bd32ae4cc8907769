"""Geometry of the centered subspace and the adaptively grown orthonormal basis.

All working vectors live in H = {x in R^n : sum(x) = 0}, which has dimension
m = n - 1. The basis object maintains the directions revealed so far by a
forward-selection path; new directions are added by modified Gram-Schmidt
with one conditional re-orthogonalization pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateColumn, DegenerateDirection, DimensionMismatch

TOL_CENTER = 1e-12
TOL_ORTHO = 1e-10
TOL_NORM = 1e-12


@dataclass(frozen=True)
class AmbientSpace:
    """Sample count n and the dimension m = n - 1 of the centered subspace."""

    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"need n >= 3, got n={self.n}")

    @property
    def m(self) -> int:
        return self.n - 1


def center_project(v, space: AmbientSpace) -> np.ndarray:
    """Project v onto the centered subspace: subtract the coordinate mean."""
    v = np.asarray(v, dtype=float)
    if v.shape != (space.n,):
        raise DimensionMismatch(f"expected length {space.n}, got shape {v.shape}")
    return v - v.mean()


def is_centered(v: np.ndarray, tol: float = TOL_CENTER) -> bool:
    scale = np.abs(v).max(initial=0.0)
    return abs(v.sum()) <= tol * v.shape[0] * max(scale, 1e-300)


def standardize_column(v, space: AmbientSpace) -> np.ndarray:
    """Center v and scale it to unit Euclidean norm.

    Raises DegenerateColumn for (numerically) constant columns.
    """
    c = center_project(v, space)
    nrm = np.linalg.norm(c)
    if nrm <= TOL_NORM:
        raise DegenerateColumn("column is constant after centering")
    return c / nrm


class OrthonormalBasis:
    """Ordered orthonormal directions e_1..e_k spanning the revealed subspace.

    Directions are stored as dense ambient n-vectors because realizing a
    selected dummy requires explicit orthogonal complements.
    """

    def __init__(self, space: AmbientSpace):
        self.space = space
        self._store = np.empty((space.n, 8), dtype=float, order="F")
        self._k = 0

    @property
    def k(self) -> int:
        return self._k

    @property
    def matrix(self) -> np.ndarray:
        """View of shape (n, k) holding the current directions as columns."""
        return self._store[:, : self._k]

    def direction(self, i: int) -> np.ndarray:
        if not 0 <= i < self._k:
            raise IndexError(i)
        return self._store[:, i].copy()

    def extend(self, v: np.ndarray) -> np.ndarray:
        """Orthonormalize v against the current directions and append the result.

        One extra re-orthogonalization pass is applied when the orthogonal
        part lost more than half the norm of v (numerical hygiene for nearly
        dependent candidates).
        """
        if self._k >= self.space.m:
            raise DegenerateDirection("basis already spans the centered subspace")
        v = np.asarray(v, dtype=float)
        if v.shape != (self.space.n,):
            raise DimensionMismatch(f"expected length {self.space.n}")
        nrm_v = np.linalg.norm(v)
        E = self.matrix
        w = v - E @ (E.T @ v)
        if np.linalg.norm(w) < 0.5 * nrm_v:
            w = w - E @ (E.T @ w)
        nrm_w = np.linalg.norm(w)
        if nrm_w <= TOL_NORM * max(nrm_v, 1e-300):
            raise DegenerateDirection("candidate lies in the revealed subspace")
        e = w / nrm_w
        if self._k == self._store.shape[1]:
            grown = np.empty((self.space.n, 2 * self._k), dtype=float, order="F")
            grown[:, : self._k] = self._store
            self._store = grown
        self._store[:, self._k] = e
        self._k += 1
        return e.copy()

    def coeffs(self, v: np.ndarray) -> np.ndarray:
        """Inner products (<e_1, v>, ..., <e_k, v>)."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.space.n,):
            raise DimensionMismatch(f"expected length {self.space.n}")
        return self.matrix.T @ v

    def project_out(self, v: np.ndarray) -> np.ndarray:
        """Component of v orthogonal to the revealed subspace (two GS passes)."""
        E = self.matrix
        w = v - E @ (E.T @ v)
        w -= E @ (E.T @ w)
        return w
