"""Virtual dummy pool: adaptive stick-breaking projection sampling.

A pool replaces the explicit n x L block of synthetic null columns by the
table of their projections onto the adaptively revealed orthonormal basis.
Fresh projections are drawn from their exact conditional law given the
selection history; a dummy is only completed to a full ambient vector at the
step where it is selected.

Three rotationally invariant base laws are supported:

* ``SPHERICAL`` -- uniform on the unit sphere of the centered subspace;
  squared projections follow the stick-breaking Beta factorization.
* ``GAUSSIAN_UNIT_PROJ`` -- standard Gaussian on the centered subspace;
  fresh projections are N(0, 1).
* ``GAUSSIAN_UNIT_NORM`` -- Gaussian scaled to unit expected squared column
  norm; fresh projections are N(0, 1/m). Included for the norm-inflation
  comparison against spherical columns.

Shadow mode backs the same interface with an explicit column matrix; the
projection table then reproduces exact inner products, which couples a
virtual run bit-for-bit to a run on the explicitly augmented design.
"""

from __future__ import annotations

import enum
from typing import Optional

import numpy as np

from ._seeds import make_rng
from .ambient import AmbientSpace, OrthonormalBasis, center_project
from .errors import (
    AlreadyRealized,
    BasisExhausted,
    DegenerateResidual,
    DimensionMismatch,
    OutOfOrder,
    ShadowShapeMismatch,
)

TOL_NORM = 1e-12
UNSELECTED = -1


class DummyLaw(enum.Enum):
    SPHERICAL = "spherical"
    GAUSSIAN_UNIT_PROJ = "gaussian-proj"
    GAUSSIAN_UNIT_NORM = "gaussian-norm"


def _beta_half(rng: np.random.Generator, b, size) -> np.ndarray:
    """Beta(1/2, b) via the Gamma ratio G1/(G1+G2), G1 ~ Gamma(1/2), G2 ~ Gamma(b).

    Exact and free of data-dependent rejection loops; draw order per call is
    fixed (G1 block, then G2 block).
    """
    g1 = rng.gamma(0.5, size=size)
    g2 = rng.gamma(b, size=size)
    return g1 / (g1 + g2)


class DummyPool:
    """Projection-state table for L virtual dummies.

    All randomness of a pool flows from a single deterministic stream seeded
    by ``seed``; draws are made in fixed dummy-index order, so a given seed
    reproduces a path bit-for-bit. Per-dummy substreams are unnecessary
    because a forward path is strictly sequential.
    """

    def __init__(
        self,
        L: int,
        law: DummyLaw,
        space: AmbientSpace,
        seed,
        shadow: Optional[np.ndarray] = None,
    ):
        if L < 0:
            raise ValueError("L must be nonnegative")
        self.L = L
        self.law = law
        self.space = space
        self.rng = make_rng(seed)
        self.shadow = None
        if shadow is not None:
            shadow = np.asarray(shadow, dtype=float)
            if shadow.shape != (space.n, L):
                raise ShadowShapeMismatch(
                    f"expected {(space.n, L)} shadow columns, got {shadow.shape}"
                )
            self.shadow = shadow
        self._alpha = np.empty((8, L), dtype=float)
        self._rows = 0
        self.r2 = np.ones(L, dtype=float)
        self.tau = np.full(L, UNSELECTED, dtype=int)
        self.realized: dict[int, np.ndarray] = {}

    # -- bookkeeping ------------------------------------------------------

    @property
    def rows(self) -> int:
        """Number of projection rows revealed so far (= basis size served)."""
        return self._rows

    @property
    def is_shadow(self) -> bool:
        return self.shadow is not None

    @property
    def unselected(self) -> np.ndarray:
        """Indices of dummies whose selection time is still unset."""
        return np.flatnonzero(self.tau == UNSELECTED)

    @property
    def table(self) -> np.ndarray:
        """View of the k x L projection table (NaN for realized dummies' tail rows)."""
        return self._alpha[: self._rows]

    def state_bytes(self) -> int:
        """Dummy-state memory: projection table, stick radii, realized columns."""
        total = self._alpha[: self._rows].size * 8 + self.r2.nbytes + self.tau.nbytes
        total += sum(d.nbytes for d in self.realized.values())
        return total

    def _append_row(self, row: np.ndarray) -> None:
        if self._rows == self._alpha.shape[0]:
            grown = np.empty((2 * self._rows, self.L), dtype=float)
            grown[: self._rows] = self._alpha
            self._alpha = grown
        self._alpha[self._rows] = row
        self._rows += 1

    # -- sampling ---------------------------------------------------------

    def fresh_projections(self, e_new: np.ndarray, basis_size: int) -> np.ndarray:
        """Append the projection row onto the new direction for unselected dummies.

        ``basis_size`` is the basis size after appending ``e_new``; exactly one
        call per extension, in order. Returns the new coefficients for the
        currently unselected dummies (in index order).
        """
        if basis_size != self._rows + 1:
            raise OutOfOrder(
                f"expected call for basis size {self._rows + 1}, got {basis_size}"
            )
        coord = self._rows + 1  # 1-based coordinate being revealed
        if coord > self.space.m:
            raise BasisExhausted("all coordinates already revealed")
        unsel = self.unselected
        row = np.full(self.L, np.nan)
        if self.is_shadow:
            vals = self.shadow[:, unsel].T @ np.asarray(e_new, dtype=float)
            if self.law is DummyLaw.SPHERICAL:
                self.r2[unsel] = np.maximum(self.r2[unsel] - vals**2, 0.0)
        elif self.law is DummyLaw.SPHERICAL:
            m = self.space.m
            nu = unsel.size
            if coord == m:
                signs = np.where(self.rng.random(nu) < 0.5, -1.0, 1.0)
                vals = signs * np.sqrt(self.r2[unsel])
                self.r2[unsel] = 0.0
            else:
                u = _beta_half(self.rng, (m - coord) / 2.0, nu)
                signs = np.where(self.rng.random(nu) < 0.5, -1.0, 1.0)
                vals = signs * np.sqrt(self.r2[unsel] * u)
                self.r2[unsel] = self.r2[unsel] * (1.0 - u)
        elif self.law is DummyLaw.GAUSSIAN_UNIT_PROJ:
            vals = self.rng.standard_normal(unsel.size)
        else:  # GAUSSIAN_UNIT_NORM
            vals = self.rng.standard_normal(unsel.size) / np.sqrt(self.space.m)
        row[unsel] = vals
        self._append_row(row)
        return vals

    def scores(self, t: np.ndarray):
        """Inner products <d_l, s> for unselected dummies, where t = basis coeffs of s.

        Returns (indices, values); cost O(kL), never touches ambient
        coordinates in sampled mode.
        """
        t = np.asarray(t, dtype=float)
        if t.shape != (self._rows,):
            raise DimensionMismatch(
                f"expected {self._rows} coefficients, got shape {t.shape}"
            )
        unsel = self.unselected
        if self._rows == 0 or unsel.size == 0:
            return unsel, np.zeros(unsel.size)
        return unsel, t @ self._alpha[: self._rows, unsel]

    def realize(self, ell: int, basis: OrthonormalBasis) -> np.ndarray:
        """Complete dummy ``ell`` to a full ambient vector and set its selection time.

        The unrevealed residual is drawn in the orthogonal complement of the
        revealed subspace (sampled mode) or read off the explicit column
        (shadow mode).
        """
        if self.tau[ell] != UNSELECTED:
            raise AlreadyRealized(f"dummy {ell} realized at step {self.tau[ell]}")
        k = basis.k
        if k != self._rows:
            raise OutOfOrder(
                f"projection table has {self._rows} rows but basis size is {k}"
            )
        if self.is_shadow:
            d = self.shadow[:, ell].copy()
        else:
            alpha = self._alpha[:k, ell]
            if k == self.space.m:
                # fully revealed: the orthogonal complement in H is trivial
                w = np.zeros(self.space.n)
            else:
                w = self._sample_complement(basis)
                if self.law is DummyLaw.SPHERICAL:
                    w *= np.sqrt(max(self.r2[ell], 0.0)) / np.linalg.norm(w)
                elif self.law is DummyLaw.GAUSSIAN_UNIT_NORM:
                    w /= np.sqrt(self.space.m)
            d = basis.matrix @ alpha + w
        self.tau[ell] = k
        self.realized[ell] = d
        return d

    def _sample_complement(self, basis: OrthonormalBasis) -> np.ndarray:
        for _ in range(2):
            g = self.rng.standard_normal(self.space.n)
            g = center_project(g, self.space)
            w = basis.project_out(g)
            if np.linalg.norm(w) > TOL_NORM:
                return w
        raise DegenerateResidual("sampled orthogonal complement vanished twice")


def full_stick_break(space: AmbientSpace, basis: OrthonormalBasis, seed) -> np.ndarray:
    """Run the full adaptive stick-breaking recursion for one spherical vector.

    Requires a basis spanning the whole centered subspace; returns the m
    coefficients, whose squared values sum to one.
    """
    if basis.k != space.m:
        raise ValueError("basis must span the centered subspace")
    return stick_break_batch(space.m, 1, seed)[0]


def stick_break_batch(m: int, ndraws: int, seed) -> np.ndarray:
    """Vectorized stick-breaking coefficients: ``ndraws`` rows of length m.

    Each row has unit Euclidean norm; squared entries follow the symmetric
    Dirichlet(1/2, ..., 1/2) law.
    """
    if m < 2:
        raise ValueError("need m >= 2")
    rng = make_rng(seed)
    b = (m - np.arange(1, m)) / 2.0
    g1 = rng.gamma(0.5, size=(ndraws, m - 1))
    g2 = rng.gamma(b, size=(ndraws, m - 1))
    u = g1 / (g1 + g2)
    signs = np.where(rng.random((ndraws, m)) < 0.5, -1.0, 1.0)
    z = np.empty((ndraws, m))
    stick = np.cumprod(1.0 - u, axis=1)
    z[:, 0] = u[:, 0]
    z[:, 1:-1] = u[:, 1:] * stick[:, :-1]
    z[:, -1] = stick[:, -1]
    return signs * np.sqrt(z)
