"""Forward-selection drivers over the dummy-augmented candidate set.

Provides the virtual-dummy LARS driver (``run_path``), the explicitly
augmented classical LARS reference (``ad_lars_run``), and virtual-dummy
orthogonal matching pursuit (``vd_omp_run``).

Global candidate indices: real columns occupy 0..p-1, dummy ``l`` appears at
``p + l``. Tie-break everywhere: among candidates within 1e-12 relative of
the optimum, the smallest global index wins (reals therefore beat dummies),
and the positive-sign entry branch beats the negative one at equal index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ambient import AmbientSpace, OrthonormalBasis
from .dummies import DummyPool
from .errors import DegenerateDirection, DimensionMismatch, SingularGram, ZeroResponse

TOL_NORM = 1e-12
TOL_TIE = 1e-12
TOL_PIVOT = 1e-10


# ---------------------------------------------------------------------------
# column providers
# ---------------------------------------------------------------------------


class MatrixColumns:
    """In-memory column provider for a standardized design matrix."""

    def __init__(self, X: np.ndarray):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise DimensionMismatch("design must be a 2-d array")
        self.X = X
        self.n, self.p = X.shape

    def column(self, j: int) -> np.ndarray:
        return self.X[:, j]

    def dot_all(self, v: np.ndarray) -> np.ndarray:
        return self.X.T @ v


def as_provider(X):
    if hasattr(X, "column") and hasattr(X, "dot_all"):
        return X
    return MatrixColumns(X)


# ---------------------------------------------------------------------------
# stopping rules and path records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StoppingRule:
    kind: str
    value: float

    @classmethod
    def dummy_count(cls, T: int) -> "StoppingRule":
        return cls("dummy_count", T)

    @classmethod
    def active_limit(cls, limit: int) -> "StoppingRule":
        return cls("active_limit", limit)

    @classmethod
    def correlation_floor(cls, tol: float) -> "StoppingRule":
        return cls("correlation_floor", tol)


@dataclass(frozen=True)
class PathEvent:
    step: int
    index: int
    is_dummy: bool
    gamma: float
    c_before: float
    basis_size_after: int


@dataclass
class PathResult:
    events: list
    dummies_selected: int
    realized: dict
    exhausted: bool = False
    residual: Optional[np.ndarray] = None
    basis: Optional[OrthonormalBasis] = None

    @property
    def kappa(self) -> int:
        return len(self.events)

    def candidate_prefix(self, T: int):
        """Real indices selected before the T-th dummy (full real prefix if the
        path produced fewer than T dummies)."""
        out = []
        seen = 0
        for ev in self.events:
            if ev.is_dummy:
                seen += 1
                if seen >= T:
                    break
            else:
                out.append(ev.index)
        return out


# ---------------------------------------------------------------------------
# small dense linear-algebra helpers (shared by VD and AD drivers)
# ---------------------------------------------------------------------------


def _solve_lower(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.empty_like(b)
    for i in range(b.shape[0]):
        x[i] = (b[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def _solve_upper_from_lower(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    # solves L.T x = b
    n = b.shape[0]
    x = np.empty_like(b)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - L[i + 1 :, i] @ x[i + 1 :]) / L[i, i]
    return x


class _CholAppend:
    """Lower-triangular Cholesky factor of the signed active Gram matrix,
    extended one column at a time (no downdates: variable deletion is out of
    scope)."""

    def __init__(self, cap: int = 8):
        self.L = np.zeros((cap, cap))
        self.size = 0

    def _grow(self):
        if self.size == self.L.shape[0]:
            grown = np.zeros((2 * self.size, 2 * self.size))
            grown[: self.size, : self.size] = self.L
            self.L = grown

    def append(self, g: np.ndarray, d: float) -> None:
        """Append a column with cross inner products g and squared norm d."""
        self._grow()
        k = self.size
        Lk = self.L[:k, :k]
        if k == 0:
            rem = d
            w = np.empty(0)
        else:
            w = _solve_lower(Lk, g)
            rem = d - w @ w
        diag = self.L.diagonal()[:k] ** 2
        pivot_scale = max(diag.max(initial=0.0), d)
        if rem <= TOL_PIVOT * pivot_scale:
            raise SingularGram("entering column is numerically dependent on the active set")
        self.L[k, :k] = w
        self.L[k, k] = np.sqrt(rem)
        self.size += 1

    def equiangular_weights(self):
        """Solve G z = 1; return (w, A) with A = (1' z)^(-1/2), w = A z."""
        k = self.size
        ones = np.ones(k)
        z = _solve_upper_from_lower(self.L[:k, :k], _solve_lower(self.L[:k, :k], ones))
        s = ones @ z
        if s <= 0:
            raise SingularGram("non-positive 1' G^-1 1")
        A = 1.0 / np.sqrt(s)
        return A * z, A


def _argmax_tiebreak(absvals: np.ndarray, gidx: np.ndarray):
    C = absvals.max()
    tie = absvals >= C - TOL_TIE * max(C, 1e-300)
    j = gidx[tie].min()
    return C, j


def _min_positive_candidate(C, A, vals, slopes, gidx):
    """Minimum nonnegative LARS entry ratio over (C-c)/(A-a) and (C+c)/(A+a).

    A zero ratio is an exact correlation tie: the candidate joins without an
    equiangular move. Returns (gamma, global index, entry sign) or None when
    no candidate ratio is nonnegative (terminal least-squares step)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        gp = (C - vals) / (A - slopes)
        gm = (C + vals) / (A + slopes)
    cand = np.concatenate([gp, gm])
    cj = np.concatenate([gidx, gidx])
    cs = np.concatenate([np.ones(vals.size), -np.ones(vals.size)])
    ok = np.isfinite(cand) & (cand >= 0)
    if not ok.any():
        return None
    gmin = cand[ok].min()
    tie = ok & (cand <= gmin + TOL_TIE * max(gmin, 1e-300))
    order = np.lexsort((cs[tie] < 0, cj[tie]))[0]
    pick = np.flatnonzero(tie)[order]
    return cand[pick], int(cj[pick]), float(cs[pick])


# ---------------------------------------------------------------------------
# VD-LARS
# ---------------------------------------------------------------------------


@dataclass
class LarsState:
    space: AmbientSpace
    provider: object
    y: np.ndarray
    pool: DummyPool
    basis: OrthonormalBasis
    r: np.ndarray
    active: list = field(default_factory=list)  # (global index, sign)
    chol: _CholAppend = field(default_factory=_CholAppend)
    signed_cols: Optional[np.ndarray] = None
    step: int = 0
    finished: bool = False

    @property
    def n_active(self) -> int:
        return len(self.active)

    def _append_column(self, sv: np.ndarray) -> None:
        na = self.n_active
        if self.signed_cols is None:
            self.signed_cols = np.empty((self.space.n, 8), order="F")
        elif na == self.signed_cols.shape[1]:
            grown = np.empty((self.space.n, 2 * na), order="F")
            grown[:, :na] = self.signed_cols
            self.signed_cols = grown
        self.signed_cols[:, na] = sv

    def active_columns(self) -> np.ndarray:
        if self.signed_cols is None:
            return np.empty((self.space.n, 0))
        return self.signed_cols[:, : self.n_active]


def lars_init(X, y: np.ndarray, pool: DummyPool) -> LarsState:
    """Start a VD-LARS path: r_0 = y, e_1 = y/|y|, first projection row drawn."""
    provider = as_provider(X)
    y = np.asarray(y, dtype=float)
    space = pool.space
    if y.shape != (space.n,):
        raise DimensionMismatch(f"response length {y.shape} != n={space.n}")
    if np.linalg.norm(y) <= TOL_NORM:
        raise ZeroResponse("response has (numerically) zero norm")
    basis = OrthonormalBasis(space)
    e1 = basis.extend(y)
    pool.fresh_projections(e1, 1)
    return LarsState(
        space=space, provider=provider, y=y.copy(), pool=pool, basis=basis, r=y.copy()
    )


def lars_equiangular(state: LarsState):
    """Equiangular direction of the signed active columns.

    Returns (w, u, A) with u = Xs w unit norm and <xs_j, u> = A for every
    active column."""
    if state.n_active == 0:
        raise SingularGram("empty active set")
    w, A = state.chol.equiangular_weights()
    u = state.active_columns() @ w
    return w, u, A


def _extend_with(basis: OrthonormalBasis, pool: DummyPool, v: np.ndarray) -> bool:
    """Extend the basis with v and serve the pool its new projection row.

    A column already inside the revealed span adds no direction and reveals
    no coordinate; that case is legal and returns False."""
    try:
        e_new = basis.extend(v)
    except DegenerateDirection:
        return False
    pool.fresh_projections(e_new, basis.k)
    return True


def _inactive_reals(state) -> np.ndarray:
    p = state.provider.p
    mask = np.ones(p, dtype=bool)
    for j, _ in state.active:
        if j < p:
            mask[j] = False
    return np.flatnonzero(mask)


def _terminal_move(state: LarsState) -> None:
    """With no candidates left, finish with the full least-squares move C/A."""
    if state.n_active == 0:
        return
    _, u, A = lars_equiangular(state)
    C = float(np.mean(state.active_columns().T @ state.r))
    state.r = state.r - (C / A) * u


def lars_step(state: LarsState, corr_floor: Optional[float] = None):
    """Advance one VD-LARS event; returns the PathEvent or None at termination."""
    if state.finished:
        return None
    space, basis, pool, prov = state.space, state.basis, state.pool, state.provider
    if basis.k >= space.m:
        state.finished = True
        return None
    p = prov.p
    inact = _inactive_reals(state)
    c_all = prov.dot_all(state.r)
    d_idx, rho = pool.scores(basis.coeffs(state.r))
    vals = np.concatenate([c_all[inact], rho])
    gidx = np.concatenate([inact, p + d_idx])
    if vals.size == 0:
        _terminal_move(state)
        state.finished = True
        return None
    if state.n_active == 0:
        C, jstar = _argmax_tiebreak(np.abs(vals), gidx)
        if corr_floor is not None and C <= corr_floor:
            state.finished = True
            return None
        sign = 1.0 if vals[np.flatnonzero(gidx == jstar)[0]] >= 0 else -1.0
        gamma = 0.0
    else:
        # the working correlation level is the common value shared by the
        # signed active columns, not the best inactive candidate
        C = float(np.mean(state.active_columns().T @ state.r))
        if corr_floor is not None and C <= corr_floor:
            state.finished = True
            return None
        _, u, A = lars_equiangular(state)
        a_all = prov.dot_all(u)
        a_d = pool.scores(basis.coeffs(u))[1]
        slopes = np.concatenate([a_all[inact], a_d])
        picked = _min_positive_candidate(C, A, vals, slopes, gidx)
        if picked is None:
            state.r = state.r - (C / A) * u
            state.finished = True
            return None
        gamma, jstar, sign = picked
        state.r = state.r - gamma * u
    if jstar >= p:
        v = pool.realize(jstar - p, basis)
        is_dummy = True
    else:
        v = np.asarray(prov.column(jstar), dtype=float)
        is_dummy = False
    _extend_with(basis, pool, v)
    sv = sign * v
    g = state.active_columns().T @ sv
    state.chol.append(g, float(v @ v))
    state._append_column(sv)
    state.active.append((jstar, sign))
    state.step += 1
    return PathEvent(
        step=state.step,
        index=jstar,
        is_dummy=is_dummy,
        gamma=float(gamma),
        c_before=float(C),
        basis_size_after=basis.k,
    )


def run_path(X, y: np.ndarray, pool: DummyPool, stop: StoppingRule) -> PathResult:
    """Run VD-LARS until the stopping rule fires; deterministic given the pool seed."""
    state = lars_init(X, y, pool)
    events = []
    dummies = 0
    floor = stop.value if stop.kind == "correlation_floor" else None
    exhausted = False
    while True:
        ev = lars_step(state, corr_floor=floor)
        if ev is None:
            exhausted = stop.kind == "dummy_count" and dummies < stop.value
            break
        if ev.is_dummy:
            dummies += 1
        events.append(ev)
        if stop.kind == "dummy_count" and dummies >= stop.value:
            break
        if stop.kind == "active_limit" and state.n_active >= stop.value:
            break
    return PathResult(
        events=events,
        dummies_selected=dummies,
        realized=dict(pool.realized),
        exhausted=exhausted,
        residual=state.r.copy(),
        basis=state.basis,
    )


# ---------------------------------------------------------------------------
# AD-LARS: classical LARS on the explicitly augmented design
# ---------------------------------------------------------------------------


def ad_lars_run(X, y: np.ndarray, D: np.ndarray, stop: StoppingRule) -> PathResult:
    """Classical LARS on (X D) with the same tie-break and stopping rules.

    This is the explicit-augmentation reference process; a shadow-mode
    virtual run on the same D must reproduce its event sequence exactly."""
    X = np.asarray(X, dtype=float)
    D = np.asarray(D, dtype=float)
    n, p = X.shape
    if D.ndim != 2 or (D.size and D.shape[0] != n):
        raise DimensionMismatch("dummy block must be n x L")
    L_count = D.shape[1] if D.size else 0
    aug = np.concatenate([X, D], axis=1) if L_count else X
    total = p + L_count
    y = np.asarray(y, dtype=float)
    if np.linalg.norm(y) <= TOL_NORM:
        raise ZeroResponse("response has (numerically) zero norm")
    m = n - 1

    r = y.copy()
    active: list = []
    chol = _CholAppend()
    scols = np.empty((n, 8), order="F")
    events = []
    dummies = 0
    realized = {}
    floor = stop.value if stop.kind == "correlation_floor" else None
    exhausted = False

    def append_col(sv):
        nonlocal scols
        na = len(active)
        if na == scols.shape[1]:
            grown = np.empty((n, 2 * na), order="F")
            grown[:, :na] = scols
            scols = grown
        scols[:, na] = sv

    while True:
        na = len(active)
        if na >= m:
            exhausted = stop.kind == "dummy_count" and dummies < stop.value
            break
        act = {j for j, _ in active}
        inact = np.array([j for j in range(total) if j not in act], dtype=int)
        if inact.size == 0:
            if na > 0:
                w, A = chol.equiangular_weights()
                u = scols[:, :na] @ w
                C_act = float(np.mean(scols[:, :na].T @ r))
                r = r - (C_act / A) * u
            exhausted = stop.kind == "dummy_count" and dummies < stop.value
            break
        vals = aug[:, inact].T @ r
        if na == 0:
            C, jstar = _argmax_tiebreak(np.abs(vals), inact)
            if floor is not None and C <= floor:
                exhausted = stop.kind == "dummy_count" and dummies < stop.value
                break
            sign = 1.0 if vals[np.flatnonzero(inact == jstar)[0]] >= 0 else -1.0
            gamma = 0.0
        else:
            C = float(np.mean(scols[:, :na].T @ r))
            if floor is not None and C <= floor:
                exhausted = stop.kind == "dummy_count" and dummies < stop.value
                break
            w, A = chol.equiangular_weights()
            u = scols[:, :na] @ w
            slopes = aug[:, inact].T @ u
            picked = _min_positive_candidate(C, A, vals, slopes, inact)
            if picked is None:
                r = r - (C / A) * u
                exhausted = stop.kind == "dummy_count" and dummies < stop.value
                break
            gamma, jstar, sign = picked
            r = r - gamma * u
        v = aug[:, jstar]
        sv = sign * v
        g = scols[:, :na].T @ sv
        chol.append(g, float(v @ v))
        append_col(sv)
        active.append((jstar, sign))
        is_dummy = jstar >= p
        if is_dummy:
            dummies += 1
            realized[jstar - p] = v.copy()
        events.append(
            PathEvent(
                step=len(events) + 1,
                index=jstar,
                is_dummy=is_dummy,
                gamma=float(gamma),
                c_before=float(C),
                basis_size_after=na + 2,
            )
        )
        if stop.kind == "dummy_count" and dummies >= stop.value:
            break
        if stop.kind == "active_limit" and len(active) >= stop.value:
            break
    return PathResult(
        events=events,
        dummies_selected=dummies,
        realized=realized,
        exhausted=exhausted,
        residual=r.copy(),
    )


# ---------------------------------------------------------------------------
# VD-OMP
# ---------------------------------------------------------------------------


def vd_omp_run(X, y: np.ndarray, pool: DummyPool, stop: StoppingRule) -> PathResult:
    """Virtual-dummy orthogonal matching pursuit.

    At each step the candidate with the largest absolute residual correlation
    enters; the residual is then recomputed as the least-squares residual of
    y on the selected columns, solved in basis coordinates."""
    state = lars_init(X, y, pool)
    space, basis, prov = state.space, state.basis, state.provider
    p = prov.p
    y = state.y
    y_norm = float(np.linalg.norm(y))
    sel_cols = np.empty((space.n, 8), order="F")
    coords = np.zeros((8, 8))  # basis coords of selected columns (k x j)
    nsel = 0
    events = []
    dummies = 0
    floor = stop.value if stop.kind == "correlation_floor" else None
    exhausted = False

    def grow(arr, shape, order="C"):
        out = np.zeros(shape, order=order) if order == "C" else np.empty(shape, order="F")
        out[: arr.shape[0], : arr.shape[1]] = arr[: arr.shape[0], : arr.shape[1]]
        return out

    while True:
        k = basis.k
        if k >= space.m:
            exhausted = stop.kind == "dummy_count" and dummies < stop.value
            break
        inact = _inactive_reals(state)
        c_all = prov.dot_all(state.r)
        d_idx, rho = state.pool.scores(basis.coeffs(state.r))
        vals = np.concatenate([c_all[inact], rho])
        gidx = np.concatenate([inact, p + d_idx])
        if vals.size == 0:
            exhausted = stop.kind == "dummy_count" and dummies < stop.value
            break
        C, jstar = _argmax_tiebreak(np.abs(vals), gidx)
        if floor is not None and C <= floor:
            exhausted = stop.kind == "dummy_count" and dummies < stop.value
            break
        if jstar >= p:
            v = state.pool.realize(jstar - p, basis)
            is_dummy = True
            dummies += 1
        else:
            v = np.asarray(prov.column(jstar), dtype=float)
            is_dummy = False
        extended = _extend_with(basis, state.pool, v)
        if nsel == sel_cols.shape[1]:
            sel_cols = grow(sel_cols, (space.n, 2 * nsel), order="F")
        sel_cols[:, nsel] = v
        if basis.k > coords.shape[0] or nsel + 1 > coords.shape[1]:
            coords = grow(coords, (2 * coords.shape[0], 2 * coords.shape[1]))
        coords[: basis.k, nsel] = basis.coeffs(v)
        if extended:
            # the new basis direction adds one coordinate row for earlier columns
            coords[basis.k - 1, :nsel] = basis.direction(basis.k - 1) @ sel_cols[:, :nsel]
        nsel += 1
        kk = basis.k
        y_coords = np.zeros(kk)
        y_coords[0] = y_norm
        B = coords[:kk, :nsel]
        sol, _, rank, _ = np.linalg.lstsq(B, y_coords, rcond=None)
        if rank < nsel:
            raise SingularGram("selected columns are numerically dependent")
        state.r = y - sel_cols[:, :nsel] @ sol
        state.active.append((jstar, 1.0))
        events.append(
            PathEvent(
                step=len(events) + 1,
                index=jstar,
                is_dummy=is_dummy,
                gamma=float("nan"),
                c_before=float(C),
                basis_size_after=basis.k,
            )
        )
        if stop.kind == "dummy_count" and dummies >= stop.value:
            break
        if stop.kind == "active_limit" and nsel >= stop.value:
            break
    return PathResult(
        events=events,
        dummies_selected=dummies,
        realized=dict(state.pool.realized),
        exhausted=exhausted,
        residual=state.r.copy(),
        basis=basis,
    )
