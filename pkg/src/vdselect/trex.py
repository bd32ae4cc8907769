"""Aggregated random experiments with FDP-calibrated voting selection.

B independent early-terminated forward paths are run, each against its own
virtual dummy pool. For every real variable j and dummy budget T the table of
relative occurrences Phi_{T,L}(j) records how often j was selected before the
T-th dummy. A voting threshold v keeps variables with Phi > v; the pair
(v*, T*) is calibrated to maximize the selection size subject to a
conservative false-discovery-proportion estimate staying below alpha.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dummies import DummyLaw, DummyPool
from .selectors import PathResult, StoppingRule, as_provider, run_path, vd_omp_run


@dataclass(frozen=True)
class TrexConfig:
    L: int
    B: int
    T_max: int
    alpha: float
    law: DummyLaw = DummyLaw.SPHERICAL
    selector: str = "lars"
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if not 1 <= self.T_max <= self.L:
            raise ValueError("need 1 <= T_max <= L")
        if self.B < 1:
            raise ValueError("need B >= 1")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.selector not in ("lars", "omp"):
            raise ValueError(f"unknown selector {self.selector!r}")


@dataclass(frozen=True)
class CandidateRecord:
    """Ordered selection events of one random experiment.

    ``indices`` are global indices in selection order, ``dummy_flags`` marks
    which of them were dummies. ``candidates(T)`` recovers the real prefix
    selected before the T-th dummy; exhausted paths contribute their full
    real prefix for every larger T.
    """

    experiment: int
    indices: tuple
    dummy_flags: tuple
    exhausted: bool

    def candidates(self, T: int):
        out = []
        seen = 0
        for j, flag in zip(self.indices, self.dummy_flags):
            if flag:
                seen += 1
                if seen >= T:
                    break
            else:
                out.append(j)
        return out


@dataclass(frozen=True)
class OccurrenceTable:
    """p x T_max table of relative occurrences, entries multiples of 1/B."""

    phi: np.ndarray
    B: int

    @property
    def p(self) -> int:
        return self.phi.shape[0]

    @property
    def T_max(self) -> int:
        return self.phi.shape[1]


@dataclass(frozen=True)
class Calibration:
    v_star: float
    T_star: int
    selected: frozenset
    fdp_estimate_at_choice: float
    feasible: bool


def _experiment_seed(master_seed: int, b: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(b,))


def _one_experiment(X, y, config: TrexConfig, b: int, space) -> CandidateRecord:
    pool = DummyPool(config.L, config.law, space, _experiment_seed(config.master_seed, b))
    stop = StoppingRule.dummy_count(config.T_max)
    runner = run_path if config.selector == "lars" else vd_omp_run
    try:
        result: PathResult = runner(X, y, pool, stop)
    except Exception as exc:
        raise type(exc)(f"experiment {b}: {exc}") from exc
    return CandidateRecord(
        experiment=b,
        indices=tuple(ev.index for ev in result.events),
        dummy_flags=tuple(ev.is_dummy for ev in result.events),
        exhausted=result.exhausted,
    )


def run_random_experiments(X, y, config: TrexConfig):
    """Run the B experiments; output is deterministic in the master seed and
    independent of the worker count."""
    from .ambient import AmbientSpace

    provider = as_provider(X)
    space = AmbientSpace(provider.n)
    if config.workers > 1 and config.B > 1:
        from joblib import Parallel, delayed

        records = Parallel(n_jobs=config.workers)(
            delayed(_one_experiment)(X, y, config, b, space) for b in range(config.B)
        )
    else:
        records = [_one_experiment(X, y, config, b, space) for b in range(config.B)]
    records.sort(key=lambda rec: rec.experiment)
    return records


def relative_occurrences(records, B: int, p: int, T_max: int = None) -> OccurrenceTable:
    """Phi_{T,L}(j) = fraction of experiments selecting j before the T-th dummy.

    Each real selection falls into C_b(T) for every T strictly larger than the
    number of dummies seen before it, so one pass per record fills a suffix of
    the row."""
    if len(records) != B:
        raise ValueError(f"expected {B} records, got {len(records)}")
    if T_max is None:
        T_max = max((sum(rec.dummy_flags) for rec in records), default=1)
        T_max = max(T_max, 1)
    counts = np.zeros((p, T_max))
    for rec in records:
        dummies_before = 0
        for j, flag in zip(rec.indices, rec.dummy_flags):
            if flag:
                dummies_before += 1
                if dummies_before >= T_max:
                    break
            else:
                counts[j, dummies_before:] += 1
    return OccurrenceTable(phi=counts / B, B=B)


def selected_set(table: OccurrenceTable, v: float, T: int) -> frozenset:
    """Voting selection: variables with Phi_{T,L}(j) strictly above v."""
    col = table.phi[:, T - 1]
    return frozenset(int(j) for j in np.flatnonzero(col > v))


def fdp_estimate(config: TrexConfig, table: OccurrenceTable, v: float, T: int) -> float:
    """Conservative FDP estimate V_hat / |selection| with V_hat = p T / (L + 1).

    The numerator is the expected number of null candidates examined before
    the T-th dummy when all p candidates are null, clamped into [0, 1].
    """
    if T <= 0:
        return 0.0
    v_hat = table.p * T / (config.L + 1)
    n_sel = len(selected_set(table, v, T))
    return min(1.0, v_hat / max(1, n_sel))


def voting_grid(B: int) -> np.ndarray:
    """Exhaustive threshold grid {0.5, 0.5 + 1/B, ...} below 1."""
    grid = 0.5 + np.arange(0, B) / B
    return grid[grid < 1.0 - 1e-12]


def calibrate(table: OccurrenceTable, config: TrexConfig) -> Calibration:
    """Pick (v*, T*) maximizing the selection size under estimate <= alpha.

    Ties are broken by smaller estimate, then smaller T, then larger v. If no
    grid point is feasible the result is empty with feasible=False.
    """
    best = None
    T_hi = min(config.T_max, table.T_max)
    for T in range(1, T_hi + 1):
        for v in voting_grid(config.B):
            est = fdp_estimate(config, table, v, T)
            if est > config.alpha:
                continue
            size = len(selected_set(table, v, T))
            key = (-size, est, T, -v)
            if best is None or key < best[0]:
                best = (key, float(v), T, est)
    if best is None:
        return Calibration(
            v_star=0.5,
            T_star=1,
            selected=frozenset(),
            fdp_estimate_at_choice=1.0,
            feasible=False,
        )
    _, v_star, T_star, est = best
    return Calibration(
        v_star=v_star,
        T_star=T_star,
        selected=selected_set(table, v_star, T_star),
        fdp_estimate_at_choice=est,
        feasible=True,
    )


def trex_select(X, y, config: TrexConfig):
    """End-to-end convenience wrapper: experiments, table, calibration."""
    provider = as_provider(X)
    records = run_random_experiments(provider, y, config)
    table = relative_occurrences(records, config.B, provider.p, config.T_max)
    cal = calibrate(table, config)
    return records, table, cal
