import tracemalloc

import numpy as np
import pytest
from reference_lars import reference_lars_events

from vdselect.ambient import AmbientSpace
from vdselect.dummies import DummyLaw, DummyPool
from vdselect.errors import ZeroResponse
from vdselect.selectors import (
    MatrixColumns,
    StoppingRule,
    ad_lars_run,
    lars_equiangular,
    lars_init,
    lars_step,
    run_path,
    vd_omp_run,
)
from vdselect.simlab import CoordinateLaw, gen_iid_dummy_matrix, gen_linear_model


def empty_pool(n, seed=0):
    return DummyPool(0, DummyLaw.SPHERICAL, AmbientSpace(n), seed)


def test_lars_matches_reference_on_real_columns():
    for seed in range(25):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(20, 80))
        p = int(rng.integers(5, 40))
        inst = gen_linear_model(n, p, min(3, p), 2.0, seed)
        steps = min(8, p, n - 3)
        ours = run_path(inst.X, inst.y, empty_pool(n, seed), StoppingRule.active_limit(steps))
        ref_events, _ = reference_lars_events(inst.X, inst.y, max_steps=steps)
        assert len(ours.events) == len(ref_events)
        for ev, (j, gamma, C) in zip(ours.events, ref_events):
            assert ev.index == j
            assert not ev.is_dummy
            assert abs(ev.gamma - gamma) < 1e-8
            assert abs(ev.c_before - C) < 1e-8


def test_lars_two_orthogonal_columns_exact():
    # orthogonal design: second step length has the closed form C_2 = |c_2|
    n = 8
    X = np.zeros((n, 2))
    X[0, 0], X[1, 0] = 1.0, -1.0
    X[2, 1], X[3, 1] = 1.0, -1.0
    X /= np.linalg.norm(X, axis=0)
    y = 3.0 * X[:, 0] + 1.0 * X[:, 1]
    res = run_path(X, y, empty_pool(n), StoppingRule.active_limit(5))
    assert [ev.index for ev in res.events] == [0, 1]
    assert abs(res.events[0].c_before - 3.0) < 1e-12
    # for orthonormal columns A = 1, gamma_1 = C_1 - C_2 = 2
    assert abs(res.events[1].gamma - 2.0) < 1e-12
    assert np.linalg.norm(res.residual) < 1e-10


def test_equiangular_contract():
    inst = gen_linear_model(40, 15, 4, 3.0, 3)
    pool = empty_pool(40, 3)
    state = lars_init(inst.X, inst.y, pool)
    for _ in range(5):
        lars_step(state)
    w, u, A = lars_equiangular(state)
    assert abs(np.linalg.norm(u) - 1.0) < 1e-10
    prods = state.active_columns().T @ u
    assert np.abs(prods - A).max() < 1e-10


def test_equiangular_frozen_value():
    # two unit columns with correlation 1/2: A = (1' G^-1 1)^(-1/2) = sqrt(3)/2
    n = 9
    rng = np.random.default_rng(7)
    space = AmbientSpace(n)
    from vdselect.ambient import OrthonormalBasis, center_project

    basis = OrthonormalBasis(space)
    e1 = basis.extend(center_project(rng.standard_normal(n), space))
    e2 = basis.extend(center_project(rng.standard_normal(n), space))
    x1 = e1
    x2 = 0.5 * e1 + np.sqrt(0.75) * e2
    X = np.column_stack([x1, x2])
    y = x1 + x2
    state = lars_init(X, y, empty_pool(n, 7))
    lars_step(state)
    lars_step(state)
    _, _, A = lars_equiangular(state)
    assert abs(A - np.sqrt(0.75)) < 1e-12
    assert abs(A - 0.8660254037844386) < 1e-12


def test_zero_response_rejected():
    X = np.zeros((10, 2))
    with pytest.raises(ZeroResponse):
        lars_init(X, np.zeros(10), empty_pool(10))


def test_shadow_coupling_exact():
    for seed in range(10):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(20, 60))
        p = int(rng.integers(5, 25))
        L = int(rng.integers(10, 60))
        inst = gen_linear_model(n, p, min(3, p), 1.0, 100 + seed)
        D = gen_iid_dummy_matrix(n, L, CoordinateLaw("gaussian"), seed, unit_norm=True)
        space = AmbientSpace(n)
        stop = StoppingRule.dummy_count(3)
        pool = DummyPool(L, DummyLaw.SPHERICAL, space, 0, shadow=D)
        vd = run_path(inst.X, inst.y, pool, stop)
        ad = ad_lars_run(inst.X, inst.y, D, stop)
        assert [(e.index, e.is_dummy) for e in vd.events] == [
            (e.index, e.is_dummy) for e in ad.events
        ]
        for a, b in zip(vd.events, ad.events):
            assert abs(a.gamma - b.gamma) < 1e-8
        assert np.allclose(vd.residual, ad.residual, atol=1e-8)


def test_finite_set_stability():
    # deleting an unselected dummy from the explicit block leaves the shadow
    # path prefix unchanged
    inst = gen_linear_model(40, 10, 3, 1.0, 5)
    D = gen_iid_dummy_matrix(40, 30, CoordinateLaw("gaussian"), 5, unit_norm=True)
    space = AmbientSpace(40)
    stop = StoppingRule.dummy_count(2)
    pool = DummyPool(30, DummyLaw.SPHERICAL, space, 0, shadow=D)
    base = run_path(inst.X, inst.y, pool, stop)
    selected_dummies = {ev.index - 10 for ev in base.events if ev.is_dummy}
    drop = max(l for l in range(30) if l not in selected_dummies)
    D2 = np.delete(D, drop, axis=1)
    pool2 = DummyPool(29, DummyLaw.SPHERICAL, space, 0, shadow=D2)
    pruned = run_path(inst.X, inst.y, pool2, stop)

    def norm(events, p, dropped):
        out = []
        for ev in events:
            if ev.is_dummy:
                l = ev.index - p
                out.append(("d", l - 1 if l > dropped else l))
            else:
                out.append(("r", ev.index))
        return out

    assert norm(base.events, 10, drop) == norm(pruned.events, 10, drop)


def test_sampled_path_never_materializes_dummy_block():
    n, p, L = 500, 20, 2000
    inst = gen_linear_model(n, p, 3, 1.0, 9)
    space = AmbientSpace(n)
    pool = DummyPool(L, DummyLaw.SPHERICAL, space, 1)
    tracemalloc.start()
    run_path(inst.X, inst.y, pool, StoppingRule.dummy_count(3))
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    assert peak < 0.5 * 8 * n * L


def test_dummy_count_stopping_exact():
    inst = gen_linear_model(50, 10, 2, 0.5, 11)
    pool = DummyPool(100, DummyLaw.SPHERICAL, AmbientSpace(50), 2)
    res = run_path(inst.X, inst.y, pool, StoppingRule.dummy_count(4))
    assert res.dummies_selected == 4
    assert res.events[-1].is_dummy
    assert set(res.realized) == {ev.index - 10 for ev in res.events if ev.is_dummy}


def test_path_determinism_same_seed():
    inst = gen_linear_model(40, 12, 3, 1.0, 13)
    runs = []
    for _ in range(2):
        pool = DummyPool(50, DummyLaw.SPHERICAL, AmbientSpace(40), 77)
        res = run_path(inst.X, inst.y, pool, StoppingRule.dummy_count(3))
        runs.append([(e.index, e.gamma) for e in res.events])
    assert runs[0] == runs[1]


def test_omp_residual_orthogonal_to_selected():
    inst = gen_linear_model(40, 12, 3, 2.0, 17)
    pool = DummyPool(30, DummyLaw.SPHERICAL, AmbientSpace(40), 3)
    res = vd_omp_run(inst.X, inst.y, pool, StoppingRule.active_limit(5))
    for ev in res.events:
        if not ev.is_dummy:
            col = inst.X[:, ev.index]
        else:
            col = res.realized[ev.index - 12]
        assert abs(col @ res.residual) < 1e-8


def test_omp_picks_strongest_first():
    inst = gen_linear_model(40, 12, 3, 5.0, 19)
    pool = empty_pool(40, 19)
    res = vd_omp_run(inst.X, inst.y, pool, StoppingRule.active_limit(1))
    c = np.abs(inst.X.T @ inst.y)
    assert res.events[0].index == int(np.argmax(c))


def test_candidate_prefix():
    from vdselect.selectors import PathEvent, PathResult

    events = [
        PathEvent(1, 0, False, 0.0, 1.0, 2),
        PathEvent(2, 30, True, 0.1, 0.9, 3),
        PathEvent(3, 4, False, 0.1, 0.8, 4),
        PathEvent(4, 31, True, 0.1, 0.7, 5),
    ]
    res = PathResult(events=events, dummies_selected=2, realized={})
    assert res.candidate_prefix(1) == [0]
    assert res.candidate_prefix(2) == [0, 4]
    assert res.candidate_prefix(5) == [0, 4]


def test_matrix_columns_provider():
    X = np.arange(12.0).reshape(4, 3)
    prov = MatrixColumns(X)
    assert prov.n == 4 and prov.p == 3
    assert np.array_equal(prov.column(1), X[:, 1])
    v = np.ones(4)
    assert np.allclose(prov.dot_all(v), X.T @ v)
