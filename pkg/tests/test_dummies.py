import numpy as np
import pytest

from vdselect.ambient import AmbientSpace, OrthonormalBasis, center_project
from vdselect.dummies import DummyLaw, DummyPool, full_stick_break, stick_break_batch
from vdselect.errors import (
    AlreadyRealized,
    BasisExhausted,
    DimensionMismatch,
    OutOfOrder,
    ShadowShapeMismatch,
)


def grow_basis(space, rng, k):
    basis = OrthonormalBasis(space)
    for _ in range(k):
        basis.extend(center_project(rng.standard_normal(space.n), space))
    return basis


def serve_pool(pool, basis):
    for i in range(basis.k):
        pool.fresh_projections(basis.direction(i), i + 1)


def test_fresh_projection_order_enforced(rng, small_space):
    basis = grow_basis(small_space, rng, 2)
    pool = DummyPool(5, DummyLaw.SPHERICAL, small_space, 0)
    with pytest.raises(OutOfOrder):
        pool.fresh_projections(basis.direction(0), 2)


def test_spherical_radii_shrink(rng, small_space):
    basis = grow_basis(small_space, rng, 4)
    pool = DummyPool(20, DummyLaw.SPHERICAL, small_space, 1)
    prev = pool.r2.copy()
    for i in range(4):
        pool.fresh_projections(basis.direction(i), i + 1)
        assert np.all(pool.r2 <= prev + 1e-15)
        assert np.all(pool.r2 >= 0)
        prev = pool.r2.copy()


def test_spherical_realized_unit_norm(rng, small_space):
    basis = grow_basis(small_space, rng, 3)
    pool = DummyPool(10, DummyLaw.SPHERICAL, small_space, 2)
    serve_pool(pool, basis)
    d = pool.realize(4, basis)
    assert abs(np.linalg.norm(d) - 1.0) < 1e-10
    assert abs(d.sum()) < 1e-8
    # revealed projections are honored exactly
    assert np.allclose(basis.coeffs(d), pool.table[:, 4], atol=1e-10)


def test_realize_twice_rejected(rng, small_space):
    basis = grow_basis(small_space, rng, 2)
    pool = DummyPool(4, DummyLaw.SPHERICAL, small_space, 3)
    serve_pool(pool, basis)
    pool.realize(0, basis)
    with pytest.raises(AlreadyRealized):
        pool.realize(0, basis)


def test_realized_dummy_leaves_pool(rng, small_space):
    basis = grow_basis(small_space, rng, 2)
    pool = DummyPool(4, DummyLaw.SPHERICAL, small_space, 4)
    serve_pool(pool, basis)
    pool.realize(1, basis)
    idx, _ = pool.scores(np.zeros(2))
    assert 1 not in idx
    assert pool.tau[1] == 2


def test_full_reveal_exhausts_basis(rng):
    space = AmbientSpace(5)
    basis = grow_basis(space, rng, space.m)
    pool = DummyPool(6, DummyLaw.SPHERICAL, space, 5)
    serve_pool(pool, basis)
    assert np.abs(pool.r2).max() < 1e-12
    # fully revealed spherical dummies have unit-norm projection rows
    norms = np.linalg.norm(pool.table, axis=0)
    assert np.abs(norms - 1.0).max() < 1e-10
    d = pool.realize(0, basis)
    assert abs(np.linalg.norm(d) - 1.0) < 1e-10
    with pytest.raises(BasisExhausted):
        pool.fresh_projections(basis.direction(0), space.m + 1)


def test_gaussian_laws_scale(rng, small_space):
    basis = grow_basis(small_space, rng, 1)
    space = AmbientSpace(small_space.n)
    proj = DummyPool(20000, DummyLaw.GAUSSIAN_UNIT_PROJ, space, 6)
    nrm = DummyPool(20000, DummyLaw.GAUSSIAN_UNIT_NORM, space, 6)
    v1 = proj.fresh_projections(basis.direction(0), 1)
    v2 = nrm.fresh_projections(basis.direction(0), 1)
    assert abs(np.var(v1) - 1.0) < 0.05
    assert abs(np.var(v2) - 1.0 / space.m) < 0.05 / space.m * 3


def test_scores_match_realized_inner_products(rng, small_space):
    basis = grow_basis(small_space, rng, 3)
    pool = DummyPool(8, DummyLaw.SPHERICAL, small_space, 7)
    serve_pool(pool, basis)
    s = basis.matrix @ rng.standard_normal(3)
    idx, vals = pool.scores(basis.coeffs(s))
    d = pool.realize(int(idx[2]), basis)
    assert abs(d @ s - vals[2]) < 1e-10


def test_scores_shape_check(small_space, rng):
    basis = grow_basis(small_space, rng, 2)
    pool = DummyPool(3, DummyLaw.SPHERICAL, small_space, 8)
    serve_pool(pool, basis)
    with pytest.raises(DimensionMismatch):
        pool.scores(np.zeros(3))


def test_shadow_exact_projections(rng, small_space):
    n, L = small_space.n, 6
    D = rng.standard_normal((n, L))
    D -= D.mean(axis=0)
    D /= np.linalg.norm(D, axis=0)
    basis = grow_basis(small_space, rng, 3)
    pool = DummyPool(L, DummyLaw.SPHERICAL, small_space, 9, shadow=D)
    serve_pool(pool, basis)
    assert np.allclose(pool.table, basis.matrix.T @ D, atol=1e-12)
    d = pool.realize(2, basis)
    assert np.array_equal(d, D[:, 2])


def test_shadow_shape_check(small_space):
    with pytest.raises(ShadowShapeMismatch):
        DummyPool(4, DummyLaw.SPHERICAL, small_space, 0, shadow=np.zeros((3, 4)))


def test_pool_determinism(small_space, rng):
    basis = grow_basis(small_space, rng, 3)
    rows = []
    for _ in range(2):
        pool = DummyPool(10, DummyLaw.SPHERICAL, small_space, 42)
        serve_pool(pool, basis)
        rows.append(pool.table.copy())
    assert np.array_equal(rows[0], rows[1])


def test_stick_break_batch_norm_and_marginal():
    draws = stick_break_batch(30, 4000, seed=11)
    assert draws.shape == (4000, 30)
    assert np.abs((draws**2).sum(axis=1) - 1.0).max() < 1e-12
    # first squared coordinate ~ Beta(1/2, (m-1)/2), mean 1/m
    assert abs((draws[:, 0] ** 2).mean() - 1.0 / 30) < 0.005
    # signs roughly balanced
    assert abs((draws > 0).mean() - 0.5) < 0.02


def test_full_stick_break_requires_full_basis(rng):
    space = AmbientSpace(6)
    basis = grow_basis(space, rng, 3)
    with pytest.raises(ValueError):
        full_stick_break(space, basis, 0)
    while basis.k < space.m:
        basis.extend(center_project(rng.standard_normal(6), space))
    alpha = full_stick_break(space, basis, 0)
    assert alpha.shape == (space.m,)
    assert abs((alpha**2).sum() - 1.0) < 1e-12


def test_state_bytes_tracks_growth(rng, small_space):
    basis = grow_basis(small_space, rng, 3)
    pool = DummyPool(50, DummyLaw.SPHERICAL, small_space, 12)
    before = pool.state_bytes()
    serve_pool(pool, basis)
    after = pool.state_bytes()
    assert after - before == 3 * 50 * 8
