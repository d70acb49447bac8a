import numpy as np
import pytest
import scipy.optimize

import plresonance as pl
from conftest import random_admissible
from oracles import dense_first_eigenvalue
from plresonance.eigen import ConvergenceError
from plresonance.mesh import Field, grad_seminorm_p, lp_norm_p

PI2 = np.pi**2


def test_dirichlet_1d_matches_separation_of_variables(dirichlet_eig_256):
    ep = dirichlet_eig_256
    assert ep.lambda1 == pytest.approx(PI2, rel=0.01)
    # eigenfunction proportional to sin(pi x)
    xs = ep.u1.mesh.nodes[:, 0]
    target = np.sin(np.pi * xs)
    target /= np.sqrt(lp_norm_p(Field(ep.u1.mesh, target), 2.0))
    assert np.max(np.abs(ep.u1.values - target)) < 5e-3


def test_dirichlet_matches_dense_generalized_eigensolve():
    mesh = pl.build_interval_mesh(0.0, 1.0, 48)
    ep = pl.compute_first_eigenpair(mesh, 2.0, pl.BCKind.DIRICHLET, seed=2)
    assert ep.lambda1 == pytest.approx(dense_first_eigenvalue(mesh, dirichlet=True), rel=1e-9)


def test_neumann_subspace_1d_first_nonconstant_mode():
    mesh = pl.build_interval_mesh(0.0, 1.0, 256)
    ep = pl.compute_first_eigenpair(mesh, 2.0, pl.BCKind.NEUMANN, seed=2)
    assert ep.lambda1 == pytest.approx(PI2, rel=0.01)
    assert abs(pl.mean_value(ep.u1)) <= 1e-10
    xs = mesh.nodes[:, 0]
    target = np.cos(np.pi * xs)
    target /= np.sqrt(lp_norm_p(Field(mesh, target), 2.0))
    err = min(np.max(np.abs(ep.u1.values - target)), np.max(np.abs(ep.u1.values + target)))
    assert err < 5e-3


def test_neumann_matches_dense_second_eigenvalue():
    mesh = pl.build_interval_mesh(0.0, 1.0, 48)
    ep = pl.compute_first_eigenpair(mesh, 2.0, pl.BCKind.NEUMANN, seed=2)
    assert ep.lambda1 == pytest.approx(dense_first_eigenvalue(mesh, dirichlet=False), rel=1e-9)


def test_dirichlet_2d_unit_square():
    mesh = pl.build_rectangle_mesh((0, 1), (0, 1), 32, 32)
    ep = pl.compute_first_eigenpair(mesh, 2.0, pl.BCKind.DIRICHLET, seed=2)
    assert ep.lambda1 == pytest.approx(2 * PI2, rel=0.02)


def test_dirichlet_2d_matches_dense():
    mesh = pl.build_rectangle_mesh((0, 1), (0, 1), 12, 12)
    ep = pl.compute_first_eigenpair(mesh, 2.0, pl.BCKind.DIRICHLET, seed=2)
    assert ep.lambda1 == pytest.approx(dense_first_eigenvalue(mesh, dirichlet=True), rel=1e-9)


def test_eigenpair_invariants(dirichlet_eig_256):
    ep = dirichlet_eig_256
    assert abs(lp_norm_p(ep.u1, 2.0) - 1.0) <= 1e-10
    assert ep.u1.values.min() >= -1e-8  # sign-definite after normalization
    assert pl.mean_value(ep.u1) > 0
    assert abs(grad_seminorm_p(ep.u1, 2.0) - ep.lambda1) <= 1e-6
    assert ep.iterations >= 1


def test_rayleigh_quotient_attainment_and_homogeneity(dirichlet_eig_256):
    ep = dirichlet_eig_256
    assert pl.rayleigh_quotient(ep.u1, 2.0) == pytest.approx(ep.lambda1, abs=1e-12)
    scaled = Field(ep.u1.mesh, -3.7 * ep.u1.values)
    assert pl.rayleigh_quotient(scaled, 2.0) == pytest.approx(ep.lambda1, rel=1e-12)


def test_rayleigh_quotient_rejects_zero_field():
    mesh = pl.build_interval_mesh(0.0, 1.0, 8)
    with pytest.raises(ValueError):
        pl.rayleigh_quotient(Field.zeros(mesh), 2.0)


def test_infimum_property_on_random_fields():
    mesh = pl.build_interval_mesh(0.0, 1.0, 64)
    ep = pl.compute_first_eigenpair(mesh, 2.0, pl.BCKind.DIRICHLET, seed=2)
    rng = np.random.default_rng(9)
    for _ in range(1000):
        u = random_admissible(mesh, pl.BCKind.DIRICHLET, rng)
        if lp_norm_p(u, 2.0) == 0.0:
            continue
        assert pl.rayleigh_quotient(u, 2.0) >= ep.lambda1 - 1e-8


def test_simplicity_two_seeds_agree():
    mesh = pl.build_interval_mesh(0.0, 1.0, 128)
    a = pl.compute_first_eigenpair(mesh, 2.0, pl.BCKind.DIRICHLET, seed=5)
    b = pl.compute_first_eigenpair(mesh, 2.0, pl.BCKind.DIRICHLET, seed=91)
    va, vb = a.u1.values, b.u1.values
    corr = abs(va @ vb) / np.sqrt((va @ va) * (vb @ vb))
    assert corr > 0.999


def test_mesh_convergence_second_order():
    errs = {}
    for n in (64, 128):
        mesh = pl.build_interval_mesh(0.0, 1.0, n)
        ep = pl.compute_first_eigenpair(mesh, 2.0, pl.BCKind.DIRICHLET, seed=2)
        errs[n] = abs(ep.lambda1 - PI2)
    assert errs[64] / errs[128] >= 3.0


def test_p3_against_direct_minimization_oracle():
    # independent route: BFGS on the Rayleigh quotient over interior values
    mesh = pl.build_interval_mesh(0.0, 1.0, 32)
    p = 3.0
    ep = pl.compute_first_eigenpair(mesh, p, pl.BCKind.DIRICHLET, seed=2)

    idx = mesh.interior_nodes

    def quotient(v):
        full = np.zeros(mesh.node_count)
        full[idx] = v
        f = Field(mesh, full)
        return grad_seminorm_p(f, p) / lp_norm_p(f, p)

    x0 = np.sin(np.pi * mesh.nodes[idx, 0]) * 1.1
    res = scipy.optimize.minimize(quotient, x0, method="BFGS", options={"maxiter": 2000, "gtol": 1e-10})
    assert ep.lambda1 == pytest.approx(res.fun, rel=1e-5)
    assert ep.lambda1 <= res.fun + 1e-8  # solver attains the lower value


def test_rejects_p_below_two():
    mesh = pl.build_interval_mesh(0.0, 1.0, 8)
    with pytest.raises(ValueError):
        pl.compute_first_eigenpair(mesh, 1.5, pl.BCKind.DIRICHLET)


def test_nonconvergence_raises_with_diagnostics():
    mesh = pl.build_interval_mesh(0.0, 1.0, 64)
    with pytest.raises(ConvergenceError) as err:
        pl.compute_first_eigenpair(mesh, 2.0, pl.BCKind.DIRICHLET, seed=2, tol=1e-16, max_iter=2)
    diag = err.value.diagnostics
    assert diag["iterations"] == 2
    assert diag["lambda_estimate"] > 0
