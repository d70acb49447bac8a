import numpy as np
import pytest

import plresonance as pl
from plresonance.functional import ProblemSpec

# canonical log-rational test nonlinearity: F' = f, small-u ratio -> -2,
# Landesman-Lazer ratio against ln -> 4
BENCH_f = "2*u/(1+u^2) - 4*u/(1+u^2)^2"
BENCH_F = "ln(1+u^2) - 2*u^2/(1+u^2)"

LOG_RATIONAL_f = "1/(u+1)"
LOG_RATIONAL_F = "ln(u+1)"


def parse_u(text):
    return pl.parse(text, {"x", "u"})


def parse_x(text):
    return pl.parse(text, {"x"})


def bench_config_text(n=128, seed=7, tol=1e-6):
    return f"""
[domain]
dimension = 1
xmin = 0
xmax = 1
n = {n}

[problem]
p = 2
bc = dirichlet
f = "{BENCH_f}"
F = "{BENCH_F}"

[hypotheses]
theta = "-2"
mu = "4"
h = "ln(t)"
a = "3"
c1 = 0

[solver]
tol = {tol}
max_iter = 20000
path_nodes = 21
rho_grid = 0.05,0.1,0.2,0.5,1.0
a_max = 1000
seed = {seed}
"""


def make_bench_spec(n=128, p=2.0, bc=pl.BCKind.DIRICHLET, seed=1):
    mesh = pl.build_interval_mesh(0.0, 1.0, n)
    ep = pl.compute_first_eigenpair(mesh, p, bc, seed=seed)
    kwargs = {}
    if bc is pl.BCKind.NEUMANN:
        kwargs = {
            "g_expr": parse_u("0"),
            "G_expr": parse_u("0"),
            "h_boundary_expr": parse_x("0"),
        }
    spec = ProblemSpec(
        mesh,
        p,
        bc,
        f_expr=parse_u(BENCH_f),
        F_expr=parse_u(BENCH_F),
        theta_expr=parse_x("-2"),
        mu_expr=parse_x("4"),
        h_expr=pl.parse("ln(t)", {"t"}),
        lambda1=ep.lambda1,
        **kwargs,
    )
    return spec, ep


@pytest.fixture(scope="session")
def bench_128():
    return make_bench_spec(n=128)


@pytest.fixture(scope="session")
def bench_64():
    return make_bench_spec(n=64)


@pytest.fixture(scope="session")
def neumann_bench_64():
    return make_bench_spec(n=64, bc=pl.BCKind.NEUMANN)


@pytest.fixture(scope="session")
def dirichlet_eig_256():
    mesh = pl.build_interval_mesh(0.0, 1.0, 256)
    return pl.compute_first_eigenpair(mesh, 2.0, pl.BCKind.DIRICHLET, seed=1)


def random_admissible(mesh, bc, rng, scale=1.0):
    v = rng.uniform(-scale, scale, mesh.node_count)
    if bc is pl.BCKind.DIRICHLET:
        v[mesh.boundary_nodes] = 0.0
    else:
        v -= pl.mean_value(pl.Field(mesh, v))
    return pl.Field(mesh, v)
