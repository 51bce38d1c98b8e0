import numpy as np
import pytest

from adsorb.model import (
    PhysicalParameters,
    ReactionOrders,
    nondimensionalize,
)
from adsorb.pde import SpatialGrid, mass_balance_residual, solve_pde


def column_physical(m: int = 1, n: int = 1) -> PhysicalParameters:
    """Reference column parameter set used throughout the tests."""
    return PhysicalParameters(
        epsilon=0.3357, u_in=0.13, k_ad=1.13, k_de=2.173e-4, c_in=2.835,
        q_max=0.358, rho_b=377.25, column_length=5.4e-3,
        orders=ReactionOrders(m, n),
    )


@pytest.fixture(scope="session")
def eq_column_params():
    """Reference column nondimensionalized at Pe = 0.1 (physisorption)."""
    return nondimensionalize(column_physical(), pe=0.1)


@pytest.fixture(scope="session")
def front_speed_run(eq_column_params):
    """Shared production run: front inside the column for the whole horizon.

    Returns (solution, elapsed_seconds); several tests and the acceptance gate
    reuse it, so it is computed once per session.
    """
    import time

    grid = SpatialGrid(ell=eq_column_params.ell, n_cells=400)
    t0 = time.perf_counter()
    sol = solve_pde(eq_column_params, grid, t_end=16.0,
                    sample_times=np.linspace(0.0, 16.0, 81))
    return sol, time.perf_counter() - t0


@pytest.fixture(scope="session")
def refinement_residuals(eq_column_params):
    """Maximal mass-balance residuals on a grid pair with halved spacing."""
    out = {}
    for n_cells in (400, 800):
        grid = SpatialGrid(ell=eq_column_params.ell, n_cells=n_cells)
        sol = solve_pde(eq_column_params, grid, t_end=6.0,
                        sample_times=np.linspace(0.0, 6.0, 31))
        out[n_cells] = float(mass_balance_residual(sol).max())
    return out
