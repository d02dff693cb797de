import numpy as np
import pytest

from discrete_darboux import (
    JacobiOperator,
    Seq,
    build_transform,
    hermite_seed,
    laplacian_model,
    oscillator_model,
    restrict_parity,
    solve_recurrence,
    split_even_odd,
)


def as_seed(s: Seq) -> Seq:
    return Seq(s.values, s.energy, "seed", log_scale=s.log_scale)


def stark_model(N: int, slope: float = 0.5, hopping: float = 1.0) -> JacobiOperator:
    """Linear-diagonal chain; its truncated eigenvectors are exponentially
    localized, which the norm-relation checks need."""
    a = np.full(N, hopping)
    a[0] = 0.0
    return JacobiOperator(a, slope * np.arange(N), label="stark")


@pytest.fixture(scope="session")
def laplacian64():
    op = laplacian_model(64)
    seed = as_seed(solve_recurrence(op, -2.5))
    L, h1 = build_transform(op, seed)
    return op, seed, L, h1


@pytest.fixture(scope="session")
def oscillator_even200():
    op2 = oscillator_model(400)
    even, _odd = split_even_odd(op2)
    seed = restrict_parity(hermite_seed(-1.0, 400), "even")
    L, h1 = build_transform(even, seed)
    return even, seed, L, h1


@pytest.fixture(scope="session")
def stark32():
    op = stark_model(32)
    seed = as_seed(solve_recurrence(op, -2.5))
    L, h1 = build_transform(op, seed)
    return op, seed, L, h1


@pytest.fixture(scope="session")
def big_missing_states():
    """Missing states on an even oscillator chain long enough for the
    n in [2000, 10000] asymptotic fits."""
    from discrete_darboux import missing_states

    M = 10_050
    even, _odd = split_even_odd(oscillator_model(2 * M))
    seed = restrict_parity(hermite_seed(-1.0, 2 * M), "even")
    L, h1 = build_transform(even, seed)
    return missing_states(even, L, eta_hat0_over_eta0=1.0, w0=1.0, transformed=h1)
