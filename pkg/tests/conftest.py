"""Shared fixtures and instance generators for the test suite."""

import numpy as np
import pytest

from blotto import Allocation, GameInstance

# Same distribution the CLI `gen` subcommand uses, so property tests and
# generated corpora exercise identical input ranges.
VALUE_LOW = 0.1
VALUE_HIGH = 10.0


def random_instance(rng: np.random.Generator, n: int) -> GameInstance:
    """One random instance with budgets and values drawn U[0.1, 10]."""
    return GameInstance(
        budget_a=float(rng.uniform(VALUE_LOW, VALUE_HIGH)),
        budget_b=float(rng.uniform(VALUE_LOW, VALUE_HIGH)),
        values_a=rng.uniform(VALUE_LOW, VALUE_HIGH, n),
        values_b=rng.uniform(VALUE_LOW, VALUE_HIGH, n),
    )


def random_positive_allocation(
    rng: np.random.Generator, n: int, budget: float
) -> Allocation:
    """Strictly positive point on the budget simplex."""
    weights = rng.uniform(0.05, 1.0, n)
    return Allocation(weights / weights.sum() * budget, budget)


def worked_example_instance(r: float) -> GameInstance:
    """The two-battlefield worked example: v_a=(1,5), v_b=(1,0.5), x_b=1."""
    return GameInstance(
        budget_a=r,
        budget_b=1.0,
        values_a=np.array([1.0, 5.0]),
        values_b=np.array([1.0, 0.5]),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
