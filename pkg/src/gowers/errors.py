"""Error taxonomy shared by the library and the command line tool.

ContractError marks violated preconditions (bad prime, mismatched ambient
groups, non-unit-modulus input where phases are required, non-cocycle input
to operations that need one).  CapacityError marks computations whose exact
cost would exceed the configured budget; the work is refused before it
starts, never truncated silently.
"""

from __future__ import annotations

import os

#: default budget: number of scalar terms an exhaustive computation may touch.
DEFAULT_BUDGET = 10 ** 8

#: environment variable overriding the budget for library *and* CLI entry points.
BUDGET_ENV_VAR = "GOWERS_BUDGET"


class GowersError(Exception):
    """Base class for all library errors."""


class ContractError(GowersError, ValueError):
    """A documented precondition was violated by the caller."""

    exit_code = 2


class CapacityError(GowersError, RuntimeError):
    """The exact computation would exceed the configured budget."""

    exit_code = 3


def resolve_budget(budget: int | None = None) -> int:
    """Return the effective term budget: explicit arg > env var > default."""
    if budget is not None:
        if budget <= 0:
            raise ContractError("budget must be positive, got %r" % budget)
        return int(budget)
    env = os.environ.get(BUDGET_ENV_VAR)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ContractError("%s must be an integer, got %r" % (BUDGET_ENV_VAR, env))
        if value <= 0:
            raise ContractError("%s must be positive, got %r" % (BUDGET_ENV_VAR, env))
        return value
    return DEFAULT_BUDGET


def check_budget(terms: int, budget: int | None = None, what: str = "computation") -> None:
    """Raise CapacityError if an exhaustive computation of `terms` terms is too big."""
    limit = resolve_budget(budget)
    if terms > limit:
        raise CapacityError(
            "%s needs %d terms, budget is %d (raise it via budget= or %s)"
            % (what, terms, limit, BUDGET_ENV_VAR)
        )
