"""Exact integer evaluation of golden-ratio floor expressions.

With phi = (1+sqrt(5))/2, the floor of n*phi equals (n + isqrt(5*n^2)) // 2,
so every quantity here is computed in arbitrary-precision integer arithmetic;
no floating point enters any value.  The derived floors use the identities
n*phi - n = n/phi and n*phi + n = n*phi^2.
"""

from __future__ import annotations

from math import isqrt

from .errors import ContractError


def floor_phi(n: int) -> int:
    """floor(n * phi)."""
    if n < 0:
        raise ContractError(f"negative argument {n}")
    return (n + isqrt(5 * n * n)) // 2


def floor_div_phi(n: int) -> int:
    """floor(n / phi), via n/phi = n*phi - n."""
    return floor_phi(n) - n


def floor_phi2(n: int) -> int:
    """floor(n * phi^2), via n*phi^2 = n*phi + n."""
    return floor_phi(n) + n


def floor_phi_table(limit: int) -> list[int]:
    """[floor(n*phi) for n in range(limit)]; handy for vectorized oracles."""
    return [(n + isqrt(5 * n * n)) // 2 for n in range(limit)]
