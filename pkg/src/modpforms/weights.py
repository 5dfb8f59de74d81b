"""Weight bookkeeping for the contraction of U: k -> k'."""
from __future__ import annotations

from dataclasses import dataclass

from .fp_linalg import check_modulus


@dataclass(frozen=True)
class WeightTarget:
    p: int
    k: int
    k0: int
    k_prime: int
    serre_bound: int


def residue_weight(k: int, p: int) -> int:
    """The unique k0 in [2, p+1] with k0 = k mod p."""
    return (k - 2) % p + 2


def target_weight(k: int, p: int) -> WeightTarget:
    check_modulus(p)
    if k < 2:
        raise ValueError(f"weight must be >= 2, got {k}")
    k0 = residue_weight(k, p)
    k_prime = (k - k0) // p + k0
    return WeightTarget(p, k, k0, k_prime, (k + p * p - 1) // p)


def serre_contraction_bound(k: int, p: int) -> int:
    """Largest k'' with p k'' <= k + p^2 - 1 (Serre's older contraction bound)."""
    check_modulus(p)
    if k < p + 2:
        raise ValueError(f"Serre's bound applies for k >= p+2 = {p + 2}, got {k}")
    return (k + p * p - 1) // p
