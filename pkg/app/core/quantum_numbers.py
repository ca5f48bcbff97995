# app/core/quantum_numbers.py
from typing import Iterator

from app.core.errors import PreconditionError
from app.core.models import QuantumNumbers


def energy_from_n(n: int) -> float:
    """E = −1/(2n²), atomic units."""
    if n < 1:
        raise PreconditionError(f"principal quantum number must be >= 1, got {n}")
    return -1.0 / (2.0 * n * n)


def column_size(n: int, m: int) -> int:
    if n < 1 or abs(m) > n - 1:
        raise PreconditionError(f"no column m={m} at n={n}")
    return n - abs(m)


def state_count(n: int) -> int:
    """Σ_m (n − |m|); equals n²."""
    return sum(column_size(n, m) for m in range(-(n - 1), n))


def iter_labels(n: int) -> Iterator[QuantumNumbers]:
    for m in range(-(n - 1), n):
        for k in range(column_size(n, m)):
            yield QuantumNumbers(n=n, m=m, k=k)
