"""Independent brute-force oracles the library tests check against.

Everything here is deliberately naive: different algorithms, different data
representations, no shared code with the package under test.
"""

from __future__ import annotations

import numpy as np


def partitions_by_sieve(k: int) -> set[tuple[int, ...]]:
    """All partitions of k found by filtering compositions, as a set."""
    found: set[tuple[int, ...]] = set()

    def grow(remaining: int, prefix: tuple[int, ...]) -> None:
        if remaining == 0:
            found.add(tuple(sorted(prefix, reverse=True)))
            return
        for first in range(1, remaining + 1):
            grow(remaining - first, prefix + (first,))

    grow(k, ())
    return found


def standard_tableaux_count(shape: tuple[int, ...]) -> int:
    """Count standard fillings by explicit backtracking over cells."""
    cells = [(i, j) for i, row_len in enumerate(shape) for j in range(row_len)]
    n = len(cells)
    filling: dict[tuple[int, int], int] = {}

    def admissible(cell: tuple[int, int], value: int) -> bool:
        i, j = cell
        if j > 0 and (i, j - 1) not in filling:
            return False
        if i > 0 and (i - 1, j) not in filling:
            return False
        return True

    count = 0

    def place(value: int) -> None:
        nonlocal count
        if value > n:
            count += 1
            return
        for cell in cells:
            if cell in filling or not admissible(cell, value):
                continue
            filling[cell] = value
            place(value + 1)
            del filling[cell]

    place(1)
    return count


def semistandard_tableaux_count(shape: tuple[int, ...], d: int) -> int:
    """Count semistandard fillings with entries 1..d by backtracking."""
    rows = len(shape)

    def fill(i: int, j: int, tableau: list[list[int]]) -> int:
        if i == rows:
            return 1
        if j == shape[i]:
            return fill(i + 1, 0, tableau)
        lo = 1
        if j > 0:
            lo = max(lo, tableau[i][j - 1])
        if i > 0:
            lo = max(lo, tableau[i - 1][j] + 1)
        total = 0
        for value in range(lo, d + 1):
            tableau[i].append(value)
            total += fill(i, j + 1, tableau)
            tableau[i].pop()
        return total

    return fill(0, 0, [[] for _ in range(rows)])


def dense_permutation_matrix(images: tuple[int, ...], d: int) -> np.ndarray:
    """Explicit loop construction of the factor-permutation matrix."""
    n = len(images)
    dims = (d,) * n
    total = d**n
    inverse = [0] * n
    for i, image in enumerate(images):
        inverse[image] = i
    mat = np.zeros((total, total), dtype=complex)
    for col in range(total):
        digits = np.unravel_index(col, dims)
        permuted = tuple(digits[inverse[i]] for i in range(n))
        row = int(np.ravel_multi_index(permuted, dims))
        mat[row, col] = 1.0
    return mat


def sign_of_permutation(images: tuple[int, ...]) -> int:
    seen = [False] * len(images)
    sign = 1
    for start in range(len(images)):
        if seen[start]:
            continue
        length, j = 0, start
        while not seen[j]:
            seen[j] = True
            j = images[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign
