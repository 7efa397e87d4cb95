"""Symmetric-group representation numerics on qudit tensor spaces.

Partitions are tuples of weakly decreasing positive integers; the empty
tuple is the (trivial) partition of 0, needed as the removed-box companion
of the single-box frame.  Young frames, tableau counts, irreducible
characters, the character-weighted group projectors and the projectors of
the partially transposed permutation algebra all live here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations as _sn_iter

import numpy as np

from .tensor import (
    GROUP_BUDGET,
    Operator,
    Permutation,
    StateVector,
    check_capacity,
    check_group_budget,
    max_entangled_state,
    permutation_index_map,
)

Partition = tuple[int, ...]


def check_partition(mu: Partition) -> None:
    if any(p < 1 for p in mu):
        raise ValueError(f"partition parts must be positive: {mu}")
    if any(mu[i] < mu[i + 1] for i in range(len(mu) - 1)):
        raise ValueError(f"partition parts must be weakly decreasing: {mu}")


def partitions(k: int) -> list[Partition]:
    """All partitions of k, in lexicographically decreasing order."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out: list[Partition] = []

    def rec(remaining: int, max_part: int, prefix: list[int]) -> None:
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for part in range(min(max_part, remaining), 0, -1):
            prefix.append(part)
            rec(remaining - part, part, prefix)
            prefix.pop()

    rec(k, k, [])
    return out


def height(mu: Partition) -> int:
    return len(mu)


def sym_partition(k: int) -> Partition:
    """The one-row frame with k boxes; the empty frame for k = 0."""
    return (k,) if k > 0 else ()


def conjugate(mu: Partition) -> Partition:
    if not mu:
        return ()
    return tuple(sum(1 for p in mu if p > j) for j in range(mu[0]))


def removable_boxes(mu: Partition) -> list[Partition]:
    """All frames obtained from mu by removing a single box."""
    check_partition(mu)
    out = []
    for i in range(len(mu)):
        if i == len(mu) - 1 or mu[i] > mu[i + 1]:
            smaller = list(mu)
            smaller[i] -= 1
            out.append(tuple(p for p in smaller if p > 0))
    return out


def _hook_lengths(mu: Partition) -> list[int]:
    co = conjugate(mu)
    return [mu[i] - j + co[j] - i - 1 for i in range(len(mu)) for j in range(mu[i])]


def dim_standard(mu: Partition) -> int:
    """Number of standard Young tableaux (hook-length formula)."""
    check_partition(mu)
    if not mu:
        return 1
    return math.factorial(sum(mu)) // math.prod(_hook_lengths(mu))


def mult_semistandard(mu: Partition, d: int) -> int:
    """Number of semistandard tableaux with entries in 1..d (hook content).

    Zero whenever the frame is taller than d.
    """
    check_partition(mu)
    if d < 1:
        raise ValueError("d must be at least 1")
    if not mu:
        return 1
    if len(mu) > d:
        return 0
    numerator = math.prod(d + j - i for i in range(len(mu)) for j in range(mu[i]))
    denominator = math.prod(_hook_lengths(mu))
    quotient, rem = divmod(numerator, denominator)
    assert rem == 0
    return quotient


@dataclass(frozen=True)
class IrrepData:
    """Tableau counts attached to one frame at a fixed local dimension."""

    partition: Partition
    d_mu: int
    m_mu: int


def irrep_data(mu: Partition, d: int) -> IrrepData:
    return IrrepData(mu, dim_standard(mu), mult_semistandard(mu, d))


def _beta_to_partition(beta: tuple[int, ...]) -> Partition:
    rows = len(beta)
    parts = tuple(b - (rows - 1 - i) for i, b in enumerate(beta))
    return tuple(p for p in parts if p > 0)


@lru_cache(maxsize=None)
def _character_of_class(mu: Partition, cycles: tuple[int, ...]) -> int:
    # Murnaghan-Nakayama recursion over first-column hook lengths: removing
    # a border strip of length t replaces one beta number b with b - t; the
    # sign is (-1)^(number of beta numbers jumped over).
    if not cycles:
        return 1
    t, rest = cycles[0], cycles[1:]
    rows = len(mu)
    beta = [mu[i] + (rows - 1 - i) for i in range(rows)]
    beta_set = set(beta)
    total = 0
    for i, b in enumerate(beta):
        nb = b - t
        if nb < 0 or nb in beta_set:
            continue
        strip_height = sum(1 for c in beta if nb < c < b)
        new_beta = tuple(sorted([c for j, c in enumerate(beta) if j != i] + [nb], reverse=True))
        total += (-1) ** strip_height * _character_of_class(_beta_to_partition(new_beta), rest)
    return total


def character(mu: Partition, sigma: Permutation) -> int:
    """Irreducible character of the frame mu at the permutation sigma.

    Depends only on the cycle type; values are exact integers.
    """
    check_partition(mu)
    if sum(mu) != sigma.n:
        raise ValueError(f"frame of {sum(mu)} boxes vs permutation on {sigma.n} letters")
    return _character_of_class(mu, sigma.cycle_type())


def _cycle_type_of_images(images: tuple[int, ...]) -> tuple[int, ...]:
    n = len(images)
    seen = [False] * n
    lengths = []
    for start in range(n):
        if seen[start]:
            continue
        length, j = 0, start
        while not seen[j]:
            seen[j] = True
            j = images[j]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def _group_sum(n: int, d: int, weight_of_class, budget: int) -> np.ndarray:
    """Sum of weight(class(sigma)) * V_sigma over S_n, assembled by remapping."""
    check_group_budget(n, budget)
    dims = (d,) * n
    total = math.prod(dims)
    check_capacity(total)
    acc = np.zeros((total, total), dtype=complex)
    cols = np.arange(total)
    multi = np.array(np.unravel_index(cols, dims))
    weights: dict[tuple[int, ...], complex] = {}
    for images in _sn_iter(range(n)):
        ct = _cycle_type_of_images(images)
        w = weights.get(ct)
        if w is None:
            w = weights[ct] = weight_of_class(ct)
        if w == 0:
            continue
        inv = [0] * n
        for i, im in enumerate(images):
            inv[im] = i
        rows = np.ravel_multi_index(tuple(multi[np.array(inv)]), dims)
        acc[rows, cols] += w
    return acc


@lru_cache(maxsize=None)
def young_projector(mu: Partition, d: int, budget: int = GROUP_BUDGET) -> Operator:
    """Character-weighted group average projecting on the mu-isotypic part.

    P_mu = (d_mu / k!) sum_sigma chi_mu(sigma^{-1}) V_sigma on (C^d)^(x k);
    sigma and its inverse share a cycle type, so the class character is used
    directly.  Satisfies P_mu P_nu = delta P_mu and tr P_mu = m_mu d_mu.
    """
    check_partition(mu)
    k = sum(mu)
    if k < 1:
        raise ValueError("young_projector needs a non-empty frame")
    mat = _group_sum(k, d, lambda ct: _character_of_class(mu, ct), budget)
    mat *= dim_standard(mu) / math.factorial(k)
    return Operator(mat, (d,) * k)


@lru_cache(maxsize=None)
def sym_projector(n: int, d: int, budget: int = GROUP_BUDGET) -> Operator:
    """Uniform group average (1/n!) sum_sigma V_sigma on (C^d)^(x n)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    mat = _group_sum(n, d, lambda ct: 1.0, budget)
    return Operator(mat / math.factorial(n), (d,) * n)


@lru_cache(maxsize=None)
def sym_basis(n: int, d: int) -> tuple[StateVector, ...]:
    """Orthonormal occupation-number basis of the symmetric subspace.

    Each vector is the uniform superposition of all basis kets sharing one
    occupation vector (how many factors sit at each level); ordering is
    lexicographically decreasing in the occupation vector.  For n = 0 the
    basis is the single scalar state on the empty layout.
    """
    if n < 0 or d < 1:
        raise ValueError("need n >= 0 and d >= 1")
    if n == 0:
        return (StateVector(np.ones(1, dtype=complex), ()),)
    total = d**n
    check_capacity(total)
    multi = np.array(np.unravel_index(np.arange(total), (d,) * n))
    by_occupation: dict[tuple[int, ...], list[int]] = {}
    for j in range(total):
        occ = tuple(int(np.count_nonzero(multi[:, j] == level)) for level in range(d))
        by_occupation.setdefault(occ, []).append(j)
    basis = []
    for occ in sorted(by_occupation, reverse=True):
        members = by_occupation[occ]
        v = np.zeros(total, dtype=complex)
        v[members] = 1.0 / math.sqrt(len(members))
        basis.append(StateVector(v, (d,) * n))
    return tuple(basis)


def f_projector(mu: Partition, alpha: Partition, d: int, budget: int = GROUP_BUDGET) -> Operator:
    """Projector of the partially transposed permutation algebra.

    With k = |mu| and alpha = mu minus one box, acting on (C^d)^(x (k+1))
    whose last factor is the transposed one:

        F_mu(alpha) = (1/gamma) P_mu [ sum_a V_(a,k) (P_alpha (x) d P+) V_(a,k) ] P_mu,
        gamma = k m_mu d_alpha / (m_alpha d_mu),

    where P_alpha sits on the k-1 factors other than a and d P+ couples
    factor a with the last factor.  Projector; tr F_mu(alpha) = m_alpha d_mu.
    """
    check_partition(mu)
    check_partition(alpha)
    k = sum(mu)
    if sum(alpha) != k - 1 or alpha not in removable_boxes(mu):
        raise ValueError(f"{alpha} is not {mu} minus one box")
    m_mu, d_mu = mult_semistandard(mu, d), dim_standard(mu)
    m_alpha, d_alpha = mult_semistandard(alpha, d), dim_standard(alpha)
    if m_mu == 0 or m_alpha == 0:
        raise ValueError(f"frame taller than d={d}: multiplicity vanishes")
    gamma = k * m_mu * d_alpha / (m_alpha * d_mu)

    dims = (d,) * (k + 1)
    total = math.prod(dims)
    check_capacity(total)
    # The middle factor P_alpha (x) d P+ equals B B^dagger with B of rank
    # d^(k-1), so the sandwich is assembled from k thin products instead of
    # two full dim^3 multiplications.
    entangled_column = math.sqrt(d) * max_entangled_state(d).vec.reshape(-1, 1)
    if k == 1:
        thin = entangled_column
    else:
        thin = np.kron(young_projector(alpha, d, budget).mat, entangled_column)
    big = np.kron(young_projector(mu, d, budget).mat, np.eye(d))
    out = np.zeros((total, total), dtype=complex)
    for a in range(k):
        swap = Permutation.transposition(k + 1, a, k - 1)
        f = permutation_index_map(swap, dims)
        # f is an involution (swap is self-inverse), so B[f] applies V_swap.
        column = big @ thin[f, :]
        out += column @ column.conj().T
    return Operator(out / gamma, dims)
