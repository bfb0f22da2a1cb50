"""Brute-force Fock-space reference results and categorical sampling.

Everything here is built straight from the output-state basis expansion,
with its own permutation-sum permanent, and deliberately shares no code
with the characteristic-function engine so the two can check each other.
Costs are factorial or exponential; the guards keep inputs tiny.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .partitions import BinnedDistribution, Partition

_BASIS_CUTOFF = 1e-12


def _permanent_by_enumeration(matrix: np.ndarray) -> complex:
    n = matrix.shape[0]
    total = 0.0 + 0.0j
    for sigma in itertools.permutations(range(n)):
        prod = 1.0 + 0.0j
        for i in range(n):
            prod *= matrix[i, sigma[i]]
        total += prod
    return total


def fock_binned_distribution(unitary: np.ndarray, internal_states,
                             partition: Partition) -> BinnedDistribution:
    """Binned distribution by expanding the full output Fock state.

    Photon j enters mode j carrying internal state internal_states[j].
    The states are expanded in an orthonormal basis (SVD, directions with
    singular value below 1e-12 dropped), the product of output creation
    operators is multiplied out term by term, and amplitudes are collected
    per occupation multiset over (mode, basis-state) labels.  Limited to
    n <= 3 photons.
    """
    u = np.asarray(unitary, dtype=np.complex128)
    states = np.asarray(internal_states, dtype=np.complex128)
    if states.ndim != 2:
        raise ValueError("internal_states must be an (n, dim) array")
    n = states.shape[0]
    if n < 1 or n > 3:
        raise ValueError("the Fock oracle handles 1 to 3 photons")
    m = u.shape[0]
    if u.ndim != 2 or u.shape[1] != m:
        raise ValueError("unitary must be square")
    if m < n:
        raise ValueError("need at least as many modes as photons")
    if partition.total_modes != m:
        raise ValueError("partition total_modes must match the unitary dimension")

    basis, sing, _ = np.linalg.svd(states.T, full_matrices=False)
    keep = sing > _BASIS_CUTOFF
    basis = basis[:, keep]
    coeff = basis.conj().T @ states.T  # coeff[a, j] = <basis_a | phi_j>
    q = coeff.shape[0]

    amplitudes: dict[tuple, complex] = {}
    labels = list(itertools.product(range(m), range(q)))
    for assignment in itertools.product(labels, repeat=n):
        amp = 1.0 + 0.0j
        for j, (mode, a) in enumerate(assignment):
            amp *= u[mode, j] * coeff[a, j]
        if amp == 0:
            continue
        key = tuple(sorted(assignment))
        amplitudes[key] = amplitudes.get(key, 0.0 + 0.0j) + amp

    probs = np.zeros((n + 1,) * partition.bin_count)
    for key, amp in amplitudes.items():
        weight = abs(amp) ** 2
        for _, group in itertools.groupby(key):
            weight *= math.factorial(len(list(group)))
        counts = [0] * partition.bin_count
        for mode, _ in key:
            for z, subset in enumerate(partition.subsets):
                if mode + 1 in subset:
                    counts[z] += 1
                    break
        probs[tuple(counts)] += weight
    return BinnedDistribution(n, probs, partition.subsets, {"kind": "fock"})


def _outcome_matrix(unitary: np.ndarray, outcome) -> tuple[np.ndarray, int]:
    u = np.asarray(unitary, dtype=np.complex128)
    s = [int(x) for x in outcome]
    if len(s) != u.shape[0]:
        raise ValueError("outcome length must match the unitary dimension")
    if any(x < 0 for x in s):
        raise ValueError("outcome occupations must be nonnegative")
    n = sum(s)
    if n < 1 or n > 8:
        raise ValueError("outcome probabilities handle 1 to 8 photons")
    rows = [mode for mode, r in enumerate(s) for _ in range(r)]
    mu = 1
    for r in s:
        mu *= math.factorial(r)
    return u[np.ix_(rows, range(n))], mu


def ideal_outcome_probability(unitary: np.ndarray, outcome) -> float:
    """P(s) = |perm(U[d(s), 1..n])|^2 / mu(s) for indistinguishable photons.

    Photons occupy input modes 1..n (the first n columns); the matrix
    repeats output rows according to the occupations s.
    """
    mat, mu = _outcome_matrix(unitary, outcome)
    return abs(_permanent_by_enumeration(mat)) ** 2 / mu


def distinguishable_outcome_probability(unitary: np.ndarray, outcome) -> float:
    """Classical counterpart: permanent of squared magnitudes over mu(s)."""
    mat, mu = _outcome_matrix(unitary, outcome)
    value = _permanent_by_enumeration(np.abs(mat) ** 2)
    return float(value.real) / mu


def sample_binned(dist: BinnedDistribution, count: int, seed) -> np.ndarray:
    """Draw i.i.d. bin-count vectors; returns an int array of shape (count, K)."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    flat = dist.probabilities.ravel()
    rng = np.random.default_rng(seed)
    idx = rng.choice(flat.size, size=count, p=flat)
    coords = np.unravel_index(idx, dist.probabilities.shape)
    return np.stack(coords, axis=1).astype(np.int64)
