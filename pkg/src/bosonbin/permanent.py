"""Matrix permanents: exact kernels and an unbiased randomized estimator.

perm_naive is the definition-level oracle (factorial cost, small n only).
perm_ryser is the production exact kernel, O(n 2^n) with a Gray-code walk
over column subsets.  perm_glynn_estimate averages the +/-1 Glynn quantity,
whose single-sample magnitude is bounded by ||A||^n, so for matrices with
operator norm at most 1 the additive error budget below is meaningful.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

# Above this size the 2^n Gray-code products accumulate enough rounding to
# warrant extended-precision accumulation.
_EXTENDED_PRECISION_ABOVE = 20

_GLYNN_CHUNK = 1 << 15


def perm_naive(matrix: np.ndarray) -> complex:
    """Permanent by direct permutation sum; guards n <= 10."""
    a = np.asarray(matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    n = a.shape[0]
    if n < 1:
        raise ValueError("matrix must be at least 1 x 1")
    if n > 10:
        raise ValueError("perm_naive is limited to n <= 10")
    rows = range(n)
    total = 0.0 + 0.0j
    for sigma in itertools.permutations(range(n)):
        prod = 1.0 + 0.0j
        for i in rows:
            prod *= a[i, sigma[i]]
        total += prod
    return complex(total)


def perm_ryser(matrix: np.ndarray) -> complex:
    """Exact permanent via Ryser's formula with Gray-code updates."""
    a = np.asarray(matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if a.shape[0] < 1:
        raise ValueError("matrix must be at least 1 x 1")
    return complex(perm_ryser_batch(a[np.newaxis])[0])


def perm_ryser_batch(matrices: np.ndarray) -> np.ndarray:
    """Permanents of a stack of equally sized square matrices.

    Shares the single Gray-code walk across the stack, so the cost is
    O(2^n) vectorized row-sum updates of shape (batch, n).
    """
    mats = np.asarray(matrices, dtype=np.complex128)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise ValueError("expected a (batch, n, n) stack")
    batch, n, _ = mats.shape
    if n < 1:
        raise ValueError("matrices must be at least 1 x 1")
    acc_dtype = np.clongdouble if n > _EXTENDED_PRECISION_ABOVE else np.complex128
    work = mats.astype(acc_dtype, copy=False)
    row_sums = np.zeros((batch, n), dtype=acc_dtype)
    total = np.zeros(batch, dtype=acc_dtype)
    gray = 0
    for k in range(1, 1 << n):
        new_gray = k ^ (k >> 1)
        j = (gray ^ new_gray).bit_length() - 1
        if new_gray & (1 << j):
            row_sums += work[:, :, j]
        else:
            row_sums -= work[:, :, j]
        gray = new_gray
        sign = -1.0 if (bin(gray).count("1") & 1) else 1.0
        total += sign * np.prod(row_sums, axis=1)
    if n & 1:
        total = -total
    return total.astype(np.complex128)


def glynn_trial_count(epsilon: float) -> int:
    """Trials needed for additive error epsilon * ||A||^n at 95% confidence."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return int(math.ceil(8.0 / (epsilon * epsilon)))


def perm_glynn_estimate(matrix: np.ndarray, epsilon: float, seed) -> complex:
    """Unbiased randomized permanent estimate.

    Averages T = ceil(8 / epsilon^2) independent Glynn samples
    prod_i x_i * prod_j (x^T A)_j with x uniform on {-1, +1}^n.  Each
    sample is bounded by ||A||^n (AM-GM on the row of squared magnitudes),
    so the additive error exceeds epsilon * ||A||^n with probability at
    most 1/8 by Chebyshev; in practice the margin is far larger.
    """
    a = np.asarray(matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    n = a.shape[0]
    if n < 1:
        raise ValueError("matrix must be at least 1 x 1")
    trials = glynn_trial_count(epsilon)
    rng = np.random.default_rng(seed)
    total = 0.0 + 0.0j
    remaining = trials
    while remaining > 0:
        chunk = min(remaining, _GLYNN_CHUNK)
        signs = rng.integers(0, 2, size=(chunk, n)).astype(np.float64)
        signs *= 2.0
        signs -= 1.0
        samples = np.prod(signs @ a, axis=1) * np.prod(signs, axis=1)
        total += samples.sum()
        remaining -= chunk
    return complex(total / trials)
