"""Closed-form binned distributions and interferometer-averaged references.

The single-mode and odd-mode results are exact for the discrete-Fourier
interferometer; the combinatorics run in exact rational arithmetic and
only convert to floats at the end, so factorial growth costs precision
nothing.  The interferometer-averaged forms and the Gaussian density are
population references for random interferometers: the bosonic average is
exact, the distinguishable one and the Gaussian are asymptotic in the
mode count.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .partitions import BinnedDistribution, Partition
from .permanent import perm_ryser


def single_mode_bosonic(photons: int, modes: int) -> BinnedDistribution:
    """Count distribution in one output mode of a Fourier interferometer.

    P(k) = sum_{a=k}^{n} (-1)^{k+a} C(a,k) C(n,a) a! / m^a for n photons in
    the first n input modes, all indistinguishable.  P(n-1) vanishes
    identically when n = m.
    """
    _check_counts(photons, modes)
    probs = []
    for k in range(photons + 1):
        total = Fraction(0)
        for a in range(k, photons + 1):
            term = Fraction(math.comb(a, k) * math.comb(photons, a)
                            * math.factorial(a), modes ** a)
            total += term if (k + a) % 2 == 0 else -term
        probs.append(float(total))
    return BinnedDistribution(photons, np.array(probs), ((1,),),
                              {"kind": "closed-form"})


def single_mode_distinguishable(photons: int, modes: int) -> BinnedDistribution:
    """Distinguishable counterpart: Binomial(n, 1/m)."""
    _check_counts(photons, modes)
    p = Fraction(1, modes)
    probs = [float(math.comb(photons, k) * p ** k * (1 - p) ** (photons - k))
             for k in range(photons + 1)]
    return BinnedDistribution(photons, np.array(probs), ((1,),),
                              {"kind": "closed-form"})


def odd_modes_bosonic(photons: int) -> BinnedDistribution:
    """Counts in the odd-labeled modes of an n = m Fourier interferometer.

    Needs even n.  Odd totals are forbidden by interference and the even
    ones follow a scaled binomial: P(k) = 2^(-n/2) C(n/2, k/2).
    """
    if photons < 2 or photons % 2 != 0:
        raise ValueError("photons must be even and at least 2")
    half = photons // 2
    probs = np.zeros(photons + 1)
    for k in range(0, photons + 1, 2):
        probs[k] = math.comb(half, k // 2) / 2.0 ** half
    subset = tuple(range(1, photons + 1, 2))
    return BinnedDistribution(photons, probs, (subset,), {"kind": "closed-form"})


def odd_modes_distinguishable(photons: int) -> BinnedDistribution:
    """Distinguishable counterpart: plain Binomial(n, 1/2)."""
    if photons < 2 or photons % 2 != 0:
        raise ValueError("photons must be even and at least 2")
    probs = np.array([math.comb(photons, k) / 2.0 ** photons
                      for k in range(photons + 1)])
    subset = tuple(range(1, photons + 1, 2))
    return BinnedDistribution(photons, probs, (subset,), {"kind": "closed-form"})


def subset_H(unitary: np.ndarray, subset) -> np.ndarray:
    """H[a, b] = sum_{l in subset} conj(U[l, a]) U[l, b], an m x m PSD block.

    Subset labels are 1-based output modes.  H's eigenvalues lie in [0, 1]
    and tr H equals the subset size.
    """
    u = np.asarray(unitary, dtype=np.complex128)
    rows = np.asarray(sorted(int(i) for i in subset)) - 1
    if rows.size == 0:
        raise ValueError("subset must be nonempty")
    if rows[0] < 0 or rows[-1] >= u.shape[0]:
        raise ValueError("subset labels must lie in 1..m")
    block = u[rows, :]
    return block.conj().T @ block


def single_subset_expansion(unitary: np.ndarray, gram: np.ndarray,
                            subset) -> tuple[np.ndarray, BinnedDistribution]:
    """Count distribution of one bin from principal-minor permanents.

    With H' = S o H_n (the Gram-masked n x n block of subset_H), the
    characteristic function is the polynomial 1 + sum_a c_a (1 - e^{i eta})^a
    with c_a = (-1)^a times the sum of order-a principal-minor permanents
    of H', and P(k) = (-1)^k sum_{a>=k} C(a,k) c_a.  Returns (c, P) with
    c[0] = 1.  In particular P(n) = perm(H') and P(0) = perm(I - H').
    """
    s = np.asarray(gram, dtype=np.complex128)
    n = s.shape[0]
    if s.ndim != 2 or s.shape != (n, n):
        raise ValueError("gram must be square")
    if n > 10:
        raise ValueError("limited to n <= 10 photons")
    h_block = subset_H(unitary, subset)[:n, :n]
    masked = s * h_block
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    for a in range(1, n + 1):
        total = 0.0 + 0.0j
        for rows in itertools.combinations(range(n), a):
            total += perm_ryser(masked[np.ix_(rows, rows)])
        coeffs[a] = (-1) ** a * total.real
    probs = np.zeros(n + 1)
    for k in range(n + 1):
        acc = sum(math.comb(a, k) * coeffs[a] for a in range(k, n + 1))
        probs[k] = (-1) ** k * acc
    subset_sorted = tuple(sorted(int(i) for i in subset))
    dist = BinnedDistribution(n, probs, (subset_sorted,),
                              {"kind": "minor-expansion"})
    return coeffs, dist


def _check_counts(photons: int, modes: int) -> None:
    if photons < 1:
        raise ValueError("need at least one photon")
    if modes < photons:
        raise ValueError("need at least as many modes as photons")


def _compositions(total: int, parts: int):
    """All nonnegative integer vectors of the given length summing to total."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _haar_average(photons: int, bin_sizes, modes: int,
                  bosonic: bool) -> BinnedDistribution:
    sizes = [int(s) for s in bin_sizes]
    if any(s < 1 for s in sizes):
        raise ValueError("bin sizes must be positive")
    if sum(sizes) > modes:
        raise ValueError("bins cannot exceed the mode count")
    if photons < 1:
        raise ValueError("need at least one photon")
    k_axes = len(sizes)
    leftover = modes - sum(sizes)
    full_sizes = sizes + ([leftover] if leftover else [])
    probs = np.zeros((photons + 1,) * k_axes)
    denom = Fraction(1)
    if bosonic:
        for l in range(photons):
            denom *= Fraction(modes + l, modes)
    for counts in _compositions(photons, len(full_sizes)):
        weight = Fraction(math.factorial(photons))
        for k_z, size in zip(counts, full_sizes):
            weight *= Fraction(size, modes) ** k_z
            weight /= math.factorial(k_z)
        if bosonic:
            for k_z, size in zip(counts, full_sizes):
                for l in range(k_z):
                    weight *= Fraction(size + l, size)
            weight /= denom
        probs[counts[:k_axes]] += float(weight)
    return BinnedDistribution(photons, probs, None, {"kind": "haar-average"})


def haar_average_distinguishable(photons: int, bin_sizes,
                                 modes: int) -> BinnedDistribution:
    """Multinomial reference with weights q_z = K_z / m.

    Asymptotic mean over random interferometers for distinguishable
    photons; finite-size corrections are O(1/m).  Non-spanning bins are
    handled by marginalizing an implicit leftover bin.
    """
    return _haar_average(photons, bin_sizes, modes, bosonic=False)


def haar_average_bosonic(photons: int, bin_sizes,
                         modes: int) -> BinnedDistribution:
    """Mean binned distribution over random interferometers, bosonic input.

    The multinomial reference times the bunching correction
    prod_z prod_{l<k_z} (1 + l/K_z) / prod_{l<n} (1 + l/m); exact as a
    population mean at any finite size.
    """
    return _haar_average(photons, bin_sizes, modes, bosonic=True)


def gaussian_asymptotic(photons: int, modes: int, q, sigma: float,
                        counts) -> float:
    """Leading-order Gaussian density for bin fractions x_z = k_z / n.

    sigma = 0 is the distinguishable reference, sigma = 1 the bosonic one;
    bunching widens the count variance by the factor 1 + sigma * n/m.  The
    density lives on the sum(k) = n simplex, hence the (K-1)/2 power in
    the normalization.  Diagnostic only, no error-term factor.
    """
    q = np.asarray(q, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.float64)
    if q.ndim != 1 or counts.shape != q.shape:
        raise ValueError("q and counts must be equal-length vectors")
    if np.any(q <= 0) or abs(q.sum() - 1.0) > 1e-12:
        raise ValueError("q must be positive and sum to 1")
    if sigma not in (0, 1):
        raise ValueError("sigma must be 0 or 1")
    if photons < 1 or modes < 1:
        raise ValueError("photons and modes must be positive")
    rho = photons / modes
    width = 1.0 + sigma * rho
    x = counts / photons
    exponent = -photons * np.sum((x - q) ** 2 / (2.0 * width * q))
    k_axes = q.size
    norm = (2.0 * np.pi * width * photons) ** ((k_axes - 1) / 2.0)
    norm *= np.sqrt(np.prod(q))
    return float(np.exp(exponent) / norm)
