"""Noise models: partial distinguishability, uniform loss, dark counts.

Partial distinguishability enters only through the photon Gram matrix S.
Uniform loss is exact interferometer plumbing: the m-mode unitary embeds
into 2m modes with one beam splitter per input, and the environment block
becomes one more bin, so the engine needs no new math.  Dark counts are
classical postprocessing, a per-bin binomial convolution.
"""

from __future__ import annotations

import math

import numpy as np

from .linalg import embed_uniform_loss
from .partitions import BinnedDistribution, InputSpec, Partition, \
    approx_binned_distribution, binned_distribution

_GRAM_ATOL = 1e-12
_PSD_SLACK = 1e-9
_STATE_NORM_ATOL = 1e-10


def validate_gram(gram: np.ndarray) -> np.ndarray:
    """Check Hermiticity, unit diagonal and positive semidefiniteness."""
    s = np.asarray(gram, dtype=np.complex128)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("gram must be a square matrix")
    if np.abs(s - s.conj().T).max() > _GRAM_ATOL:
        raise ValueError("gram must be Hermitian")
    if np.abs(np.diagonal(s) - 1.0).max() > _GRAM_ATOL:
        raise ValueError("gram diagonal must be 1")
    if np.linalg.eigvalsh(s).min() < -_PSD_SLACK:
        raise ValueError("gram must be positive semidefinite")
    return s


def gram_interpolation(photons: int, x: float) -> np.ndarray:
    """Uniform-overlap model S = (1-x) I + x J.

    x = 1 gives indistinguishable photons, x = 0 fully distinguishable
    ones; eigenvalues 1 + (n-1)x and 1 - x keep S positive semidefinite
    for any x in [0, 1].
    """
    if photons < 1:
        raise ValueError("need at least one photon")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    s = np.full((photons, photons), complex(x))
    np.fill_diagonal(s, 1.0)
    return s


def gram_from_states(states) -> np.ndarray:
    """Gram matrix S[i, j] = <phi_i | phi_j> of unit-norm internal states."""
    mat = np.asarray(states, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] < 1:
        raise ValueError("states must be a nonempty (n, dim) array")
    norms = np.linalg.norm(mat, axis=1)
    if np.abs(norms - 1.0).max() > _STATE_NORM_ATOL:
        raise ValueError("internal states must have unit norm")
    s = mat.conj() @ mat.T
    np.fill_diagonal(s, 1.0)
    return validate_gram(s)


def extend_with_environment(partition: Partition) -> Partition:
    """Append the environment bin {m+1..2m} for a loss-embedded system."""
    m = partition.total_modes
    env = tuple(range(m + 1, 2 * m + 1))
    return Partition(partition.subsets + (env,), 2 * m)


def _embedded_input(input_spec: InputSpec) -> InputSpec:
    occupation = input_spec.occupation + (0,) * input_spec.mode_count
    return InputSpec(occupation, input_spec.gram)


def lossy_binned_distribution(unitary: np.ndarray, input_spec: InputSpec,
                              partition: Partition, transmissivity: float,
                              method: str = "ryser", *, beta: float | None = None,
                              seed=None) -> BinnedDistribution:
    """Binned distribution under uniform loss, with lost photons as a bin.

    The returned distribution has K+1 axes; the last counts photons lost
    to the environment, so a spanning physical partition puts all mass on
    sum(k) = n.  transmissivity = 1 reproduces the lossless distribution
    with an extra all-zero environment axis.
    """
    u = np.asarray(unitary, dtype=np.complex128)
    embedded = embed_uniform_loss(u, transmissivity)
    extended = extend_with_environment(partition)
    lossy_input = _embedded_input(input_spec)
    if method == "ryser":
        dist = binned_distribution(embedded, lossy_input, extended)
    elif method == "glynn":
        if beta is None:
            raise ValueError("glynn method needs beta")
        dist = approx_binned_distribution(embedded, lossy_input, extended,
                                          beta, seed)
    else:
        raise ValueError(f"unknown method {method!r}")
    meta = dict(dist.method or {})
    meta["transmissivity"] = float(transmissivity)
    dist.method = meta
    return dist


def _binomial_pmf(trials: int, p: float) -> np.ndarray:
    q = 1.0 - p
    return np.array([math.comb(trials, k) * p ** k * q ** (trials - k)
                     for k in range(trials + 1)])


def dark_counts_convolve(dist: BinnedDistribution, dark_p: float,
                         bin_sizes) -> BinnedDistribution:
    """Convolve each axis with Binomial(K_z, dark_p) spurious clicks.

    Each of the K_z detectors in bin z fires spuriously with probability
    dark_p per shot, independently of the photons, so axis z grows by K_z
    entries.  A bin size of 0 marks a detector-free axis (the lost-photon
    bin) and leaves that axis untouched.
    """
    sizes = tuple(int(s) for s in bin_sizes)
    if len(sizes) != dist.bin_count:
        raise ValueError("need one bin size per distribution axis")
    if any(s < 0 for s in sizes):
        raise ValueError("bin sizes must be nonnegative")
    if not 0.0 <= dark_p < 1.0:
        raise ValueError("dark_p must lie in [0, 1)")
    probs = dist.probabilities
    for axis, size in enumerate(sizes):
        pmf = _binomial_pmf(size, dark_p)
        probs = np.apply_along_axis(lambda col: np.convolve(col, pmf), axis, probs)
    probs = probs / probs.sum()
    meta = dict(dist.method or {})
    meta["dark_count_p"] = float(dark_p)
    return BinnedDistribution(dist.photon_count, probs, dist.bins, meta)
