"""Binned photon-counting distributions via characteristic functions.

A partition groups output modes into K disjoint bins; the observable is
the vector k of photon counts per bin.  Its characteristic function at
phases eta is the permanent of the Gram-masked n x n block of the virtual
interferometer U^dag Lambda(eta) U, and evaluating it on the uniform grid
nu_l = 2 pi l / (n+1) turns recovery of P(k) into a K-dimensional DFT of
size (n+1)^K.  Values at -nu are conjugates of values at +nu, so only half
the grid is ever computed.

All functions are pure; randomized paths take explicit seeds and derive
per-point streams with numpy.random.SeedSequence, so results are
reproducible and safe to compute concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError
from .permanent import glynn_trial_count, perm_glynn_estimate, perm_ryser, perm_ryser_batch

# Runtime guards; property-level tolerances are asserted in the test suite.
_GRAM_DIAG_ATOL = 1e-12
_IMAG_RESIDUE_ATOL = 1e-9
_NEGATIVE_PROB_ATOL = 1e-9
_NORMALIZATION_ATOL = 1e-6
_RANK_SVAL_CUTOFF = 1e-8

_RYSER_BATCH_LIMIT = 4096


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


@dataclass(frozen=True)
class Partition:
    """Disjoint bins of 1-based output-mode labels on a system of total_modes."""

    subsets: tuple[tuple[int, ...], ...]
    total_modes: int

    def __post_init__(self):
        subsets = tuple(tuple(int(i) for i in s) for s in self.subsets)
        object.__setattr__(self, "subsets", subsets)
        if self.total_modes < 1:
            raise ValueError("total_modes must be at least 1")
        if len(subsets) < 1:
            raise ValueError("a partition needs at least one subset")
        seen = set()
        for s in subsets:
            if len(s) == 0:
                raise ValueError("partition subsets must be nonempty")
            if list(s) != sorted(set(s)):
                raise ValueError("each subset must be strictly ascending")
            if s[0] < 1 or s[-1] > self.total_modes:
                raise ValueError("mode labels must lie in 1..total_modes")
            overlap = seen.intersection(s)
            if overlap:
                raise ValueError(f"subsets overlap on modes {sorted(overlap)}")
            seen.update(s)

    @property
    def bin_count(self) -> int:
        return len(self.subsets)

    @property
    def sizes(self) -> tuple[int, ...]:
        """Bin sizes K_z, the per-bin mode counts."""
        return tuple(len(s) for s in self.subsets)

    @property
    def spans_all_modes(self) -> bool:
        return sum(self.sizes) == self.total_modes

    @property
    def relative_sizes(self) -> tuple[float, ...]:
        """q_z = K_z / total_modes for each bin."""
        return tuple(len(s) / self.total_modes for s in self.subsets)


def equipartition(total_modes: int, bins: int) -> Partition:
    """Split modes 1..total_modes into `bins` consecutive, near-equal bins.

    When bins divides total_modes every bin has total_modes/bins modes.
    Otherwise the first bins-1 take ceil(total_modes/bins) each and the
    last takes the remainder, falling back to floor-sized leading bins
    whenever the ceiling rule would leave the remainder empty.
    """
    if bins < 1 or bins > total_modes:
        raise ValueError("need 1 <= bins <= total_modes")
    if total_modes % bins == 0:
        head = total_modes // bins
    else:
        head = -(-total_modes // bins)
        if total_modes - head * (bins - 1) < 1:
            head = total_modes // bins
    sizes = [head] * (bins - 1)
    sizes.append(total_modes - head * (bins - 1))
    subsets = []
    start = 1
    for size in sizes:
        subsets.append(tuple(range(start, start + size)))
        start += size
    return Partition(tuple(subsets), total_modes)


@dataclass(frozen=True, eq=False)
class InputSpec:
    """Input occupation r over modes plus the n x n photon Gram matrix.

    Photon i of the mode-assignment list d(r) (modes repeated by their
    occupations, ascending) carries internal state i; gram[i, j] is the
    overlap of states i and j, so the unit diagonal is mandatory.
    """

    occupation: tuple[int, ...]
    gram: np.ndarray

    def __post_init__(self):
        occ = tuple(int(r) for r in self.occupation)
        object.__setattr__(self, "occupation", occ)
        if any(r < 0 for r in occ):
            raise ValueError("occupations must be nonnegative")
        n = sum(occ)
        if n < 1:
            raise ValueError("need at least one photon")
        gram = np.asarray(self.gram, dtype=np.complex128)
        object.__setattr__(self, "gram", gram)
        if gram.shape != (n, n):
            raise ValueError("gram must be n x n with n the total photon number")
        if np.abs(np.diagonal(gram) - 1.0).max() > _GRAM_DIAG_ATOL:
            raise ValueError("gram diagonal must be 1")
        if np.abs(gram - gram.conj().T).max() > _GRAM_DIAG_ATOL:
            raise ValueError("gram must be Hermitian")

    @property
    def photon_count(self) -> int:
        return sum(self.occupation)

    @property
    def mode_count(self) -> int:
        return len(self.occupation)

    @property
    def mode_assignment(self) -> tuple[int, ...]:
        """d(r): 1-based input mode of each photon, modes repeated r_j times."""
        out = []
        for mode, r in enumerate(self.occupation, start=1):
            out.extend([mode] * r)
        return tuple(out)

    @property
    def mu(self) -> int:
        """Input-state normalization mu(r) = prod_j r_j!."""
        out = 1
        for r in self.occupation:
            out *= math.factorial(r)
        return out

    @property
    def is_collision_free(self) -> bool:
        return all(r <= 1 for r in self.occupation)


def single_photon_input(photons: int, modes: int | None = None,
                        gram: np.ndarray | None = None) -> InputSpec:
    """One photon in each of the first `photons` modes.

    gram defaults to all ones (fully indistinguishable photons).
    """
    if modes is None:
        modes = photons
    if photons < 1 or modes < photons:
        raise ValueError("need 1 <= photons <= modes")
    if gram is None:
        gram = np.ones((photons, photons))
    occupation = (1,) * photons + (0,) * (modes - photons)
    return InputSpec(occupation, gram)


@dataclass(frozen=True, eq=False)
class CharacteristicGrid:
    """Characteristic-function values on the (n+1)^K grid nu_l = 2 pi l/(n+1)."""

    photon_count: int
    values: np.ndarray

    def __post_init__(self):
        n = self.photon_count
        vals = np.asarray(self.values, dtype=np.complex128)
        object.__setattr__(self, "values", vals)
        if vals.ndim < 1 or any(s != n + 1 for s in vals.shape):
            raise ValueError("grid must have n+1 points per axis")

    @property
    def bin_count(self) -> int:
        return self.values.ndim


@dataclass(eq=False)
class BinnedDistribution:
    """Probability array over bin counts k, one axis per bin.

    Axis z has length n+1 straight from the engine and can be longer after
    dark-count convolution.  bins records the generating subsets when
    known; method records how the numbers were produced (exact or
    estimated, seeds, trial counts).
    """

    photon_count: int
    probabilities: np.ndarray
    bins: tuple[tuple[int, ...], ...] | None = None
    method: dict | None = field(default=None)

    def __post_init__(self):
        self.probabilities = np.asarray(self.probabilities, dtype=np.float64)
        if self.probabilities.ndim < 1:
            raise ValueError("probabilities must have at least one axis")
        if self.photon_count < 0:
            raise ValueError("photon_count must be nonnegative")

    @property
    def bin_count(self) -> int:
        return self.probabilities.ndim

    def marginal(self, axis: int) -> "BinnedDistribution":
        """Sum out one axis; drops the corresponding bins entry."""
        if self.bin_count == 1:
            raise ValueError("cannot marginalize the only axis")
        probs = self.probabilities.sum(axis=axis)
        bins = None
        if self.bins is not None:
            bins = tuple(s for i, s in enumerate(self.bins) if i != axis)
        return BinnedDistribution(self.photon_count, probs, bins, self.method)

    def to_json(self) -> dict:
        entries = []
        for k in np.ndindex(self.probabilities.shape):
            entries.append({"k": [int(i) for i in k],
                            "p": float(self.probabilities[k])})
        return {
            "n": int(self.photon_count),
            "K": int(self.bin_count),
            "bins": None if self.bins is None else [list(s) for s in self.bins],
            "probabilities": entries,
            "method": self.method,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BinnedDistribution":
        try:
            n = int(obj["n"])
            k_axes = int(obj["K"])
            entries = obj["probabilities"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed distribution object: {exc}") from exc
        if not entries:
            raise ValueError("distribution has no probability entries")
        shape = [0] * k_axes
        for e in entries:
            k = e["k"]
            if len(k) != k_axes:
                raise ValueError("probability entry arity does not match K")
            for z, i in enumerate(k):
                shape[z] = max(shape[z], int(i) + 1)
        probs = np.zeros(shape)
        for e in entries:
            probs[tuple(int(i) for i in e["k"])] = float(e["p"])
        bins = obj.get("bins")
        if bins is not None:
            bins = tuple(tuple(int(i) for i in s) for s in bins)
        return cls(n, probs, bins, obj.get("method"))


def phase_mask(partition: Partition, phases: np.ndarray) -> np.ndarray:
    """Diagonal matrix Lambda(eta): e^{i eta_z} on bin z's modes, 1 elsewhere."""
    return np.diag(_phase_diagonal(partition, phases))


def _phase_diagonal(partition: Partition, phases: np.ndarray) -> np.ndarray:
    phases = np.asarray(phases, dtype=np.float64)
    if phases.shape != (partition.bin_count,):
        raise ValueError("need one phase per bin")
    diag = np.ones(partition.total_modes, dtype=np.complex128)
    for z, subset in enumerate(partition.subsets):
        idx = np.asarray(subset) - 1
        diag[idx] = np.exp(1j * phases[z])
    return diag


def virtual_interferometer(unitary: np.ndarray, partition: Partition,
                           phases: np.ndarray) -> np.ndarray:
    """V(eta) = U^dag Lambda(eta) U, again unitary."""
    u = np.asarray(unitary, dtype=np.complex128)
    _check_engine_args(u, partition)
    diag = _phase_diagonal(partition, phases)
    return u.conj().T @ (diag[:, np.newaxis] * u)


def rank_check_W(unitary: np.ndarray, partition: Partition,
                 phases: np.ndarray) -> int:
    """Numerical rank of W = U^dag (Lambda(eta) - 1) U.

    The rank can never exceed the number of modes whose phase is
    nontrivial; exceeding it means the inputs are inconsistent, which is
    reported as a numerical failure.
    """
    u = np.asarray(unitary, dtype=np.complex128)
    _check_engine_args(u, partition)
    diag = _phase_diagonal(partition, phases) - 1.0
    w = u.conj().T @ (diag[:, np.newaxis] * u)
    svals = np.linalg.svd(w, compute_uv=False)
    rank = int(np.count_nonzero(svals > _RANK_SVAL_CUTOFF))
    bound = int(np.count_nonzero(np.abs(diag) > 1e-12))
    if rank > bound:
        raise NumericalError(f"rank {rank} exceeds the phased-mode count {bound}")
    return rank


def _check_engine_args(unitary: np.ndarray, partition: Partition,
                       input_spec: InputSpec | None = None) -> None:
    if unitary.ndim != 2 or unitary.shape[0] != unitary.shape[1]:
        raise ValueError("unitary must be a square matrix")
    if unitary.shape[0] != partition.total_modes:
        raise ValueError("partition total_modes must match the unitary dimension")
    if input_spec is not None and input_spec.mode_count != unitary.shape[0]:
        raise ValueError("occupation length must match the unitary dimension")


def _reduced_components(unitary: np.ndarray, input_spec: InputSpec,
                        partition: Partition):
    """Mode-assignment-reduced pieces of the virtual interferometer.

    Returns (E, H) with E the reduced identity block V(0)[d, d] and H the
    (K, n, n) stack of per-bin overlap blocks, so the reduced matrix at
    phases eta is E + sum_z (e^{i eta_z} - 1) H[z].
    """
    d = np.asarray(input_spec.mode_assignment) - 1
    cols = unitary[:, d]
    e_block = cols.conj().T @ cols
    h_stack = np.empty((partition.bin_count, len(d), len(d)), dtype=np.complex128)
    for z, subset in enumerate(partition.subsets):
        rows = cols[np.asarray(subset) - 1, :]
        h_stack[z] = rows.conj().T @ rows
    return e_block, h_stack


def _reduced_matrices(points: np.ndarray, n: int, e_block: np.ndarray,
                      h_stack: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """Gram-masked reduced matrices for grid points given as (L, K) indices."""
    factors = np.exp(2j * np.pi * points / (n + 1)) - 1.0
    mats = np.tensordot(factors, h_stack, axes=(1, 0))
    mats += e_block[np.newaxis]
    mats *= gram[np.newaxis]
    return mats


def characteristic_value(unitary: np.ndarray, input_spec: InputSpec,
                         partition: Partition, phases: np.ndarray,
                         method: str = "ryser", *, epsilon: float | None = None,
                         seed=None) -> complex:
    """x(eta) = perm(S o V_n(eta)) / mu(r) at a single phase vector."""
    u = np.asarray(unitary, dtype=np.complex128)
    _check_engine_args(u, partition, input_spec)
    phases = np.asarray(phases, dtype=np.float64)
    if phases.shape != (partition.bin_count,):
        raise ValueError("need one phase per bin")
    e_block, h_stack = _reduced_components(u, input_spec, partition)
    factors = (np.exp(1j * phases) - 1.0).astype(np.complex128)
    mat = e_block + np.tensordot(factors, h_stack, axes=(0, 0))
    mat = input_spec.gram * mat
    if method == "ryser":
        value = perm_ryser(mat)
    elif method == "glynn":
        if epsilon is None:
            raise ValueError("glynn method needs epsilon")
        value = perm_glynn_estimate(mat, epsilon, seed)
    else:
        raise ValueError(f"unknown method {method!r}")
    return complex(value / input_spec.mu)


def _half_grid(n: int, bins: int):
    """Grid points to evaluate plus their reflections.

    Returns (points, negatives, self_conjugate) where points holds the
    lexicographically canonical half of the grid (l <= (-l) mod (n+1)).
    """
    period = n + 1
    points = []
    negatives = []
    for idx in np.ndindex((period,) * bins):
        neg = tuple((period - i) % period for i in idx)
        if idx <= neg:
            points.append(idx)
            negatives.append(neg)
    return points, negatives


def characteristic_grid(unitary: np.ndarray, input_spec: InputSpec,
                        partition: Partition) -> CharacteristicGrid:
    """Exact characteristic-function grid via batched Ryser permanents."""
    u = np.asarray(unitary, dtype=np.complex128)
    _check_engine_args(u, partition, input_spec)
    n = input_spec.photon_count
    bins = partition.bin_count
    e_block, h_stack = _reduced_components(u, input_spec, partition)
    points, negatives = _half_grid(n, bins)
    point_arr = np.asarray(points, dtype=np.float64)
    values = np.empty(len(points), dtype=np.complex128)
    for start in range(0, len(points), _RYSER_BATCH_LIMIT):
        stop = min(start + _RYSER_BATCH_LIMIT, len(points))
        mats = _reduced_matrices(point_arr[start:stop], n, e_block, h_stack,
                                 input_spec.gram)
        values[start:stop] = perm_ryser_batch(mats)
    values /= input_spec.mu
    grid = _assemble_grid(n, bins, points, negatives, values)
    if abs(grid.flat[0] - 1.0) > _NORMALIZATION_ATOL:
        raise NumericalError("characteristic function at zero deviates from 1")
    return CharacteristicGrid(n, grid)


def approx_characteristic_grid(unitary: np.ndarray, input_spec: InputSpec,
                               partition: Partition, beta: float,
                               seed) -> tuple[CharacteristicGrid, dict]:
    """Estimated grid with per-point additive budget epsilon = beta (n+1)^(-K/2).

    The zero-phase point is pinned to exactly 1 rather than estimated, the
    conjugate half of the grid is reflected rather than re-estimated, and
    the returned metadata records the trial accounting.
    """
    u = np.asarray(unitary, dtype=np.complex128)
    _check_engine_args(u, partition, input_spec)
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not input_spec.is_collision_free:
        raise ValueError("estimated mode requires at most one photon per mode")
    n = input_spec.photon_count
    bins = partition.bin_count
    epsilon = beta * (n + 1) ** (-bins / 2.0)
    e_block, h_stack = _reduced_components(u, input_spec, partition)
    points, negatives = _half_grid(n, bins)
    point_arr = np.asarray(points, dtype=np.float64)
    mats = _reduced_matrices(point_arr, n, e_block, h_stack, input_spec.gram)
    seeds = _seed_sequence(seed).spawn(len(points))
    values = np.empty(len(points), dtype=np.complex128)
    for i, point in enumerate(points):
        if all(x == 0 for x in point):
            values[i] = 1.0
        else:
            values[i] = perm_glynn_estimate(mats[i], epsilon, seeds[i])
    grid = _assemble_grid(n, bins, points, negatives, values)
    meta = {
        "kind": "glynn",
        "beta": float(beta),
        "epsilon": float(epsilon),
        "trials_per_point": glynn_trial_count(epsilon),
        "seed": seed,
    }
    return CharacteristicGrid(n, grid), meta


def _assemble_grid(n, bins, points, negatives, values) -> np.ndarray:
    grid = np.empty((n + 1,) * bins, dtype=np.complex128)
    for point, neg, value in zip(points, negatives, values):
        if point == neg:
            # self-conjugate grid points carry real values
            grid[point] = value.real
        else:
            grid[point] = value
            grid[neg] = np.conj(value)
    return grid


def _invert_grid(grid: CharacteristicGrid, strict: bool) -> np.ndarray:
    """DFT inversion of the grid into a probability array.

    strict enforces the exact-mode guarantees (tiny imaginary residue,
    negatives within rounding, near-unit mass); the estimated mode clamps
    and renormalizes instead.
    """
    n = grid.photon_count
    bins = grid.bin_count
    probs = np.fft.fftn(grid.values) / (n + 1) ** bins
    if strict and np.abs(probs.imag).max() > _IMAG_RESIDUE_ATOL:
        raise NumericalError("imaginary residue above tolerance after inversion")
    probs = probs.real.copy()
    if strict:
        if probs.min() < -_NEGATIVE_PROB_ATOL:
            raise NumericalError("negative probability beyond rounding tolerance")
        total = probs.sum()
        if abs(total - 1.0) > _NORMALIZATION_ATOL:
            raise NumericalError("normalization deficit beyond tolerance")
    np.clip(probs, 0.0, None, out=probs)
    probs /= probs.sum()
    return probs


def binned_distribution(unitary: np.ndarray, input_spec: InputSpec,
                        partition: Partition) -> BinnedDistribution:
    """Exact binned distribution P(k) for the given input and partition."""
    grid = characteristic_grid(unitary, input_spec, partition)
    probs = _invert_grid(grid, strict=True)
    return BinnedDistribution(grid.photon_count, probs, partition.subsets,
                              {"kind": "ryser"})


def approx_binned_distribution(unitary: np.ndarray, input_spec: InputSpec,
                               partition: Partition, beta: float,
                               seed) -> BinnedDistribution:
    """Estimated binned distribution with total-variation budget beta.

    Per-point estimation at epsilon = beta (n+1)^(-K/2) keeps the l1 error
    of the raw inverse below beta; clamping negatives and renormalizing at
    most doubles it.  Metadata records trials, the clipped negative mass
    and the pre-normalization total.
    """
    grid, meta = approx_characteristic_grid(unitary, input_spec, partition,
                                            beta, seed)
    raw = np.fft.fftn(grid.values).real / (grid.photon_count + 1) ** grid.bin_count
    meta = dict(meta)
    meta["clipped_negative_mass"] = float(-raw[raw < 0].sum())
    meta["raw_total"] = float(raw.sum())
    probs = _invert_grid(grid, strict=False)
    return BinnedDistribution(grid.photon_count, probs, partition.subsets, meta)


def marginal_distribution(unitary: np.ndarray, input_spec: InputSpec,
                          modes) -> BinnedDistribution:
    """Joint photon-count distribution of individual modes.

    Equivalent to a partition of singleton bins; the listed modes need not
    cover the whole interferometer, unlisted ones are traced out.
    """
    modes = tuple(int(i) for i in modes)
    if len(modes) < 1:
        raise ValueError("need at least one mode")
    u = np.asarray(unitary, dtype=np.complex128)
    partition = Partition(tuple((i,) for i in modes), u.shape[0])
    return binned_distribution(u, input_spec, partition)
