"""Sample-based validation: distances, Bayesian model comparison, studies.

The Bayesian machinery compares two fully specified binned models by the
running likelihood ratio chi = prod P(k|H0)/P(k|Ha), kept in log space
with a probability floor so single outliers cannot produce infinities.
The studies at the bottom drive the engine over random interferometers to
measure distance scaling and the value of lossy events.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .errors import IngestionError
from .linalg import haar_unitary
from .noise import gram_interpolation, lossy_binned_distribution
from .partitions import BinnedDistribution, Partition, binned_distribution, \
    equipartition, single_photon_input

DEFAULT_FLOOR = 1e-12
DEFAULT_MAX_SAMPLES = 100_000

_RAW = "raw_occupations"
_BINNED = "binned_counts"
_DECISION_CHUNK = 1024


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


@dataclass(eq=False)
class SampleSet:
    """Integer sample records, either raw mode occupations or bin counts."""

    kind: str
    records: np.ndarray

    def __post_init__(self):
        if self.kind not in (_RAW, _BINNED):
            raise ValueError(f"unknown sample kind {self.kind!r}")
        rec = np.asarray(self.records, dtype=np.int64)
        if rec.ndim != 2:
            raise ValueError("records must be a 2-D integer array")
        if rec.size and rec.min() < 0:
            raise ValueError("records must be nonnegative")
        object.__setattr__(self, "records", rec)

    def __len__(self) -> int:
        return self.records.shape[0]

    @property
    def width(self) -> int:
        return self.records.shape[1]


@dataclass
class ValidationReport:
    """Outcome of a Bayesian comparison between two binned hypotheses."""

    chi: float
    p_null: float
    samples_used: int
    censored: bool
    floor: float
    seed: object = None
    threshold: float | None = None
    log_chi: float = 0.0
    p_null_trajectory: np.ndarray | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "chi": self.chi,
            "p_null": self.p_null,
            "samples_used": int(self.samples_used),
            "censored": bool(self.censored),
            "floor": self.floor,
            "seed": self.seed,
        }


def tvd(p: BinnedDistribution, q: BinnedDistribution) -> float:
    """Total variation distance sum_k |p(k) - q(k)|, in [0, 2].

    Domains are aligned by zero-padding each axis, so distributions with
    different supports (for example with and without dark counts) compare
    directly.
    """
    if p.bin_count != q.bin_count:
        raise ValueError("distributions must have the same number of bins")
    shape = tuple(max(a, b) for a, b in
                  zip(p.probabilities.shape, q.probabilities.shape))
    return float(np.abs(_pad_to(p.probabilities, shape)
                        - _pad_to(q.probabilities, shape)).sum())


def _pad_to(arr: np.ndarray, shape) -> np.ndarray:
    if arr.shape == tuple(shape):
        return arr
    out = np.zeros(shape)
    out[tuple(slice(0, s) for s in arr.shape)] = arr
    return out


def bin_samples(samples: SampleSet, partition: Partition,
                total_photons: int | None = None) -> SampleSet:
    """Reduce raw occupation records to per-bin counts.

    Modes outside every subset are dropped.  When total_photons is given,
    an extra trailing column records the inferred number of undetected
    photons (total minus all detected clicks), which is the environment
    count of a lossy model.
    """
    if samples.kind != _RAW:
        raise ValueError("bin_samples expects raw occupation records")
    if samples.width < partition.total_modes:
        raise ValueError("record width is smaller than the partition's modes")
    cols = []
    for subset in partition.subsets:
        idx = np.asarray(subset) - 1
        cols.append(samples.records[:, idx].sum(axis=1))
    if total_photons is not None:
        detected = samples.records.sum(axis=1)
        missing = total_photons - detected
        if missing.size and missing.min() < 0:
            raise ValueError("a record holds more photons than stated")
        cols.append(missing)
    if len(samples) == 0:
        width = len(cols)
        return SampleSet(_BINNED, np.zeros((0, width), dtype=np.int64))
    return SampleSet(_BINNED, np.stack(cols, axis=1))


def _aligned_log_ratio(p_null: BinnedDistribution, p_alt: BinnedDistribution,
                       floor: float):
    """Common-domain log P0/Pa table plus the domain shape."""
    if p_null.bin_count != p_alt.bin_count:
        raise ValueError("hypotheses must have the same number of bins")
    shape = tuple(max(a, b) for a, b in
                  zip(p_null.probabilities.shape, p_alt.probabilities.shape))
    a = np.maximum(_pad_to(p_null.probabilities, shape), floor)
    b = np.maximum(_pad_to(p_alt.probabilities, shape), floor)
    return np.log(a) - np.log(b), shape


def _record_log_ratios(records: np.ndarray, table: np.ndarray, shape,
                       floor: float) -> np.ndarray:
    """Per-record log ratios; records outside the table floor both sides."""
    inside = np.ones(records.shape[0], dtype=bool)
    for z, size in enumerate(shape):
        inside &= records[:, z] < size
    out = np.zeros(records.shape[0])
    if inside.any():
        flat = np.ravel_multi_index(
            tuple(records[inside, z] for z in range(len(shape))), shape)
        out[inside] = table.ravel()[flat]
    return out


def bayes_update(samples: SampleSet, p_null: BinnedDistribution,
                 p_alt: BinnedDistribution, floor: float = DEFAULT_FLOOR,
                 seed=None) -> ValidationReport:
    """Posterior weight of the null model after a batch of binned samples.

    chi multiplies P(k|H0)/P(k|Ha) over the records (floored at `floor`);
    p_null = chi / (chi + 1) under equal priors.  The order of records
    cannot matter.
    """
    if samples.kind != _BINNED:
        raise ValueError("bayes_update expects binned count records")
    if floor <= 0:
        raise ValueError("floor must be positive")
    table, shape = _aligned_log_ratio(p_null, p_alt, floor)
    if len(samples) and samples.width != len(shape):
        raise ValueError("record arity does not match the hypotheses")
    ratios = _record_log_ratios(samples.records, table, shape, floor) \
        if len(samples) else np.zeros(0)
    log_chi = float(ratios.sum())
    trajectory = _sigmoid(np.cumsum(ratios)) if len(samples) else np.zeros(0)
    return ValidationReport(
        chi=_safe_exp(log_chi),
        p_null=_sigmoid(log_chi),
        samples_used=len(samples),
        censored=False,
        floor=floor,
        seed=seed,
        log_chi=log_chi,
        p_null_trajectory=trajectory,
    )


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=np.float64)))


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


@dataclass
class DecisionResult:
    samples_used: int
    censored: bool
    log_chi: float
    p_null: float


def samples_to_decision(truth: BinnedDistribution, p_null: BinnedDistribution,
                        p_alt: BinnedDistribution, threshold: float,
                        max_samples: int = DEFAULT_MAX_SAMPLES, seed=None,
                        floor: float = DEFAULT_FLOOR) -> DecisionResult:
    """Sequential sample count until p_null crosses the threshold.

    Draws i.i.d. outcomes from `truth`, updates the running p_null and
    stops at the first crossing: upward for confirmation thresholds above
    1/2, downward for rejection thresholds below 1/2 (p_null starts at
    1/2).  Runs that exhaust max_samples return censored = True.
    """
    if not 0.0 < threshold < 1.0 or threshold == 0.5:
        raise ValueError("threshold must lie in (0, 1) and differ from 0.5")
    if max_samples < 1:
        raise ValueError("max_samples must be positive")
    table, shape = _aligned_log_ratio(p_null, p_alt, floor)
    bound = math.log(threshold / (1.0 - threshold))
    confirm = threshold > 0.5
    seq = _seed_sequence(seed)
    log_chi = 0.0
    drawn = 0
    while drawn < max_samples:
        take = min(_DECISION_CHUNK, max_samples - drawn)
        records = oracle.sample_binned(truth, take, seq.spawn(1)[0])
        ratios = _record_log_ratios(records, table, shape, floor)
        walk = log_chi + np.cumsum(ratios)
        hits = walk >= bound if confirm else walk <= bound
        if hits.any():
            first = int(np.argmax(hits))
            value = float(walk[first])
            return DecisionResult(drawn + first + 1, False, value,
                                  float(_sigmoid(value)))
        log_chi = float(walk[-1])
        drawn += take
    return DecisionResult(max_samples, True, log_chi, float(_sigmoid(log_chi)))


@dataclass
class StudyResult:
    """Per-trial values of a scalar study statistic with summary moments."""

    values: np.ndarray
    mean: float
    std: float
    trials: int


def haar_tvd_study(photons: int, modes: int, bins: int, gram_a: np.ndarray,
                   gram_b: np.ndarray, trials: int, seed=None) -> StudyResult:
    """TVD between two Gram models over random interferometers.

    Each trial draws a fresh interferometer, builds both exact binned
    distributions on the equipartition into `bins` bins and records their
    total variation distance.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    partition = equipartition(modes, bins)
    input_a = single_photon_input(photons, modes, gram_a)
    input_b = single_photon_input(photons, modes, gram_b)
    seeds = _seed_sequence(seed).spawn(trials)
    values = np.empty(trials)
    for i, child in enumerate(seeds):
        u = haar_unitary(modes, child)
        dist_a = binned_distribution(u, input_a, partition)
        dist_b = binned_distribution(u, input_b, partition)
        values[i] = tvd(dist_a, dist_b)
    std = float(values.std(ddof=1)) if trials > 1 else 0.0
    return StudyResult(values, float(values.mean()), std, trials)


@dataclass
class PowerLawFit:
    prefactor: float
    exponent: float
    residuals: np.ndarray


def powerlaw_fit(points) -> PowerLawFit:
    """Least-squares fit of value = c * x^r on log-log axes.

    Needs at least three strictly positive (x, value) pairs; returns the
    prefactor c, the signed exponent r and the log-space residuals.
    """
    pts = np.asarray(list(points), dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise ValueError("need at least three (x, value) points")
    if pts.min() <= 0:
        raise ValueError("points must be strictly positive")
    logx = np.log(pts[:, 0])
    logy = np.log(pts[:, 1])
    exponent, intercept = np.polyfit(logx, logy, 1)
    residuals = logy - (intercept + exponent * logx)
    return PowerLawFit(float(np.exp(intercept)), float(exponent), residuals)


@dataclass
class LossSpeedupResult:
    """Validation-time ratios T_0 / T_l for analyses keeping up to l lost photons."""

    l_values: tuple[int, ...]
    mean_times: np.ndarray
    ratios: np.ndarray
    per_unitary_ratios: np.ndarray
    censored_fraction: np.ndarray
    times: np.ndarray = field(repr=False)


def loss_speedup_study(photons: int, modes: int, x_alt: float,
                       transmissivity: float, l_max: int, trials: int,
                       runs_per_trial: int, seed=None, *,
                       threshold: float = 0.05,
                       max_samples: int = DEFAULT_MAX_SAMPLES,
                       floor: float = DEFAULT_FLOOR) -> LossSpeedupResult:
    """Value of lossy events when rejecting the ideal model.

    For each interferometer the null (indistinguishable) and alternative
    (overlap x_alt) lossy models share a single subset holding the first
    floor(m/2) modes plus the lost-photon bin.  Every run draws one sample
    stream from the alternative truth and, for each cutoff l, measures the
    total shots drawn until the analysis that keeps only events with at
    most l lost photons rejects the null at p_null < threshold.  Discarded
    events still consume shots, which is what makes the l = 0 analysis
    slow; the lost-photon count of an event is hypothesis-independent, so
    skipped events carry likelihood ratio exactly 1.

    Censored runs enter the averages at max_samples and are tallied in
    censored_fraction.
    """
    if not 0 <= l_max <= photons:
        raise ValueError("need 0 <= l_max <= photons")
    if trials < 1 or runs_per_trial < 1:
        raise ValueError("trials and runs_per_trial must be positive")
    if not 0.0 < threshold < 0.5:
        raise ValueError("threshold must be a rejection level below 0.5")
    partition = Partition((tuple(range(1, modes // 2 + 1)),), modes)
    ideal = single_photon_input(photons, modes, gram_interpolation(photons, 1.0))
    alt = single_photon_input(photons, modes,
                              gram_interpolation(photons, x_alt))
    l_values = tuple(range(l_max + 1))
    bound = math.log(threshold / (1.0 - threshold))
    times = np.zeros((trials, runs_per_trial, len(l_values)), dtype=np.int64)
    censored = np.zeros((trials, runs_per_trial, len(l_values)), dtype=bool)
    trial_seeds = _seed_sequence(seed).spawn(trials)
    for t, trial_seq in enumerate(trial_seeds):
        u_seq, runs_seq = trial_seq.spawn(2)
        u = haar_unitary(modes, u_seq)
        p0 = lossy_binned_distribution(u, ideal, partition, transmissivity)
        pa = lossy_binned_distribution(u, alt, partition, transmissivity)
        table, shape = _aligned_log_ratio(p0, pa, floor)
        flat_table = table.ravel()
        run_seeds = runs_seq.spawn(runs_per_trial)
        for r, run_seq in enumerate(run_seeds):
            stops, cens = _multi_cutoff_run(pa, flat_table, shape, l_values,
                                            bound, max_samples, run_seq)
            times[t, r] = stops
            censored[t, r] = cens
    mean_times = times.reshape(-1, len(l_values)).mean(axis=0)
    ratios = mean_times[0] / mean_times
    per_unitary = times.mean(axis=1)
    per_unitary_ratios = per_unitary[:, :1] / per_unitary
    return LossSpeedupResult(
        l_values=l_values,
        mean_times=mean_times,
        ratios=ratios,
        per_unitary_ratios=per_unitary_ratios,
        censored_fraction=censored.reshape(-1, len(l_values)).mean(axis=0),
        times=times,
    )


def _multi_cutoff_run(truth: BinnedDistribution, flat_table: np.ndarray,
                      shape, l_values, bound: float, max_samples: int,
                      seed_seq) -> tuple[np.ndarray, np.ndarray]:
    """One sample stream, analyzed at every lost-photon cutoff at once."""
    count = len(l_values)
    offsets = np.zeros(count)
    stops = np.full(count, -1, dtype=np.int64)
    drawn = 0
    while drawn < max_samples and (stops < 0).any():
        take = min(_DECISION_CHUNK, max_samples - drawn)
        records = oracle.sample_binned(truth, take, seed_seq.spawn(1)[0])
        flat = np.ravel_multi_index(
            tuple(records[:, z] for z in range(len(shape))), shape)
        contrib = flat_table[flat]
        lost = records[:, -1]
        for i, cutoff in enumerate(l_values):
            if stops[i] >= 0:
                continue
            walk = np.where(lost <= cutoff, contrib, 0.0).cumsum() + offsets[i]
            hits = walk <= bound
            if hits.any():
                stops[i] = drawn + int(np.argmax(hits)) + 1
            else:
                offsets[i] = walk[-1]
        drawn += take
    cens = stops < 0
    stops[cens] = max_samples
    return stops, cens


def read_samples(path) -> SampleSet:
    """Read a line-oriented samples file.

    First line is a JSON header {"kind": "raw_occupations", "m": ...} or
    {"kind": "binned_counts", "K": ...}; every further nonempty line is a
    JSON integer array of the declared width.  An empty file is a valid
    empty binned sample set.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    header = None
    width = None
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestionError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
        if header is None:
            if not isinstance(obj, dict) or "kind" not in obj:
                raise IngestionError(f"line {lineno}: expected a header object "
                                     "with a 'kind' field")
            kind = obj["kind"]
            if kind == _RAW:
                width_key = "m"
            elif kind == _BINNED:
                width_key = "K"
            else:
                raise IngestionError(f"line {lineno}: unknown kind {kind!r}")
            if width_key not in obj:
                raise IngestionError(f"line {lineno}: header misses {width_key!r}")
            extra = set(obj) - {"kind", width_key}
            if extra:
                raise IngestionError(f"line {lineno}: unknown header fields "
                                     f"{sorted(extra)}")
            width = int(obj[width_key])
            if width < 1:
                raise IngestionError(f"line {lineno}: width must be positive")
            header = kind
            continue
        if (not isinstance(obj, list)
                or not all(isinstance(x, int) and x >= 0 for x in obj)):
            raise IngestionError(f"line {lineno}: expected an array of "
                                 "nonnegative integers")
        if len(obj) != width:
            raise IngestionError(f"line {lineno}: record has {len(obj)} entries, "
                                 f"header declared {width}")
        records.append(obj)
    if header is None:
        return SampleSet(_BINNED, np.zeros((0, 1), dtype=np.int64))
    if not records:
        return SampleSet(header, np.zeros((0, width), dtype=np.int64))
    return SampleSet(header, np.asarray(records, dtype=np.int64))


def format_samples(samples: SampleSet) -> str:
    """Render the line-oriented samples format (header plus one record per line)."""
    key = "m" if samples.kind == _RAW else "K"
    lines = [json.dumps({"kind": samples.kind, key: samples.width})]
    lines.extend(json.dumps([int(x) for x in row]) for row in samples.records)
    return "\n".join(lines) + "\n"


def write_samples(path, samples: SampleSet) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_samples(samples))
