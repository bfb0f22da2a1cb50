"""Command-line interface.

Every subcommand reads a JSON config file, writes its result to stdout or
``--out``, and reports failures as a single JSON object on stderr with a
stable exit code: 2 for config errors, 3 for numerical failures, 4 for
malformed input data.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .closedform import (
    haar_average_bosonic,
    haar_average_distinguishable,
    odd_modes_bosonic,
    odd_modes_distinguishable,
    single_mode_bosonic,
    single_mode_distinguishable,
)
from .errors import ConfigError, IngestionError, NumericalError
from .linalg import embed_uniform_loss, fourier_matrix, haar_unitary, unitary_from_json
from .noise import (
    dark_counts_convolve,
    gram_interpolation,
    lossy_binned_distribution,
    validate_gram,
)
from .oracle import fock_binned_distribution, sample_binned
from .partitions import (
    BinnedDistribution,
    Partition,
    approx_binned_distribution,
    binned_distribution,
    equipartition,
    single_photon_input,
)
from .validation import (
    SampleSet,
    bayes_update,
    bin_samples,
    format_samples,
    haar_tvd_study,
    loss_speedup_study,
    read_samples,
    samples_to_decision,
)

_TOP_KEYS = {
    "n", "m", "unitary", "partition", "noise", "alternative_noise",
    "method", "threshold", "max_samples", "floor", "seed", "study",
}
_UNITARY_KEYS = {"kind", "seed", "path"}
_PARTITION_KEYS = {"kind", "K", "subsets"}
_NOISE_KEYS = {"x", "gram", "transmissivity", "dark_count_p"}
_METHOD_KEYS = {"kind", "beta", "seed"}
_STUDY_KEYS = {
    "sweep", "values", "trials", "truth",
    "l_max", "runs_per_trial", "x_alt", "transmissivity",
}
_FOURIER_FORMS = {
    "single-mode-bosonic": single_mode_bosonic,
    "single-mode-distinguishable": single_mode_distinguishable,
    "odd-modes-bosonic": odd_modes_bosonic,
    "odd-modes-distinguishable": odd_modes_distinguishable,
}


def _check_keys(obj: dict, allowed: set, context: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(f"unknown {context} keys: {', '.join(unknown)}")


def _require_dict(obj, context: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{context} must be a JSON object")
    return obj


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            cfg = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    _require_dict(cfg, "config")
    _check_keys(cfg, _TOP_KEYS, "config")
    return cfg


def _config_int(cfg: dict, key: str, minimum: int = 1):
    if key not in cfg:
        raise ConfigError(f"config requires '{key}'")
    value = cfg[key]
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(f"'{key}' must be an integer >= {minimum}")
    return value


def _seed_chain(cfg: dict, override) -> tuple[int, list[int]]:
    """Resolve the master seed and derive per-stage integer subseeds."""
    master = override if override is not None else cfg.get("seed")
    if master is None:
        master = np.random.SeedSequence().entropy
    if not isinstance(master, int) or isinstance(master, bool) or master < 0:
        raise ConfigError("'seed' must be a nonnegative integer")
    subseeds = np.random.SeedSequence(master).generate_state(8, dtype=np.uint64)
    return master, [int(s) for s in subseeds]


def _pin_seed(cfg: dict, args) -> tuple[dict, int, list[int]]:
    """Fix the master seed in the config so repeated model builds agree."""
    master, subseeds = _seed_chain(cfg, getattr(args, "seed", None))
    pinned = dict(cfg)
    pinned["seed"] = master
    return pinned, master, subseeds


def build_unitary(cfg: dict, modes: int, seed: int) -> np.ndarray:
    spec = _require_dict(cfg.get("unitary", {"kind": "haar"}), "'unitary'")
    _check_keys(spec, _UNITARY_KEYS, "'unitary'")
    kind = spec.get("kind", "haar")
    if kind == "haar":
        return haar_unitary(modes, spec.get("seed", seed))
    if kind == "fourier":
        return fourier_matrix(modes)
    if kind == "file":
        if "path" not in spec:
            raise ConfigError("unitary kind 'file' requires 'path'")
        try:
            with open(spec["path"], "r", encoding="utf-8") as handle:
                matrix = unitary_from_json(json.load(handle))
        except OSError as exc:
            raise IngestionError(f"cannot read unitary file: {exc}") from exc
        except (ValueError, KeyError, TypeError) as exc:
            raise IngestionError(f"unitary file is malformed: {exc}") from exc
        if matrix.shape[0] != modes:
            raise ConfigError(
                f"unitary file has dimension {matrix.shape[0]}, config says m={modes}")
        return matrix
    raise ConfigError(f"unknown unitary kind '{kind}'")


def build_partition(cfg: dict, modes: int) -> Partition:
    spec = _require_dict(cfg.get("partition", {"kind": "equipartition", "K": 1}),
                         "'partition'")
    _check_keys(spec, _PARTITION_KEYS, "'partition'")
    if "subsets" in spec:
        if spec.get("kind", "explicit") != "explicit":
            raise ConfigError("'subsets' requires partition kind 'explicit'")
        try:
            return Partition(spec["subsets"], modes)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"invalid partition: {exc}") from exc
    kind = spec.get("kind", "equipartition")
    if kind != "equipartition":
        raise ConfigError(f"unknown partition kind '{kind}'")
    bins = spec.get("K")
    if not isinstance(bins, int) or isinstance(bins, bool) or bins < 1:
        raise ConfigError("equipartition requires integer 'K' >= 1")
    try:
        return equipartition(modes, bins)
    except ValueError as exc:
        raise ConfigError(f"invalid partition: {exc}") from exc


def _noise_section(cfg: dict, key: str, required: bool = False) -> dict:
    if key not in cfg:
        if required:
            raise ConfigError(f"config requires '{key}'")
        return {}
    spec = _require_dict(cfg[key], f"'{key}'")
    _check_keys(spec, _NOISE_KEYS, f"'{key}'")
    if "x" in spec and "gram" in spec:
        raise ConfigError(f"'{key}' must give either 'x' or 'gram', not both")
    return spec


def build_gram(noise: dict, photons: int) -> np.ndarray:
    if "gram" in noise:
        spec = _require_dict(noise["gram"], "'gram'")
        _check_keys(spec, {"re", "im"}, "'gram'")
        try:
            gram = np.asarray(spec["re"], dtype=float) \
                + 1j * np.asarray(spec.get("im", np.zeros((photons, photons))),
                                  dtype=float)
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"invalid gram matrix: {exc}") from exc
        if gram.shape != (photons, photons):
            raise ConfigError(f"gram matrix must be {photons}x{photons}")
        try:
            validate_gram(gram)
        except ValueError as exc:
            raise ConfigError(f"invalid gram matrix: {exc}") from exc
        return gram
    x = noise.get("x", 1.0)
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not 0.0 <= x <= 1.0:
        raise ConfigError("'x' must be a number in [0, 1]")
    return gram_interpolation(photons, float(x))


def _noise_scalars(noise: dict) -> tuple[float, float]:
    t = noise.get("transmissivity", 1.0)
    if isinstance(t, bool) or not isinstance(t, (int, float)) or not 0.0 <= t <= 1.0:
        raise ConfigError("'transmissivity' must be a number in [0, 1]")
    dark = noise.get("dark_count_p", 0.0)
    if isinstance(dark, bool) or not isinstance(dark, (int, float)) \
            or not 0.0 <= dark < 1.0:
        raise ConfigError("'dark_count_p' must be a number in [0, 1)")
    return float(t), float(dark)


def _method_section(cfg: dict, args) -> dict:
    spec = _require_dict(cfg.get("method", {}), "'method'")
    _check_keys(spec, _METHOD_KEYS, "'method'")
    merged = dict(spec)
    if getattr(args, "method", None) is not None:
        merged["kind"] = args.method
    if getattr(args, "beta", None) is not None:
        merged["beta"] = args.beta
    kind = merged.get("kind", "ryser")
    if kind not in ("ryser", "glynn"):
        raise ConfigError(f"unknown method kind '{kind}'")
    if kind == "glynn":
        beta = merged.get("beta")
        if isinstance(beta, bool) or not isinstance(beta, (int, float)) or beta <= 0:
            raise ConfigError("method 'glynn' requires positive 'beta'")
    merged["kind"] = kind
    return merged


def model_distribution(cfg: dict, args, noise_key: str = "noise",
                       noise_override: dict | None = None) -> BinnedDistribution:
    """Build the binned distribution a config describes, noise included."""
    photons = _config_int(cfg, "n")
    modes = _config_int(cfg, "m")
    if photons > modes:
        raise ConfigError("'n' must not exceed 'm'")
    _, subseeds = _seed_chain(cfg, getattr(args, "seed", None))
    unitary = build_unitary(cfg, modes, subseeds[0])
    partition = build_partition(cfg, modes)
    noise = noise_override if noise_override is not None \
        else _noise_section(cfg, noise_key)
    gram = build_gram(noise, photons)
    transmissivity, dark_p = _noise_scalars(noise)
    method = _method_section(cfg, args)
    spec = single_photon_input(photons, modes, gram)

    if transmissivity < 1.0:
        dist = lossy_binned_distribution(
            unitary, spec, partition, transmissivity,
            method=method["kind"], beta=method.get("beta"),
            seed=method.get("seed", subseeds[1]))
        dark_sizes = partition.sizes + (0,)
    elif method["kind"] == "glynn":
        dist = approx_binned_distribution(
            unitary, spec, partition, method["beta"],
            seed=method.get("seed", subseeds[1]))
        dark_sizes = partition.sizes
    else:
        dist = binned_distribution(unitary, spec, partition)
        dark_sizes = partition.sizes

    if dark_p > 0.0:
        dist = dark_counts_convolve(dist, dark_p, dark_sizes)
    return dist


def _x_model_states(photons: int, x: float) -> np.ndarray:
    """Internal states sharing overlap sqrt(x): one common axis per photon."""
    states = np.zeros((photons, photons + 1), dtype=complex)
    states[:, 0] = np.sqrt(x)
    for j in range(photons):
        states[j, j + 1] = np.sqrt(1.0 - x)
    return states


def _states_from_gram(gram: np.ndarray) -> np.ndarray:
    # Eigenfactorization instead of Cholesky so singular grams (x = 1) work.
    vals, vecs = np.linalg.eigh(gram)
    vals = np.clip(vals, 0.0, None)
    return np.conj(vecs * np.sqrt(vals)[None, :])


def _json_text(obj: dict) -> str:
    return json.dumps(obj, indent=2)


def _write_output(text: str, out_path) -> None:
    if out_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
            if not text.endswith("\n"):
                handle.write("\n")


def _csv_lines(header: str, rows, seed: int) -> str:
    lines = [f"# seed={seed}", header]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, float):
                cells.append("%.17g" % cell)
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def cmd_dist(args) -> str:
    cfg, _, _ = _pin_seed(load_config(args.config), args)
    return _json_text(model_distribution(cfg, args).to_json())


def cmd_validate(args) -> str:
    cfg, master, _ = _pin_seed(load_config(args.config), args)
    null_dist = model_distribution(cfg, args, "noise")
    alt_noise = _noise_section(cfg, "alternative_noise", required=True)
    alt_dist = model_distribution(cfg, args, noise_override=alt_noise)

    samples = read_samples(args.samples)
    if samples.kind == "raw_occupations":
        if len(samples) and samples.width != _config_int(cfg, "m"):
            raise IngestionError(
                f"raw samples have {samples.width} modes, config says m={cfg['m']}")
        partition = build_partition(cfg, cfg["m"])
        transmissivity, _ = _noise_scalars(_noise_section(cfg, "noise"))
        total = cfg["n"] if transmissivity < 1.0 else None
        samples = bin_samples(samples, partition, total_photons=total)
    elif len(samples) and samples.width != null_dist.bin_count:
        raise IngestionError(
            f"binned samples have {samples.width} bins, model has "
            f"{null_dist.bin_count}")

    floor = cfg.get("floor", 1e-12)
    report = bayes_update(samples, null_dist, alt_dist, floor=floor, seed=master)
    return _json_text(report.to_json())


def cmd_sample(args) -> str:
    cfg, _, subseeds = _pin_seed(load_config(args.config), args)
    if args.count < 1:
        raise ConfigError("--count must be a positive integer")
    dist = model_distribution(cfg, args)
    counts = sample_binned(dist, args.count, subseeds[2])
    return format_samples(SampleSet("binned_counts", counts))


def cmd_oracle(args) -> str:
    cfg, _, subseeds = _pin_seed(load_config(args.config), args)
    photons = _config_int(cfg, "n")
    modes = _config_int(cfg, "m")
    if photons > modes:
        raise ConfigError("'n' must not exceed 'm'")
    unitary = build_unitary(cfg, modes, subseeds[0])
    partition = build_partition(cfg, modes)
    noise = _noise_section(cfg, "noise")
    transmissivity, dark_p = _noise_scalars(noise)
    if "gram" in noise:
        states = _states_from_gram(build_gram(noise, photons))
    else:
        x = noise.get("x", 1.0)
        if isinstance(x, bool) or not isinstance(x, (int, float)) \
                or not 0.0 <= x <= 1.0:
            raise ConfigError("'x' must be a number in [0, 1]")
        states = _x_model_states(photons, float(x))

    if transmissivity < 1.0:
        unitary = embed_uniform_loss(unitary, transmissivity)
        subsets = list(partition.subsets)
        subsets.append(tuple(range(modes + 1, 2 * modes + 1)))
        partition = Partition(subsets, 2 * modes)
        dark_sizes = partition.sizes[:-1] + (0,)
    else:
        dark_sizes = partition.sizes

    dist = fock_binned_distribution(unitary, states, partition)
    if dark_p > 0.0:
        dist = dark_counts_convolve(dist, dark_p, dark_sizes)
    return _json_text(dist.to_json())


def cmd_fourier(args) -> str:
    cfg = load_config(args.config)
    photons = _config_int(cfg, "n")
    form = _FOURIER_FORMS[args.form]
    if args.form.startswith("single-mode"):
        dist = form(photons, _config_int(cfg, "m"))
    else:
        dist = form(photons)
    dist = BinnedDistribution(photons, dist.probabilities, dist.bins,
                              {"kind": args.form})
    return _json_text(dist.to_json())


def cmd_haar_avg(args) -> str:
    cfg = load_config(args.config)
    photons = _config_int(cfg, "n")
    modes = _config_int(cfg, "m")
    if photons > modes:
        raise ConfigError("'n' must not exceed 'm'")
    partition = build_partition(cfg, modes)
    form = haar_average_bosonic if args.kind == "bosonic" \
        else haar_average_distinguishable
    dist = form(photons, partition.sizes, modes)
    return _json_text(
        BinnedDistribution(photons, dist.probabilities, partition.subsets,
                           {"kind": f"haar-average-{args.kind}"}).to_json())


def _study_section(cfg: dict, required_keys: set) -> dict:
    spec = _require_dict(cfg.get("study", {}), "'study'")
    _check_keys(spec, _STUDY_KEYS, "'study'")
    missing = sorted(required_keys - set(spec))
    if missing:
        raise ConfigError(f"study requires keys: {', '.join(missing)}")
    return spec


def _study_values(spec: dict) -> list:
    values = spec["values"]
    if not isinstance(values, list) or not values:
        raise ConfigError("study 'values' must be a nonempty list")
    return values


def _sweep_grams(cfg: dict, sweep: str, value, photons: int):
    """Gram pair for one sweep point; the x sweep varies the alternative."""
    gram_a = build_gram(_noise_section(cfg, "noise"), photons)
    if sweep == "x":
        if isinstance(value, bool) or not isinstance(value, (int, float)) \
                or not 0.0 <= value <= 1.0:
            raise ConfigError("x sweep values must be numbers in [0, 1]")
        gram_b = gram_interpolation(photons, float(value))
    else:
        gram_b = build_gram(_noise_section(cfg, "alternative_noise",
                                           required=True), photons)
    return gram_a, gram_b


def _sweep_modes(cfg: dict, sweep: str, value) -> int:
    if sweep == "m":
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise ConfigError("m sweep values must be positive integers")
        return value
    return _config_int(cfg, "m")


def cmd_tvd(args) -> str:
    cfg, master, subseeds = _pin_seed(load_config(args.config), args)
    photons = _config_int(cfg, "n")
    study = _study_section(cfg, {"sweep", "values", "trials"})
    sweep = study["sweep"]
    if sweep not in ("m", "x"):
        raise ConfigError("study 'sweep' must be 'm' or 'x'")
    trials = study["trials"]
    if not isinstance(trials, int) or isinstance(trials, bool) or trials < 1:
        raise ConfigError("study 'trials' must be a positive integer")
    bins = build_partition(cfg, _config_int(cfg, "m")).bin_count

    rows = []
    for index, value in enumerate(_study_values(study)):
        modes = _sweep_modes(cfg, sweep, value)
        if photons > modes:
            raise ConfigError("'n' must not exceed swept 'm'")
        gram_a, gram_b = _sweep_grams(cfg, sweep, value, photons)
        result = haar_tvd_study(photons, modes, bins, gram_a, gram_b, trials,
                                seed=subseeds[3] + index)
        label = photons / modes if sweep == "m" else float(value)
        rows.append((label, result.mean, result.std, result.trials))
    return _csv_lines(f"{'rho' if sweep == 'm' else 'x'},mean,std,trials",
                      rows, master)


def cmd_estimate_samples(args) -> str:
    cfg, master, subseeds = _pin_seed(load_config(args.config), args)
    photons = _config_int(cfg, "n")
    study = _study_section(cfg, {"sweep", "values", "trials", "truth"})
    sweep = study["sweep"]
    if sweep not in ("m", "x"):
        raise ConfigError("study 'sweep' must be 'm' or 'x'")
    truth_key = study["truth"]
    if truth_key not in ("null", "alternative"):
        raise ConfigError("study 'truth' must be 'null' or 'alternative'")
    trials = study["trials"]
    if not isinstance(trials, int) or isinstance(trials, bool) or trials < 1:
        raise ConfigError("study 'trials' must be a positive integer")
    threshold = cfg.get("threshold", 0.05)
    max_samples = cfg.get("max_samples", 100_000)
    floor = cfg.get("floor", 1e-12)
    bins = build_partition(cfg, _config_int(cfg, "m")).bin_count

    rows = []
    for index, value in enumerate(_study_values(study)):
        modes = _sweep_modes(cfg, sweep, value)
        if photons > modes:
            raise ConfigError("'n' must not exceed swept 'm'")
        gram_a, gram_b = _sweep_grams(cfg, sweep, value, photons)
        partition = equipartition(modes, bins)
        seq = np.random.SeedSequence(subseeds[4] + index)
        used = []
        censored = 0
        for trial_seq in seq.spawn(trials):
            u_seed, run_seed = trial_seq.spawn(2)
            unitary = haar_unitary(modes, u_seed)
            spec_a = single_photon_input(photons, modes, gram_a)
            spec_b = single_photon_input(photons, modes, gram_b)
            p_null = binned_distribution(unitary, spec_a, partition)
            p_alt = binned_distribution(unitary, spec_b, partition)
            truth = p_null if truth_key == "null" else p_alt
            outcome = samples_to_decision(truth, p_null, p_alt, threshold,
                                          max_samples, run_seed, floor=floor)
            if outcome.censored:
                censored += 1
            else:
                used.append(outcome.samples_used)
        label = photons / modes if sweep == "m" else float(value)
        mean = float(np.mean(used)) if used else float("nan")
        std = float(np.std(used)) if used else float("nan")
        rows.append((label, mean, std, len(used)))
    return _csv_lines(f"{'rho' if sweep == 'm' else 'x'},mean,std,trials",
                      rows, master)


def cmd_loss_speedup(args) -> str:
    cfg, master, subseeds = _pin_seed(load_config(args.config), args)
    photons = _config_int(cfg, "n")
    modes = _config_int(cfg, "m")
    study = _study_section(cfg, {"l_max", "trials", "runs_per_trial",
                                 "x_alt", "transmissivity"})
    for key in ("l_max", "trials", "runs_per_trial"):
        value = study[key]
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise ConfigError(f"study '{key}' must be a nonnegative integer")
    threshold = cfg.get("threshold", 0.05)
    max_samples = cfg.get("max_samples", 100_000)
    floor = cfg.get("floor", 1e-12)

    result = loss_speedup_study(
        photons, modes, study["x_alt"], study["transmissivity"],
        study["l_max"], study["trials"], study["runs_per_trial"],
        seed=subseeds[5], threshold=threshold, max_samples=max_samples,
        floor=floor)
    rows = []
    for idx, l_value in enumerate(result.l_values):
        per_unitary = result.per_unitary_ratios[:, idx]
        rows.append((l_value, float(result.ratios[idx]),
                     float(np.std(per_unitary)), len(per_unitary)))
    return _csv_lines("l,ratio,std,trials", rows, master)


# Library-level ValueErrors triggered by config values map to the config
# exit code; the specific classes are matched first.
_ERROR_CODES = (
    (ConfigError, "config", 2),
    (IngestionError, "ingestion", 4),
    (NumericalError, "numerical", 3),
    (ValueError, "config", 2),
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bosonbin",
        description="Binned photon-count distributions and sample validation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(cmd, **kwargs):
        p = sub.add_parser(cmd, **kwargs)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--seed", type=int, default=None,
                       help="master seed, overrides the config")
        return p

    p = common("dist", help="binned distribution of the configured model")
    p.add_argument("--method", choices=["ryser", "glynn"], default=None)
    p.add_argument("--beta", type=float, default=None,
                   help="grid error budget for the glynn method")

    p = common("validate", help="Bayesian model comparison on recorded samples")
    p.add_argument("--samples", required=True, help="sample file to test")
    p.add_argument("--method", choices=["ryser", "glynn"], default=None)
    p.add_argument("--beta", type=float, default=None)

    p = common("sample", help="draw binned counts from the configured model")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--method", choices=["ryser", "glynn"], default=None)
    p.add_argument("--beta", type=float, default=None)

    common("oracle", help="Fock-space reference distribution (n <= 3)")

    p = common("fourier", help="closed-form distribution on the Fourier unitary")
    p.add_argument("--form", choices=sorted(_FOURIER_FORMS), required=True)

    p = common("haar-avg", help="Haar-averaged binned distribution")
    p.add_argument("--kind", choices=["bosonic", "distinguishable"],
                   required=True)

    common("tvd", help="distance between noise models over Haar unitaries")
    common("estimate-samples", help="samples needed to reach a verdict")
    common("loss-speedup", help="decision speedup from keeping lossy events")
    return parser


_COMMANDS = {
    "dist": cmd_dist,
    "validate": cmd_validate,
    "sample": cmd_sample,
    "oracle": cmd_oracle,
    "fourier": cmd_fourier,
    "haar-avg": cmd_haar_avg,
    "tvd": cmd_tvd,
    "estimate-samples": cmd_estimate_samples,
    "loss-speedup": cmd_loss_speedup,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = _COMMANDS[args.command](args)
    except tuple(exc for exc, _, _ in _ERROR_CODES) as exc:
        for exc_type, label, code in _ERROR_CODES:
            if isinstance(exc, exc_type):
                payload = {"error": label, "message": str(exc)}
                sys.stderr.write(json.dumps(payload) + "\n")
                return code
        raise
    _write_output(text, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
