"""Binned photon-counting statistics of linear interferometers.

Exact and estimated distributions of photon counts over partitions of
output modes, noise models (partial distinguishability, uniform loss,
dark counts), closed-form references, a brute-force Fock oracle, and
sample-based validation tests.
"""

from .closedform import (
    gaussian_asymptotic,
    haar_average_bosonic,
    haar_average_distinguishable,
    odd_modes_bosonic,
    odd_modes_distinguishable,
    single_mode_bosonic,
    single_mode_distinguishable,
    single_subset_expansion,
    subset_H,
)
from .errors import ConfigError, IngestionError, NumericalError
from .linalg import (
    embed_uniform_loss,
    fourier_matrix,
    haar_unitary,
    is_unitary,
    require_unitary,
    unitary_from_json,
    unitary_to_json,
)
from .noise import (
    dark_counts_convolve,
    extend_with_environment,
    gram_from_states,
    gram_interpolation,
    lossy_binned_distribution,
    validate_gram,
)
from .oracle import (
    distinguishable_outcome_probability,
    fock_binned_distribution,
    ideal_outcome_probability,
    sample_binned,
)
from .partitions import (
    BinnedDistribution,
    CharacteristicGrid,
    InputSpec,
    Partition,
    approx_binned_distribution,
    approx_characteristic_grid,
    binned_distribution,
    characteristic_grid,
    characteristic_value,
    equipartition,
    marginal_distribution,
    phase_mask,
    rank_check_W,
    single_photon_input,
    virtual_interferometer,
)
from .permanent import (
    glynn_trial_count,
    perm_glynn_estimate,
    perm_naive,
    perm_ryser,
    perm_ryser_batch,
)
from .validation import (
    DecisionResult,
    LossSpeedupResult,
    PowerLawFit,
    SampleSet,
    StudyResult,
    ValidationReport,
    bayes_update,
    bin_samples,
    haar_tvd_study,
    loss_speedup_study,
    powerlaw_fit,
    format_samples,
    read_samples,
    samples_to_decision,
    tvd,
    write_samples,
)

__version__ = "0.1.0"
