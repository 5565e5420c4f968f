"""Grant-free uplink detection simulator (C++ core)."""

from ._mmtc import (
    AdaptiveFilter,
    LdpcCode,
    SimConfig,
    algorithm_tags,
    decode_spa,
    extrinsic_llr,
    format_csv,
    generate_channel,
    preset,
    preset_names,
    run_trial,
    snr_to_noise_variance,
    sweep,
    zero_attract,
)

__all__ = [
    "AdaptiveFilter",
    "LdpcCode",
    "SimConfig",
    "algorithm_tags",
    "decode_spa",
    "extrinsic_llr",
    "format_csv",
    "generate_channel",
    "preset",
    "preset_names",
    "run_trial",
    "snr_to_noise_variance",
    "sweep",
    "zero_attract",
]
