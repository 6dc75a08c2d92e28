"""Givens-rotation beamforming feedback quantization (C++ core)."""

from ._grfb import (
    ConfigError,
    CorruptMessage,
    NumericalError,
    ValidationError,
    decode,
    encode,
    evaluate_quantizer,
    gr_decompose,
    gr_reconstruct,
    huffman_codewords,
    huffman_lengths,
    lloyd_train,
    parameter_names,
    phase_normalize,
    phi_grid,
    psi_grid,
    run_campaign,
    sample_angles,
    svd,
)

__all__ = [
    "ConfigError",
    "CorruptMessage",
    "NumericalError",
    "ValidationError",
    "decode",
    "encode",
    "evaluate_quantizer",
    "gr_decompose",
    "gr_reconstruct",
    "huffman_codewords",
    "huffman_lengths",
    "lloyd_train",
    "parameter_names",
    "phase_normalize",
    "phi_grid",
    "psi_grid",
    "run_campaign",
    "sample_angles",
    "svd",
]
