from .audit import PropertyRecord, audit_codebook
from .codebook import Codebook, RandomizedCode, generate_constant_composition_codebook
from .decoders import (
    BLAME1,
    BLAME2,
    PAIR,
    Decoder,
    DecoderOutput,
    DecoderParams,
    decode_feasibility,
    decode_five_step,
    eta_search,
    feasibility_decoder,
    output_rule,
    sweep_outputs,
    uniqueness_violated,
)
from .example1 import build_erasure_example_code, erasure_example_decode
from .randomized import CompositeCode, compose_two_phase, derandomize

__all__ = [
    "BLAME1",
    "BLAME2",
    "PAIR",
    "Codebook",
    "CompositeCode",
    "Decoder",
    "DecoderOutput",
    "DecoderParams",
    "PropertyRecord",
    "RandomizedCode",
    "audit_codebook",
    "build_erasure_example_code",
    "compose_two_phase",
    "decode_feasibility",
    "decode_five_step",
    "derandomize",
    "erasure_example_decode",
    "eta_search",
    "feasibility_decoder",
    "generate_constant_composition_codebook",
    "output_rule",
    "sweep_outputs",
    "uniqueness_violated",
]
