"""Private information retrieval from noise-protected MDS-coded storage.

Core pieces: exact GF(q) arithmetic (``field``), Cauchy-Vandermonde linear
algebra (``linalg``), the layered retrieval scheme (``protocol``), consensus
error decoding (``robust``), distribution-equality guarantees (``audit``),
private secure distributed matrix multiplication (``psdmm``), the simulation
harness (``sim``), and a command-line frontend (``cli``).
"""

from .field import FieldElement, PrimeField, is_prime, smallest_prime_geq
from .linalg import (
    DecodingMatrix,
    EvaluationPoints,
    FieldMatrix,
    SingularMatrixError,
    build_decoding_matrix,
)
from .protocol import (
    AnswerBundle,
    InfeasibleParamsError,
    MessageSet,
    ProtocolParams,
    QueryBundle,
    QueryNoise,
    ServerStorage,
    StorageNoise,
    achievable_rate,
    comparison_rate_prior,
    decode,
    default_field,
    default_points,
    derive_params,
    encode_storage,
    gen_queries,
    interference_offset,
    recover_messages,
    server_answer,
)
from .robust import (
    DecodingFailure,
    RobustDecoder,
    RobustInstance,
    erase_and_solve,
    robust_solve,
)
from . import audit, psdmm, sim  # noqa: E402  (submodule access convenience)

__all__ = [
    "AnswerBundle",
    "DecodingFailure",
    "DecodingMatrix",
    "EvaluationPoints",
    "FieldElement",
    "FieldMatrix",
    "InfeasibleParamsError",
    "MessageSet",
    "PrimeField",
    "ProtocolParams",
    "QueryBundle",
    "QueryNoise",
    "RobustDecoder",
    "RobustInstance",
    "ServerStorage",
    "SingularMatrixError",
    "StorageNoise",
    "achievable_rate",
    "build_decoding_matrix",
    "comparison_rate_prior",
    "decode",
    "default_field",
    "default_points",
    "derive_params",
    "encode_storage",
    "erase_and_solve",
    "gen_queries",
    "interference_offset",
    "is_prime",
    "recover_messages",
    "robust_solve",
    "server_answer",
    "smallest_prime_geq",
]

__version__ = "0.1.0"
