from .checkpoint import CheckpointHeader, decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint
from .function import DEFAULT_HIDDEN, ParamFunction, Topology
from .functional import log_softmax, softmax
from .gradcheck import gradient_error, numerical_gradient
from .optim import OptimizerKind, OptimizerState, apply_update

__all__ = (
    "DEFAULT_HIDDEN",
    "CheckpointHeader",
    "OptimizerKind",
    "OptimizerState",
    "ParamFunction",
    "Topology",
    "apply_update",
    "decode_checkpoint",
    "encode_checkpoint",
    "gradient_error",
    "load_checkpoint",
    "log_softmax",
    "numerical_gradient",
    "save_checkpoint",
    "softmax",
)
