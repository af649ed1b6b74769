from pathlib import Path
from typing import Final

import msgspec
import numpy as np
import structlog

from wiclab.exception import CheckpointError

from .function import ParamFunction, Topology

__all__ = (
    "CheckpointHeader",
    "decode_checkpoint",
    "encode_checkpoint",
    "load_checkpoint",
    "save_checkpoint",
)

MAGIC: Final[bytes] = b"WICLAB\x00\x01"
LENGTH_BYTES: Final[int] = 4

logger = structlog.stdlib.get_logger(__name__)


class CheckpointHeader(msgspec.Struct, frozen=True, kw_only=True):
    kind: str
    topology: Topology
    input_dim: int
    output_dim: int
    hidden: int
    count: int
    skills: int | None = None
    actions: int | None = None


_encoder = msgspec.msgpack.Encoder()
_decoder = msgspec.msgpack.Decoder(CheckpointHeader)


def encode_checkpoint(
    f: ParamFunction,
    kind: str,
    skills: int | None = None,
    actions: int | None = None,
) -> bytes:
    """Magic, uint32 header length, msgpack header, little-endian float64 parameters."""

    header = _encoder.encode(
        CheckpointHeader(
            kind=kind,
            topology=f.topology,
            input_dim=f.input_dim,
            output_dim=f.output_dim,
            hidden=f.hidden,
            count=f.num_params,
            skills=skills,
            actions=actions,
        )
    )

    return b"".join(
        [
            MAGIC,
            len(header).to_bytes(LENGTH_BYTES, "little"),
            header,
            f.params.astype("<f8").tobytes(),
        ]
    )


def decode_checkpoint(data: bytes) -> tuple[CheckpointHeader, ParamFunction]:
    if not data.startswith(MAGIC):
        raise CheckpointError("Not a wiclab checkpoint")

    offset = len(MAGIC)
    size = int.from_bytes(data[offset : offset + LENGTH_BYTES], "little")
    offset += LENGTH_BYTES

    try:
        header = _decoder.decode(data[offset : offset + size])
    except msgspec.DecodeError as e:
        raise CheckpointError(f"Corrupt checkpoint header: {e}") from e

    payload = data[offset + size :]
    if len(payload) != header.count * 8:
        raise CheckpointError(f"Expected {header.count} parameters, found {len(payload) // 8}")

    params = np.frombuffer(payload, dtype="<f8").astype(np.float64)

    return header, ParamFunction(header.topology, header.input_dim, header.output_dim, params, header.hidden)


def save_checkpoint(
    path: Path | str,
    f: ParamFunction,
    kind: str,
    skills: int | None = None,
    actions: int | None = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_checkpoint(f, kind, skills=skills, actions=actions))

    logger.debug("Checkpoint written", path=str(path), kind=kind, count=f.num_params)
    return path


def load_checkpoint(path: Path | str, kind: str | None = None) -> tuple[CheckpointHeader, ParamFunction]:
    header, f = decode_checkpoint(Path(path).read_bytes())

    if kind is not None and header.kind != kind:
        raise CheckpointError(f"Expected a {kind} checkpoint, found {header.kind}")

    return header, f
