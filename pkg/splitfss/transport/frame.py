# ========================================================================== #
#                                                                            #
#    SPLITFSS - Split learning with function secret sharing.                 #
#                                                                            #
#    Copyright (C) 2024  SplitFSS developers                                 #
#                                                                            #
#    This program is free software: you can redistribute it and/or modify    #
#    it under the terms of the GNU General Public License as published by    #
#    the Free Software Foundation, either version 3 of the License, or       #
#    (at your option) any later version.                                     #
#                                                                            #
#    This program is distributed in the hope that it will be useful,         #
#    but WITHOUT ANY WARRANTY; without even the implied warranty of          #
#    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the           #
#    GNU General Public License for more details.                            #
#                                                                            #
#    You should have received a copy of the GNU General Public License       #
#    along with this program.  If not, see <https://www.gnu.org/licenses/>.  #
#                                                                            #
# ========================================================================== #


import enum
import struct
import dataclasses

import numpy as np

from .errors import HandshakeError
from .errors import FrameError


# =====
MAGIC = b"SFSS"
VERSION = 1
MAX_PAYLOAD = (1 << 30)

# magic, version, type, session id, payload length; little-endian
_HEADER = struct.Struct("<4sBBQQ")
HEADER_SIZE = _HEADER.size


class MsgType(enum.IntEnum):
    SYNC = 1
    X_PUB = 2
    LABEL_SHARE = 3
    GRAD_SHARE = 4
    LOSS_SHARE = 5
    KEY_BLOB = 6
    TRIPLE_BLOB = 7
    METRIC = 8
    CLOSE = 9
    INPUT_SHARE = 10
    OUTPUT_SHARE = 11
    OPEN = 12


@dataclasses.dataclass(frozen=True)
class Frame:
    msg_type: MsgType
    session_id: int
    payload: bytes = b""

    @property
    def size(self) -> int:
        return HEADER_SIZE + len(self.payload)

    def encode(self) -> bytes:
        if len(self.payload) > MAX_PAYLOAD:
            raise FrameError(f"Payload too large: {len(self.payload)} > {MAX_PAYLOAD} bytes")
        return _HEADER.pack(MAGIC, VERSION, self.msg_type, self.session_id, len(self.payload)) + self.payload


def parse_header(header: bytes) -> tuple[MsgType, int, int]:
    if len(header) != HEADER_SIZE:
        raise FrameError(f"Frame header must be {HEADER_SIZE} bytes, got {len(header)}")
    (magic, version, raw_type, session_id, length) = _HEADER.unpack(header)
    if magic != MAGIC:
        raise FrameError(f"Bad frame magic: {magic!r}")
    if version != VERSION:
        raise HandshakeError(f"Protocol version mismatch: peer speaks v{version}, we speak v{VERSION}")
    try:
        msg_type = MsgType(raw_type)
    except ValueError:
        raise FrameError(f"Unknown message type: {raw_type}") from None
    if length > MAX_PAYLOAD:
        raise FrameError(f"Payload too large: {length} > {MAX_PAYLOAD} bytes")
    return (msg_type, session_id, length)


def decode_frame(data: bytes) -> Frame:
    (msg_type, session_id, length) = parse_header(data[:HEADER_SIZE])
    if len(data) - HEADER_SIZE != length:
        raise FrameError(f"Payload length mismatch: header says {length}, got {len(data) - HEADER_SIZE}")
    return Frame(msg_type, session_id, data[HEADER_SIZE:])


# =====
def encode_arrays(arrays: list[np.ndarray], dtype: type) -> bytes:
    """ Raw little-endian row-major elements, no shape header. """

    le = np.dtype(dtype).newbyteorder("<")
    return b"".join(np.ascontiguousarray(array, dtype=le).tobytes() for array in arrays)


def decode_arrays(payload: bytes, shapes: list[tuple[int, ...]], dtype: type) -> list[np.ndarray]:
    le = np.dtype(dtype).newbyteorder("<")
    sizes = [int(np.prod(shape, dtype=np.int64)) for shape in shapes]
    if sum(sizes) * le.itemsize != len(payload):
        raise FrameError(f"Payload of {len(payload)} bytes doesn't hold tensors {shapes}")
    flat = np.frombuffer(payload, dtype=le).astype(dtype)
    arrays: list[np.ndarray] = []
    offset = 0
    for (shape, size) in zip(shapes, sizes):
        arrays.append(flat[offset:offset + size].reshape(shape))
        offset += size
    return arrays
