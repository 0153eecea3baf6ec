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

from ..errors import MaterialError
from ..fss import DcfKey
from ..fss import serialize_key
from ..fss import deserialize_key


# =====
class MaterialKind(enum.IntEnum):
    MASK = 1
    ELEM = 2
    MATMUL = 3
    RELU = 4
    PARAMS = 5


@dataclasses.dataclass(frozen=True)
class MaterialRequest:
    kind: MaterialKind
    shape: tuple[int, ...]
    other: tuple[int, ...] = ()

    @property
    def with_keys(self) -> bool:
        return (self.kind == MaterialKind.RELU)

    @property
    def for_client(self) -> bool:
        return (self.kind == MaterialKind.MASK)

    def __str__(self) -> str:
        dims = "x".join(map(str, self.shape))
        if self.other:
            dims += " @ " + "x".join(map(str, self.other))
        return f"{self.kind.name.lower()}[{dims}]"


# =====
class _OneTimeUse:
    def __init__(self) -> None:
        self.__used = False

    def use(self) -> None:
        if self.__used:
            raise MaterialError(f"{type(self).__name__} has already been consumed")
        self.__used = True

    @property
    def used(self) -> bool:
        return self.__used


class Mask(_OneTimeUse):
    """ Clear mask for the client or an additive mask share for a server. """

    def __init__(self, alpha: np.ndarray) -> None:
        super().__init__()
        self.alpha = alpha


class Triple(_OneTimeUse):
    def __init__(self, matmul: bool, a: np.ndarray, b: np.ndarray, c: np.ndarray) -> None:
        super().__init__()
        self.matmul = matmul
        self.a = a
        self.b = b
        self.c = c


class ReluMaterial(_OneTimeUse):
    """
    One server's part of a sign gadget over a flat vector of elements:
    shares of the mask alpha, shares of MSB(alpha) as a 0/1 integer,
    a vector of (ring_bits - 1)-bit comparison keys and a selection triple.
    """

    def __init__(self, alpha: np.ndarray, msb: np.ndarray, keys: DcfKey, triple: Triple) -> None:
        super().__init__()
        self.alpha = alpha
        self.msb = msb
        self.keys = keys
        self.triple = triple


class ParamShares(_OneTimeUse):
    def __init__(self, params: dict[str, np.ndarray]) -> None:
        super().__init__()
        self.params = params


Material = (Mask | Triple | ReluMaterial | ParamShares)


def material_kind(material: Material) -> MaterialKind:
    if isinstance(material, Mask):
        return MaterialKind.MASK
    if isinstance(material, Triple):
        return (MaterialKind.MATMUL if material.matmul else MaterialKind.ELEM)
    if isinstance(material, ReluMaterial):
        return MaterialKind.RELU
    return MaterialKind.PARAMS


def check_material(material: Material, request: MaterialRequest) -> None:
    kind = material_kind(material)
    if kind != request.kind:
        raise MaterialError(f"Material desync: expected {request}, got {kind.name.lower()}")
    shape: tuple[int, ...]
    if isinstance(material, (Mask, ReluMaterial)):
        shape = material.alpha.shape
    elif isinstance(material, Triple):
        shape = material.a.shape
        if material.b.shape != request.other:
            raise MaterialError(f"Material desync: expected {request}, got second operand {material.b.shape}")
    else:
        return
    if shape != request.shape:
        raise MaterialError(f"Material desync: expected {request}, got shape {shape}")


# ===== Codec
_U32 = struct.Struct("<I")


class MaterialCodec:
    def __init__(self, ring_bits: int) -> None:
        self.__ring_bits = ring_bits
        self.__dtype = np.dtype({16: np.uint16, 32: np.uint32, 64: np.uint64}[ring_bits])
        self.__le = self.__dtype.newbyteorder("<")

    # =====

    def encode_request(self, request: MaterialRequest) -> bytes:
        return bytes([request.kind]) + self.__encode_shape(request.shape) + self.__encode_shape(request.other)

    def decode_request(self, data: bytes) -> MaterialRequest:
        reader = _Reader(data)
        kind = self.__read_kind(reader)
        shape = self.__read_shape(reader)
        other = self.__read_shape(reader)
        reader.finish()
        return MaterialRequest(kind, shape, other)

    # =====

    def encode(self, material: Material) -> bytes:
        kind = material_kind(material)
        parts = [bytes([kind])]
        if isinstance(material, Mask):
            parts.append(self.__encode_array(material.alpha))
        elif isinstance(material, Triple):
            parts.extend(self.__encode_triple(material))
        elif isinstance(material, ReluMaterial):
            keys = serialize_key(material.keys)
            parts.extend([
                self.__encode_array(material.alpha),
                self.__encode_array(material.msb),
                _U32.pack(len(keys)), keys,
            ])
            parts.extend(self.__encode_triple(material.triple))
        else:
            parts.append(_U32.pack(len(material.params)))
            for (name, value) in material.params.items():
                raw_name = name.encode()
                parts.extend([bytes([len(raw_name)]), raw_name, self.__encode_array(value)])
        return b"".join(parts)

    def decode(self, data: bytes) -> Material:
        reader = _Reader(data)
        kind = self.__read_kind(reader)
        material: Material
        if kind == MaterialKind.MASK:
            material = Mask(self.__read_array(reader))
        elif kind in [MaterialKind.ELEM, MaterialKind.MATMUL]:
            material = self.__read_triple(reader, (kind == MaterialKind.MATMUL))
        elif kind == MaterialKind.RELU:
            alpha = self.__read_array(reader)
            msb = self.__read_array(reader)
            keys_data = reader.take(reader.u32())
            keys = deserialize_key(keys_data, self.__ring_bits, DcfKey)
            if len(keys) != alpha.size:
                raise MaterialError(f"Gadget carries {len(keys)} keys for {alpha.size} elements")
            material = ReluMaterial(alpha, msb, keys, self.__read_triple(reader, False))  # type: ignore[arg-type]
        else:
            params: dict[str, np.ndarray] = {}
            for _ in range(reader.u32()):
                name = reader.take(reader.u8()).decode()
                params[name] = self.__read_array(reader)
            material = ParamShares(params)
        reader.finish()
        return material

    # =====

    def __encode_triple(self, triple: Triple) -> list[bytes]:
        return [self.__encode_array(triple.a), self.__encode_array(triple.b), self.__encode_array(triple.c)]

    def __read_triple(self, reader: "_Reader", matmul: bool) -> Triple:
        return Triple(matmul, self.__read_array(reader), self.__read_array(reader), self.__read_array(reader))

    def __encode_shape(self, shape: tuple[int, ...]) -> bytes:
        return bytes([len(shape)]) + b"".join(_U32.pack(dim) for dim in shape)

    def __read_shape(self, reader: "_Reader") -> tuple[int, ...]:
        return tuple(reader.u32() for _ in range(reader.u8()))

    def __encode_array(self, array: np.ndarray) -> bytes:
        return self.__encode_shape(array.shape) + np.ascontiguousarray(array, dtype=self.__le).tobytes()

    def __read_array(self, reader: "_Reader") -> np.ndarray:
        shape = self.__read_shape(reader)
        size = int(np.prod(shape, dtype=np.int64)) * self.__dtype.itemsize
        return np.frombuffer(reader.take(size), dtype=self.__le).reshape(shape).astype(self.__dtype)

    def __read_kind(self, reader: "_Reader") -> MaterialKind:
        raw = reader.u8()
        try:
            return MaterialKind(raw)
        except ValueError:
            raise MaterialError(f"Unknown material kind: {raw}") from None


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.__data = memoryview(data)
        self.__offset = 0

    def take(self, size: int) -> bytes:
        if self.__offset + size > len(self.__data):
            raise MaterialError(f"Truncated material record: need {size} bytes at offset {self.__offset}")
        chunk = self.__data[self.__offset:self.__offset + size]
        self.__offset += size
        return bytes(chunk)

    def u8(self) -> int:
        return self.take(1)[0]

    def u32(self) -> int:
        return _U32.unpack(self.take(4))[0]

    def finish(self) -> None:
        if self.__offset != len(self.__data):
            raise MaterialError(f"Trailing {len(self.__data) - self.__offset} bytes in material record")
