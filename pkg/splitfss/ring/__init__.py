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


import dataclasses

from typing import Protocol
from typing import Any

import numpy as np

from ..errors import EncodingError


# =====
# Ring tensors are plain numpy arrays of an unsigned dtype as wide as the ring,
# so every +, -, * and @ wraps modulo 2^ring_bits by itself.
RingTensor = np.ndarray

_DTYPES = {
    16: (np.uint16, np.int16),
    32: (np.uint32, np.int32),
    64: (np.uint64, np.int64),
}


# =====
class Numerics(Protocol):
    dtype: Any

    def encode(self, value: Any) -> np.ndarray: ...
    def decode(self, x: np.ndarray) -> np.ndarray: ...
    def const(self, value: float) -> np.ndarray: ...
    def to_signed(self, x: np.ndarray) -> np.ndarray: ...
    def truncate(self, x: np.ndarray) -> np.ndarray: ...
    def zeros(self, shape: tuple[int, ...]) -> np.ndarray: ...
    def sum(self, x: np.ndarray, axis: (int | tuple[int, ...])) -> np.ndarray: ...


# =====
@dataclasses.dataclass(frozen=True)
class FixedPointConfig:
    ring_bits: int = 64
    frac_bits: int = 16

    def __post_init__(self) -> None:
        if self.ring_bits not in _DTYPES:
            raise ValueError(f"Unsupported ring width: {self.ring_bits}")
        if not (0 < self.frac_bits < self.ring_bits // 2):
            raise ValueError(f"Fractional bits must be in (0, {self.ring_bits // 2}), got {self.frac_bits}")

    @property
    def dtype(self) -> Any:
        return _DTYPES[self.ring_bits][0]

    @property
    def sdtype(self) -> Any:
        return _DTYPES[self.ring_bits][1]

    @property
    def scale(self) -> int:
        return (1 << self.frac_bits)

    @property
    def elem_size(self) -> int:
        return self.ring_bits // 8

    @property
    def limit(self) -> float:
        return float(1 << (self.ring_bits - self.frac_bits - 1))

    def as_dict(self) -> dict[str, int]:
        return dataclasses.asdict(self)

    # =====

    def encode(self, value: Any) -> np.ndarray:
        value = np.asarray(value, dtype=np.float64)
        if not np.all(np.isfinite(value)) or np.any(np.abs(value) >= self.limit):
            raise EncodingError(f"Value out of the representable range ±{self.limit:g}"
                                f" for {self.ring_bits}-bit ring with {self.frac_bits} fractional bits")
        scaled = np.rint(value * self.scale).astype(np.int64)
        return scaled.astype(self.sdtype).view(self.dtype)

    def decode(self, x: np.ndarray) -> np.ndarray:
        return self.to_signed(x).astype(np.float64) / self.scale

    def const(self, value: float) -> np.ndarray:
        return self.encode(value)

    def from_int(self, value: Any) -> np.ndarray:
        # Plain integers (bits, counters) embedded without scaling
        return np.asarray(value, dtype=np.int64).astype(self.sdtype).view(self.dtype)

    def to_signed(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=self.dtype).view(self.sdtype)

    def truncate(self, x: np.ndarray) -> np.ndarray:
        return (self.to_signed(x) >> self.frac_bits).view(self.dtype)

    def zeros(self, shape: tuple[int, ...]) -> np.ndarray:
        return np.zeros(shape, dtype=self.dtype)

    def sum(self, x: np.ndarray, axis: (int | tuple[int, ...])) -> np.ndarray:
        return np.sum(x, axis=axis, dtype=self.dtype)

    def random(self, shape: tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, np.iinfo(self.dtype).max, size=shape, dtype=self.dtype, endpoint=True)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.truncate(a * b)


# =====
class FloatArith:
    """ Double-precision twin of the fixed-point numerics for gradient checks. """

    dtype = np.float64

    def encode(self, value: Any) -> np.ndarray:
        return np.asarray(value, dtype=np.float64)

    def decode(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=np.float64)

    def const(self, value: float) -> np.ndarray:
        return np.asarray(value, dtype=np.float64)

    def to_signed(self, x: np.ndarray) -> np.ndarray:
        return x

    def truncate(self, x: np.ndarray) -> np.ndarray:
        return x

    def zeros(self, shape: tuple[int, ...]) -> np.ndarray:
        return np.zeros(shape, dtype=np.float64)

    def sum(self, x: np.ndarray, axis: (int | tuple[int, ...])) -> np.ndarray:
        return np.sum(x, axis=axis)


# =====
def encode_fixed(value: float, cfg: FixedPointConfig) -> int:
    return int(cfg.encode(value))


def decode_fixed(elem: int, cfg: FixedPointConfig) -> float:
    return float(cfg.decode(np.asarray(elem, dtype=cfg.dtype)))
