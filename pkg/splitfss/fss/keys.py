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

import numpy as np

from .prg import SEED_SIZE


# =====
class KeyFormatError(ValueError):
    pass


_RING_DTYPES = {16: np.uint16, 32: np.uint32, 64: np.uint64}


def ring_dtype(ring_bits: int) -> type:
    try:
        return _RING_DTYPES[ring_bits]
    except KeyError:
        raise KeyFormatError(f"Unsupported ring width: {ring_bits}") from None


# =====
@dataclasses.dataclass(frozen=True)
class CorrectionWord:
    seed_correction: bytes
    bit_corrections: tuple[int, int]
    value_correction: int


@dataclasses.dataclass(frozen=True, eq=False)
class _FssKey:
    """
    A vector of independent element keys of one party, evaluated together.
    A single key is a vector of length 1.
    """

    party: int
    domain_bits: int
    ring_bits: int
    roots: np.ndarray      # [N, 16] uint8
    seed_cw: np.ndarray    # [N, n, 16] uint8
    t_cw: np.ndarray       # [N, n, 2] uint8
    value_cw: np.ndarray   # [N, n] ring
    final_cw: np.ndarray   # [N] ring

    def __len__(self) -> int:
        return self.roots.shape[0]

    def __getitem__(self, index: (int | slice)) -> "_FssKey":
        if isinstance(index, int):
            index = slice(index, index + 1)
        return dataclasses.replace(
            self,
            roots=self.roots[index],
            seed_cw=self.seed_cw[index],
            t_cw=self.t_cw[index],
            value_cw=self.value_cw[index],
            final_cw=self.final_cw[index],
        )

    def levels(self, index: int=0) -> list[CorrectionWord]:
        return [
            CorrectionWord(
                seed_correction=self.seed_cw[index, level].tobytes(),
                bit_corrections=(int(self.t_cw[index, level, 0]), int(self.t_cw[index, level, 1])),
                value_correction=int(self.value_cw[index, level]),
            )
            for level in range(self.domain_bits)
        ]

    @property
    def dtype(self) -> type:
        return ring_dtype(self.ring_bits)


class DpfKey(_FssKey):
    pass


class DcfKey(_FssKey):
    pass


# =====
def key_size(domain_bits: int, ring_bits: int) -> int:
    # [1B party][1B domain_bits][16B root][per level: 16B seed-cw, 1B tL, 1B tR, ring value-cw][ring final]
    elem = ring_bits // 8
    return 2 + SEED_SIZE + domain_bits * (SEED_SIZE + 2 + elem) + elem


def _le(dtype: type) -> np.dtype:
    return np.dtype(dtype).newbyteorder("<")


def serialize_key(key: _FssKey) -> bytes:
    """ Concatenation of fixed-size little-endian element keys. """

    (count, n) = (len(key), key.domain_bits)
    elem = key.ring_bits // 8
    if count == 0:
        return b""
    levels = np.concatenate([
        key.seed_cw,
        key.t_cw,
        key.value_cw.astype(_le(key.dtype)).view(np.uint8).reshape(count, n, elem),
    ], axis=2).reshape(count, n * (SEED_SIZE + 2 + elem))
    rows = np.concatenate([
        np.full((count, 1), key.party, dtype=np.uint8),
        np.full((count, 1), n, dtype=np.uint8),
        key.roots,
        levels,
        key.final_cw.astype(_le(key.dtype)).view(np.uint8).reshape(count, elem),
    ], axis=1)
    return rows.tobytes()


def deserialize_key(data: bytes, ring_bits: int, cls: type[_FssKey]=DcfKey) -> _FssKey:
    if len(data) < 2:
        raise KeyFormatError(f"Key buffer too short: {len(data)} bytes")
    n = data[1]
    if not (0 < n <= ring_bits):
        raise KeyFormatError(f"Bad domain bits {n} for a {ring_bits}-bit ring")
    size = key_size(n, ring_bits)
    if len(data) % size != 0:
        raise KeyFormatError(f"Malformed key buffer: {len(data)} bytes is not a multiple of {size}")

    dtype = ring_dtype(ring_bits)
    elem = ring_bits // 8
    rows = np.frombuffer(data, dtype=np.uint8).reshape(-1, size)
    count = rows.shape[0]

    parties = rows[:, 0]
    if parties[0] not in (0, 1) or np.any(parties != parties[0]):
        raise KeyFormatError(f"Bad party tag: {parties[0]}")
    if np.any(rows[:, 1] != n):
        raise KeyFormatError("Inconsistent domain bits in key vector")

    offset = 2 + SEED_SIZE
    levels = rows[:, offset:offset + n * (SEED_SIZE + 2 + elem)].reshape(count, n, SEED_SIZE + 2 + elem)
    t_cw = levels[:, :, SEED_SIZE:SEED_SIZE + 2].copy()
    if np.any(t_cw > 1):
        raise KeyFormatError("Control-bit corrections must be 0 or 1")
    final = rows[:, size - elem:].copy()
    return cls(
        party=int(parties[0]),
        domain_bits=n,
        ring_bits=ring_bits,
        roots=rows[:, 2:offset].copy(),
        seed_cw=levels[:, :, :SEED_SIZE].copy(),
        t_cw=t_cw,
        value_cw=levels[:, :, SEED_SIZE + 2:].copy().view(_le(dtype)).reshape(count, n).astype(dtype),
        final_cw=final.view(_le(dtype)).reshape(count).astype(dtype),
    )
