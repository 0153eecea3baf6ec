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

from Crypto.Cipher import AES


# =====
SEED_SIZE = 16

# Fixed public AES key; the expander is AES-MMO: G_i(s) = AES_K(s ^ i) ^ (s ^ i)
_FIXED_KEY = bytes.fromhex("2b7e151628aed2a6abf7158809cf4f3c")
_CIPHER = AES.new(_FIXED_KEY, AES.MODE_ECB)
_BLOCKS = 4


@dataclasses.dataclass(frozen=True)
class PrgOutput:
    seeds: np.ndarray   # [N, 2, 16] uint8, (left, right)
    bits: np.ndarray    # [N, 2] bool
    values: np.ndarray  # [N, 2] uint64


def mmo(blocks: np.ndarray) -> np.ndarray:
    blocks = np.ascontiguousarray(blocks, dtype=np.uint8)
    if blocks.size == 0:
        return blocks.copy()
    enc = np.frombuffer(_CIPHER.encrypt(blocks.tobytes()), dtype=np.uint8).reshape(blocks.shape)
    return (enc ^ blocks)


def expand(seeds: np.ndarray) -> PrgOutput:
    """ Expands [N, 16] seeds into two child seeds, two control bits and two 64-bit values each. """

    count = seeds.shape[0]
    blocks = np.repeat(seeds[:, None, :], _BLOCKS, axis=1)
    blocks[:, :, 0] ^= np.arange(_BLOCKS, dtype=np.uint8)
    out = mmo(blocks.reshape(count * _BLOCKS, SEED_SIZE)).reshape(count, _BLOCKS, SEED_SIZE)
    values = out[:, 2, :].copy().view("<u8").astype(np.uint64)
    return PrgOutput(
        seeds=out[:, 0:2, :].copy(),
        bits=(out[:, 3, 0:2] & 1).astype(bool),
        values=values.reshape(count, 2),
    )


def seed_to_ring(seeds: np.ndarray, dtype: type) -> np.ndarray:
    return seeds[:, :8].copy().view("<u8")[:, 0].astype(dtype)


def prg_expand(seed: bytes) -> tuple[bytes, int, bytes, int, int, int]:
    if len(seed) != SEED_SIZE:
        raise ValueError(f"PRG seed must be {SEED_SIZE} bytes, got {len(seed)}")
    out = expand(np.frombuffer(seed, dtype=np.uint8)[None, :])
    return (
        out.seeds[0, 0].tobytes(), int(out.bits[0, 0]),
        out.seeds[0, 1].tobytes(), int(out.bits[0, 1]),
        int(out.values[0, 0]), int(out.values[0, 1]),
    )
