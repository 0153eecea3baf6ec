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

from typing import Any

import numpy as np

from ..ring import FixedPointConfig


# =====
@dataclasses.dataclass(frozen=True, eq=False)
class AdditiveShare:
    party: int
    tensor: np.ndarray


def share(secret: np.ndarray, rng: np.random.Generator, cfg: FixedPointConfig) -> tuple[AdditiveShare, AdditiveShare]:
    secret = np.asarray(secret, dtype=cfg.dtype)
    first = cfg.random(secret.shape, rng)
    return (AdditiveShare(0, first), AdditiveShare(1, secret - first))


def reconstruct(first: AdditiveShare, second: AdditiveShare) -> np.ndarray:
    if {first.party, second.party} != {0, 1}:
        raise ValueError(f"Need shares of both parties, got {first.party} and {second.party}")
    return (first.tensor + second.tensor)


def truncate_local(z: np.ndarray, party: int, cfg: FixedPointConfig) -> np.ndarray:
    """ Off by one ulp at most, except with probability about |z| / 2**ring_bits over the sharing. """

    if party == 0:
        return cfg.truncate(z)
    return -cfg.truncate(-z)


def public_term(value: np.ndarray, party: int) -> np.ndarray:
    # A public value enters additive shares through party 1 only
    return (value if party == 1 else np.zeros_like(value))


# =====
class ShareArith:
    """ Share-local numerics: linear ops with public constants and local truncation. """

    def __init__(self, cfg: FixedPointConfig, party: int) -> None:
        self.cfg = cfg
        self.party = party
        self.dtype = cfg.dtype

    def encode(self, value: Any) -> np.ndarray:
        return self.cfg.encode(value)

    def decode(self, x: np.ndarray) -> np.ndarray:
        return self.cfg.decode(x)

    def const(self, value: float) -> np.ndarray:
        return self.cfg.const(value)

    def to_signed(self, x: np.ndarray) -> np.ndarray:
        return self.cfg.to_signed(x)

    def truncate(self, x: np.ndarray) -> np.ndarray:
        return truncate_local(x, self.party, self.cfg)

    def zeros(self, shape: tuple[int, ...]) -> np.ndarray:
        return self.cfg.zeros(shape)

    def sum(self, x: np.ndarray, axis: (int | tuple[int, ...])) -> np.ndarray:
        return self.cfg.sum(x, axis)
