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


import asyncio
import collections

from typing import Protocol

import numpy as np

from ..errors import MaterialError
from ..ring import FixedPointConfig
from ..ring.layers import pool_windows
from ..ring.layers import unpool_windows
from ..fss import dcf_eval

from .share import truncate_local
from .share import public_term
from .material import MaterialKind
from .material import MaterialRequest
from .material import Material
from .material import Mask
from .material import Triple
from .material import ReluMaterial
from .material import check_material


# =====
class Peer(Protocol):
    party: int

    async def exchange(self, arrays: list[np.ndarray]) -> list[np.ndarray]:
        """ Sends own arrays to the other server and returns the other server's arrays of the same shapes. """


class MaterialSource(Protocol):
    async def take(self, request: MaterialRequest) -> Material: ...


class MaterialQueue:
    """ In-memory material source, consumed strictly in order. """

    def __init__(self, materials: list[Material]) -> None:
        self.__materials = collections.deque(materials)

    def __len__(self) -> int:
        return len(self.__materials)

    async def take(self, request: MaterialRequest) -> Material:
        if not self.__materials:
            raise MaterialError(f"Material exhausted while waiting for {request}")
        material = self.__materials.popleft()
        check_material(material, request)
        return material


class QueuePeer:
    """ In-process peer for running both servers in one event loop. """

    def __init__(self, party: int, inbox: "asyncio.Queue[list[np.ndarray]]", outbox: "asyncio.Queue[list[np.ndarray]]") -> None:
        self.party = party
        self.__inbox = inbox
        self.__outbox = outbox
        self.opened = 0

    async def exchange(self, arrays: list[np.ndarray]) -> list[np.ndarray]:
        await self.__outbox.put([array.copy() for array in arrays])
        theirs = await self.__inbox.get()
        self.opened += sum(array.size for array in arrays)
        return theirs


def make_peer_pair() -> tuple[QueuePeer, QueuePeer]:
    (first, second) = (asyncio.Queue(), asyncio.Queue())  # type: ignore[var-annotated]
    return (QueuePeer(0, first, second), QueuePeer(1, second, first))


# =====
async def open_values(values: list[np.ndarray], peer: Peer) -> list[np.ndarray]:
    theirs = await peer.exchange(values)
    return [(own + other) for (own, other) in zip(values, theirs)]


async def beaver_mul(
    x: np.ndarray,
    y: np.ndarray,
    triple: Triple,
    peer: Peer,
    cfg: FixedPointConfig,
    truncate: bool=True,
) -> np.ndarray:

    if x.shape != triple.a.shape or y.shape != triple.b.shape:
        raise MaterialError(f"Triple shape mismatch: operands {x.shape}, {y.shape};"
                            f" triple {triple.a.shape}, {triple.b.shape}")
    triple.use()
    (eps, delta) = await open_values([x - triple.a, y - triple.b], peer)
    mul = (np.matmul if triple.matmul else np.multiply)
    z = mul(eps, triple.b) + mul(triple.a, delta) + triple.c + public_term(mul(eps, delta), peer.party)
    return (truncate_local(z, peer.party, cfg) if truncate else z)


async def masked_open(z: np.ndarray, mask: (Mask | ReluMaterial), peer: Peer) -> np.ndarray:
    (x_pub,) = await open_values([z + mask.alpha], peer)
    return x_pub


async def secure_relu(
    x_pub: np.ndarray,
    material: ReluMaterial,
    peer: Peer,
    cfg: FixedPointConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """
    x_pub = x + alpha for a flat vector x. Returns shares of relu(x) and of b = [x >= 0] as 0/1 integers.
    """

    if x_pub.shape != material.alpha.shape:
        raise MaterialError(f"Gadget shape mismatch: input {x_pub.shape}, gadget {material.alpha.shape}")
    material.use()
    party = peer.party
    dtype = cfg.dtype
    low_bits = cfg.ring_bits - 1

    top = (x_pub >> low_bits)
    low = (x_pub & dtype((1 << low_bits) - 1)).astype(np.uint64)
    # Shares of MSB(alpha) XOR borrow, then of MSB(x) = MSB(x_pub) XOR that
    carry = material.msb + dcf_eval(party, material.keys, low)
    one = public_term(np.ones_like(x_pub), party)
    negative = np.where((top == 1), one - carry, carry)
    bit = one - negative

    x_share = public_term(x_pub, party) - material.alpha
    y = await beaver_mul(bit, x_share, material.triple, peer, cfg, truncate=False)
    return (y, bit)


async def secure_relu_backward(
    grad: np.ndarray,
    bit: np.ndarray,
    triple: Triple,
    peer: Peer,
    cfg: FixedPointConfig,
) -> np.ndarray:

    return (await beaver_mul(grad, bit, triple, peer, cfg, truncate=False))


# =====
def relu_requests(count: int, chunk: int) -> list[MaterialRequest]:
    return [
        MaterialRequest(MaterialKind.RELU, (min(chunk, count - offset),))
        for offset in range(0, count, chunk)
    ]


class SecureOps:
    """ One server's view of the secure layer primitives, pulling material in consumption order. """

    def __init__(
        self,
        cfg: FixedPointConfig,
        peer: Peer,
        source: MaterialSource,
        chunk: int=65536,
    ) -> None:

        self.cfg = cfg
        self.party = peer.party
        self.__peer = peer
        self.__source = source
        self.__chunk = chunk

    async def take(self, request: MaterialRequest) -> Material:
        return (await self.__source.take(request))

    async def mul(self, x: np.ndarray, y: np.ndarray, truncate: bool=True) -> np.ndarray:
        triple = await self.take(MaterialRequest(MaterialKind.ELEM, x.shape, y.shape))
        assert isinstance(triple, Triple)
        return (await beaver_mul(x, y, triple, self.__peer, self.cfg, truncate))

    async def matmul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        triple = await self.take(MaterialRequest(MaterialKind.MATMUL, x.shape, y.shape))
        assert isinstance(triple, Triple)
        return (await beaver_mul(x, y, triple, self.__peer, self.cfg))

    async def relu(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        flat = z.reshape(-1)
        (ys, bits) = ([], [])
        offset = 0
        for request in relu_requests(flat.size, self.__chunk):
            material = await self.take(request)
            assert isinstance(material, ReluMaterial)
            part = flat[offset:offset + request.shape[0]]
            x_pub = await masked_open(part, material, self.__peer)
            (y, bit) = await secure_relu(x_pub, material, self.__peer, self.cfg)
            ys.append(y)
            bits.append(bit)
            offset += request.shape[0]
        return (
            np.concatenate(ys).reshape(z.shape),
            np.concatenate(bits).reshape(z.shape),
        )

    async def relu_backward(self, grad: np.ndarray, bit: np.ndarray) -> np.ndarray:
        triple = await self.take(MaterialRequest(MaterialKind.ELEM, grad.shape, bit.shape))
        assert isinstance(triple, Triple)
        return (await secure_relu_backward(grad, bit, triple, self.__peer, self.cfg))

    async def maxpool(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """ Tournament max over 2x2 windows; returns the output and shares of the one-hot argmax map. """

        windows = pool_windows(x)
        (w0, w1, w2, w3) = (windows[..., pos] for pos in range(4))
        (gain, first) = await self.relu(np.stack([w0 - w1, w2 - w3]))
        (top_left, top_right) = (w1 + gain[0], w3 + gain[1])
        (gain2, left) = await self.relu(top_left - top_right)
        y = top_right + gain2

        one = public_term(np.ones_like(left), self.party)
        picks = await self.mul(first, np.stack([left, one - left]), truncate=False)
        onehot = np.stack([picks[0], left - picks[0], picks[1], (one - left) - picks[1]], axis=-1)
        return (y, onehot)

    async def maxpool_backward(self, grad: np.ndarray, onehot: np.ndarray) -> np.ndarray:
        spread = np.ascontiguousarray(np.broadcast_to(grad[..., None], onehot.shape))
        return unpool_windows(await self.mul(onehot, spread, truncate=False))
