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

import numpy as np

from ..errors import ProtocolError
from ..transport import MsgType
from ..transport import Channel
from ..mpc import MaterialCodec
from ..mpc import MaterialRequest
from ..mpc import Material
from ..mpc import check_material


# =====
class ChannelPeer:
    """ The other server, reached over a channel; openings travel in OPEN frames. """

    def __init__(self, channel: Channel, party: int, dtype: type) -> None:
        self.__channel = channel
        self.party = party
        self.__dtype = dtype

    async def exchange(self, arrays: list[np.ndarray]) -> list[np.ndarray]:
        shapes = [array.shape for array in arrays]
        (_, theirs) = await asyncio.gather(
            self.__channel.send_arrays(MsgType.OPEN, arrays, self.__dtype),
            self.__channel.recv_arrays(MsgType.OPEN, shapes, self.__dtype),
        )
        return theirs


class DealerFeed:
    """ Material source backed by the dealer: one SYNC request, one blob reply per item. """

    def __init__(self, channel: Channel, codec: MaterialCodec) -> None:
        self.__channel = channel
        self.__codec = codec
        self.items = 0

    async def take(self, request: MaterialRequest) -> Material:
        await self.__channel.send_msg(MsgType.SYNC, self.__codec.encode_request(request))
        blob = await self.__channel.recv_msg(MsgType.KEY_BLOB if request.with_keys else MsgType.TRIPLE_BLOB)
        material = self.__codec.decode(blob)
        check_material(material, request)
        self.items += 1
        return material


async def recv_request(channel: Channel, codec: MaterialCodec, expected: MaterialRequest) -> None:
    request = codec.decode_request(await channel.recv_msg(MsgType.SYNC))
    if request != expected:
        raise ProtocolError(f"Material desync with {channel.peer}: it wants {request}, the plan says {expected}")
