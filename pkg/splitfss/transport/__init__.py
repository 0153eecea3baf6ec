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


from .errors import TransportError
from .errors import TransportConnectionError
from .errors import HandshakeError
from .errors import FrameError
from .frame import MAGIC
from .frame import VERSION
from .frame import MAX_PAYLOAD
from .frame import HEADER_SIZE
from .frame import MsgType
from .frame import Frame
from .frame import parse_header
from .frame import decode_frame
from .frame import encode_arrays
from .frame import decode_arrays
from .meter import PHASES
from .meter import ByteMeter
from .meter import meter_report
from .links import Link
from .links import StreamLink
from .links import LoopbackLink
from .links import make_loopback_pair
from .channel import Channel
from .channel import handshake
from .channel import connect_channel
from .channel import accept_channels


__all__ = [
    "TransportError",
    "TransportConnectionError",
    "HandshakeError",
    "FrameError",
    "MAGIC",
    "VERSION",
    "MAX_PAYLOAD",
    "HEADER_SIZE",
    "MsgType",
    "Frame",
    "parse_header",
    "decode_frame",
    "encode_arrays",
    "decode_arrays",
    "PHASES",
    "ByteMeter",
    "meter_report",
    "Link",
    "StreamLink",
    "LoopbackLink",
    "make_loopback_pair",
    "Channel",
    "handshake",
    "connect_channel",
    "accept_channels",
]
