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


import json
import asyncio

import numpy as np

from ..logging import get_logger
from ..errors import ProtocolError

from .errors import TransportError
from .errors import HandshakeError
from .frame import MsgType
from .frame import Frame
from .frame import encode_arrays
from .frame import decode_arrays
from .links import Link
from .links import open_stream_link
from .links import accept_stream_links
from .meter import ByteMeter


# =====
class Channel:
    """ A metered, typed, in-order duplex channel to one peer role. """

    def __init__(
        self,
        link: Link,
        meter: ByteMeter,
        peer: str,
        session_id: int=0,
        phase: (str | None)=None,
    ) -> None:

        self.__link = link
        self.__meter = meter
        self.peer = peer
        self.session_id = session_id
        self.__phase = phase

    @property
    def party(self) -> str:
        return self.__meter.party

    async def send_msg(self, msg_type: MsgType, payload: bytes=b"") -> None:
        frame = Frame(msg_type, self.session_id, payload)
        await self.__link.send(frame)
        self.__meter.count("sent", frame.size, self.__phase)

    async def recv_msg(self, expected: MsgType) -> bytes:
        frame = await self.__link.recv()
        self.__meter.count("recv", frame.size, self.__phase)
        if frame.session_id != self.session_id:
            raise ProtocolError(f"Stale or foreign session {frame.session_id:016x} from {self.peer},"
                                f" expected {self.session_id:016x}")
        if frame.msg_type != expected:
            if frame.msg_type == MsgType.CLOSE:
                raise ProtocolError(f"Peer {self.peer} closed the session while we were waiting for {expected.name}")
            raise ProtocolError(f"Unexpected {frame.msg_type.name} from {self.peer}, expected {expected.name}")
        return frame.payload

    async def send_arrays(self, msg_type: MsgType, arrays: list[np.ndarray], dtype: type) -> None:
        await self.send_msg(msg_type, encode_arrays(arrays, dtype))

    async def recv_arrays(self, msg_type: MsgType, shapes: list[tuple[int, ...]], dtype: type) -> list[np.ndarray]:
        return decode_arrays(await self.recv_msg(msg_type), shapes, dtype)

    async def send_json(self, msg_type: MsgType, obj: dict) -> None:
        await self.send_msg(msg_type, json.dumps(obj, sort_keys=True).encode())

    async def recv_json(self, msg_type: MsgType) -> dict:
        payload = await self.recv_msg(msg_type)
        try:
            obj = json.loads(payload)
        except ValueError as err:
            raise ProtocolError(f"Malformed {msg_type.name} payload from {self.peer}: {err}")
        if not isinstance(obj, dict):
            raise ProtocolError(f"Malformed {msg_type.name} payload from {self.peer}")
        return obj

    async def close(self, graceful: bool=True) -> None:
        if graceful:
            try:
                await self.send_msg(MsgType.CLOSE)
            except TransportError:
                pass
        await self.__link.close()


# =====
async def handshake(
    link: Link,
    role: str,
    initiator: bool,
    timeout: float,
    meter: (ByteMeter | None)=None,
    phases: (dict[str, (str | None)] | None)=None,
) -> str:
    """
    Exchanges role names in SYNC frames with session id 0; returns the peer role.
    Both frames go to the meter, under the phase the peer role maps to in phases.
    """

    hello = Frame(MsgType.SYNC, 0, json.dumps({"role": role}).encode())
    try:
        if initiator:
            await link.send(hello)
        frame = await asyncio.wait_for(link.recv(), timeout=timeout)
        if not initiator:
            await link.send(hello)
    except asyncio.TimeoutError:
        raise HandshakeError("Handshake timed out") from None
    if frame.msg_type != MsgType.SYNC or frame.session_id != 0:
        raise HandshakeError(f"Expected a handshake, got {frame.msg_type.name}")
    try:
        remote_role = str(json.loads(frame.payload)["role"])
    except (ValueError, KeyError, TypeError):
        raise HandshakeError("Malformed handshake payload") from None
    if meter is not None:
        phase = (phases or {}).get(remote_role)
        meter.count("sent", hello.size, phase)
        meter.count("recv", frame.size, phase)
    return remote_role


async def connect_channel(
    host: str,
    port: int,
    role: str,
    peer: str,
    meter: ByteMeter,
    timeout: float,
    phase: (str | None)=None,
) -> Channel:

    link = await open_stream_link(host, port, timeout)
    try:
        remote_role = await handshake(link, role, True, timeout, meter, {peer: phase})
        if remote_role != peer:
            raise HandshakeError(f"Expected {peer} at [{host}]:{port}, found {remote_role}")
    except Exception:
        await link.close()
        raise
    get_logger(0).info("Connected to %s at [%s]:%d", peer, host, port)
    return Channel(link, meter, peer, phase=phase)


async def accept_channels(
    host: str,
    port: int,
    role: str,
    peers: dict[str, (str | None)],
    meter: ByteMeter,
    timeout: float,
) -> dict[str, Channel]:
    """ Accepts one connection per expected peer role; peers maps role -> meter phase override. """

    links = await accept_stream_links(host, port, len(peers), timeout)
    channels: dict[str, Channel] = {}
    try:
        for link in links:
            remote_role = await handshake(link, role, False, timeout, meter, peers)
            if remote_role not in peers or remote_role in channels:
                raise HandshakeError(f"Unexpected peer role: {remote_role}")
            channels[remote_role] = Channel(link, meter, remote_role, phase=peers[remote_role])
            get_logger(0).info("Accepted %s", remote_role)
    except Exception:
        for link in links:
            await link.close()
        raise
    return channels
