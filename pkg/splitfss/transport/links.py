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


import abc
import asyncio

from ..logging import get_logger

from .. import aiotools

from .errors import TransportError
from .errors import TransportConnectionError
from .frame import HEADER_SIZE
from .frame import Frame
from .frame import parse_header
from .frame import decode_frame


# =====
class Link(abc.ABC):
    @abc.abstractmethod
    async def send(self, frame: Frame) -> None:
        raise NotImplementedError

    @abc.abstractmethod
    async def recv(self) -> Frame:
        raise NotImplementedError

    @abc.abstractmethod
    async def close(self) -> None:
        raise NotImplementedError


# =====
class StreamLink(Link):
    """ Framed TCP link; a reader task drains the socket so both ends can send large payloads at once. """

    def __init__(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        self.__reader = reader
        self.__writer = writer
        self.__frames: "asyncio.Queue[Frame | TransportError]" = asyncio.Queue()
        self.__read_task: (asyncio.Task | None) = None

        peer = writer.get_extra_info("peername")
        self.remote = ("[%s]:%d" % peer[:2] if peer else "unknown")

    async def send(self, frame: Frame) -> None:
        data = frame.encode()
        try:
            self.__writer.write(data)
            await self.__writer.drain()
        except ConnectionError as err:
            raise TransportConnectionError(f"Can't write {frame.msg_type.name} to {self.remote}", err)

    async def recv(self) -> Frame:
        if self.__read_task is None:
            self.__read_task = asyncio.create_task(self.__read_loop())
        item = await self.__frames.get()
        if isinstance(item, TransportError):
            self.__frames.put_nowait(item)  # Sticky for later readers
            raise item
        return item

    async def close(self) -> None:
        if self.__read_task is not None:
            self.__read_task.cancel()
            await asyncio.gather(self.__read_task, return_exceptions=True)
        await aiotools.close_writer(self.__writer)

    async def __read_loop(self) -> None:
        while True:
            try:
                header = await self.__reader.readexactly(HEADER_SIZE)
                (msg_type, session_id, length) = parse_header(header)
                payload = await self.__reader.readexactly(length)
            except (ConnectionError, asyncio.IncompleteReadError) as err:
                await self.__frames.put(TransportConnectionError(f"Can't read a frame from {self.remote}", err))
                return
            except TransportError as err:
                get_logger(0).error("Bad frame from %s: %s", self.remote, err)
                await self.__frames.put(err)
                return
            await self.__frames.put(Frame(msg_type, session_id, payload))


async def open_stream_link(host: str, port: int, timeout: float) -> StreamLink:
    try:
        (reader, writer) = await asyncio.wait_for(asyncio.open_connection(host, port), timeout=timeout)
    except (OSError, asyncio.TimeoutError) as err:
        raise TransportConnectionError(f"Can't connect to [{host}]:{port}", err)
    return StreamLink(reader, writer)


async def accept_stream_links(host: str, port: int, count: int, timeout: float) -> list[StreamLink]:
    links: "asyncio.Queue[StreamLink]" = asyncio.Queue()

    async def handle(reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        await links.put(StreamLink(reader, writer))

    try:
        server = await asyncio.start_server(handle, host, port)
    except OSError as err:
        raise TransportConnectionError(f"Can't listen on [{host}]:{port}", err)
    get_logger(0).info("Listening on [%s]:%d for %d peers ...", host, port, count)
    try:
        async with server:
            accepted: list[StreamLink] = []
            while len(accepted) < count:
                try:
                    accepted.append(await asyncio.wait_for(links.get(), timeout=timeout))
                except asyncio.TimeoutError as err:
                    raise TransportConnectionError(f"Only {len(accepted)} of {count} peers connected to [{host}]:{port}", err)
            return accepted
    finally:
        server.close()


# =====
class LoopbackLink(Link):
    """ In-process link; frames still go through the byte codec. """

    def __init__(self, inbox: "asyncio.Queue[bytes | None]", outbox: "asyncio.Queue[bytes | None]") -> None:
        self.__inbox = inbox
        self.__outbox = outbox
        self.__closed = False

    async def send(self, frame: Frame) -> None:
        if self.__closed:
            raise TransportConnectionError(f"Can't write {frame.msg_type.name}: link is closed")
        await self.__outbox.put(frame.encode())

    async def recv(self) -> Frame:
        data = await self.__inbox.get()
        if data is None:
            self.__inbox.put_nowait(None)
            raise TransportConnectionError("Can't read a frame: peer has closed the link")
        return decode_frame(data)

    async def close(self) -> None:
        if not self.__closed:
            self.__closed = True
            await self.__outbox.put(None)


def make_loopback_pair() -> tuple[LoopbackLink, LoopbackLink]:
    first: "asyncio.Queue[bytes | None]" = asyncio.Queue()
    second: "asyncio.Queue[bytes | None]" = asyncio.Queue()
    return (LoopbackLink(first, second), LoopbackLink(second, first))
