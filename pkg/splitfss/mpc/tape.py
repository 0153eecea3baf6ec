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


import struct
import types

from typing import AsyncGenerator

import aiofiles

from ..errors import MaterialError


# =====
TAPE_MAGIC = b"SFSSTAPE"
TAPE_VERSION = 1

_HEADER = struct.Struct("<8sHB")     # magic, version, ring_bits
_RECORD = struct.Struct("<BQ")       # party (0=client, 1=server0, 2=server1), length


class TapeWriter:
    """ Appends every material record issued by the dealer, in issue order. """

    def __init__(self, path: str, ring_bits: int) -> None:
        self.__path = path
        self.__ring_bits = ring_bits
        self.__handle = None  # type: ignore[var-annotated]
        self.records = 0

    async def __aenter__(self) -> "TapeWriter":
        self.__handle = await aiofiles.open(self.__path, "wb")
        await self.__handle.write(_HEADER.pack(TAPE_MAGIC, TAPE_VERSION, self.__ring_bits))
        return self

    async def __aexit__(
        self,
        _exc_type: type[BaseException],
        _exc: BaseException,
        _tb: types.TracebackType,
    ) -> None:

        if self.__handle is not None:
            await self.__handle.close()
            self.__handle = None

    async def write(self, party: int, record: bytes) -> None:
        assert self.__handle is not None
        await self.__handle.write(_RECORD.pack(party, len(record)) + record)
        self.records += 1


async def read_tape(path: str) -> AsyncGenerator[tuple[int, int, bytes], None]:
    """ Yields (ring_bits, party, record) for every record of a tape file. """

    async with aiofiles.open(path, "rb") as tape:
        header = await tape.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise MaterialError(f"Truncated tape header in {path}")
        (magic, version, ring_bits) = _HEADER.unpack(header)
        if magic != TAPE_MAGIC:
            raise MaterialError(f"Not a dealer tape: {path}")
        if version != TAPE_VERSION:
            raise MaterialError(f"Unsupported tape version {version} in {path}")
        while True:
            head = await tape.read(_RECORD.size)
            if not head:
                break
            if len(head) != _RECORD.size:
                raise MaterialError(f"Truncated tape record header in {path}")
            (party, length) = _RECORD.unpack(head)
            record = await tape.read(length)
            if len(record) != length:
                raise MaterialError(f"Truncated tape record in {path}")
            yield (ring_bits, party, record)
