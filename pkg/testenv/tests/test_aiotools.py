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

import pytest

from splitfss import aiotools


# =====
class _FailError(Exception):
    pass


@pytest.mark.asyncio
async def test_ok__gather_or_cancel() -> None:
    async def value(result: int) -> int:
        await asyncio.sleep(0.01 * result)
        return result

    assert (await aiotools.gather_or_cancel(value(2), value(1), value(0))) == [2, 1, 0]


@pytest.mark.asyncio
async def test_fail__gather_or_cancel() -> None:
    cancelled = asyncio.Event()

    async def slow() -> None:
        try:
            await asyncio.sleep(10)
        except asyncio.CancelledError:
            cancelled.set()
            raise

    async def fail() -> None:
        await asyncio.sleep(0.01)
        raise _FailError()

    with pytest.raises(_FailError):
        await aiotools.gather_or_cancel(slow(), fail())
    assert cancelled.is_set()


def test_ok__run() -> None:
    async def value() -> str:
        await asyncio.sleep(0)
        return "done"

    assert aiotools.run(value()) == "done"


def test_fail__run() -> None:
    async def fail() -> None:
        raise _FailError()

    with pytest.raises(_FailError):
        aiotools.run(fail())


@pytest.mark.asyncio
async def test_ok__close_writer() -> None:
    async def handle(_: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        writer.close()

    server = await asyncio.start_server(handle, "127.0.0.1", 0)
    port = server.sockets[0].getsockname()[1]
    async with server:
        (_, writer) = await asyncio.open_connection("127.0.0.1", port)
        assert (await aiotools.close_writer(writer))
        assert not (await aiotools.close_writer(writer))
