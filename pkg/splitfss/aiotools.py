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


import signal
import asyncio

from typing import Coroutine
from typing import NoReturn
from typing import Any


# =====
def _raise_exit() -> NoReturn:
    raise SystemExit()


def run(coro: Coroutine[Any, Any, Any]) -> Any:
    """ Runs a role to completion; SIGTERM exits like Ctrl+C, leftover tasks are cancelled. """

    with asyncio.Runner() as runner:
        runner.get_loop().add_signal_handler(signal.SIGTERM, _raise_exit)
        return runner.run(coro)


async def gather_or_cancel(*coros: Coroutine[Any, Any, Any]) -> list[Any]:
    """ Like asyncio.gather(), but the first failure cancels the rest. """

    tasks = [asyncio.create_task(coro) for coro in coros]
    try:
        return list(await asyncio.gather(*tasks))
    except BaseException:
        for task in tasks:
            task.cancel()
        await asyncio.gather(*tasks, return_exceptions=True)
        raise


# =====
async def close_writer(writer: asyncio.StreamWriter) -> bool:
    """ Aborts the connection unless it's already closing; returns True if it did. """

    if writer.is_closing():
        return False
    writer.transport.abort()
    writer.close()
    try:
        await writer.wait_closed()
    except (ConnectionError, OSError):
        pass
    return True
