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


import contextlib

from typing import AsyncGenerator

import aiohttp

from . import __version__


# =====
USER_AGENT = f"splitfss/{__version__}"


@contextlib.asynccontextmanager
async def download(
    url: str,
    timeout: float=10.0,
    read_timeout: (float | None)=None,
) -> AsyncGenerator[aiohttp.ClientResponse, None]:
    """ Streams a GET response; error statuses raise aiohttp.ClientResponseError. """

    client_timeout = aiohttp.ClientTimeout(
        sock_connect=timeout,
        sock_read=(timeout if read_timeout is None else read_timeout),
    )
    async with aiohttp.ClientSession(
        headers={"User-Agent": USER_AGENT},
        timeout=client_timeout,
        raise_for_status=True,
    ) as session:
        async with session.get(url) as response:
            yield response
