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


import os

import aiofiles

from ..logging import get_logger

from .. import htclient

from . import GZ_SIZES
from . import ChecksumError


# =====
async def fetch_mnist(mirror: str, data_dir: str, timeout: float=30.0) -> list[str]:
    logger = get_logger(0)
    os.makedirs(data_dir, exist_ok=True)
    fetched: list[str] = []
    for (name, size) in GZ_SIZES.items():
        path = os.path.join(data_dir, name)
        if os.path.exists(path) and os.path.getsize(path) == size:
            logger.info("Already have %s", path)
            continue
        url = mirror.rstrip("/") + "/" + name
        logger.info("Downloading %s ...", url)
        async with htclient.download(url, timeout=timeout, read_timeout=(timeout * 10)) as response:
            async with aiofiles.open(path + ".part", "wb") as file:
                async for chunk in response.content.iter_chunked(65536):
                    await file.write(chunk)
        got = os.path.getsize(path + ".part")
        if got != size:
            os.remove(path + ".part")
            raise ChecksumError(f"{url} gave {got} bytes, expected {size}")
        os.rename(path + ".part", path)
        fetched.append(path)
    return fetched
