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
import contextlib

import numpy as np

from ..logging import get_logger
from ..ring.model import init_params
from ..ring.model import select_params
from ..transport import MsgType
from ..transport import Channel
from ..transport import ByteMeter
from ..mpc import MaterialKind
from ..mpc import MaterialRequest
from ..mpc import MaterialCodec
from ..mpc import Material
from ..mpc import Dealer
from ..mpc import variant_plan
from ..mpc.tape import TapeWriter

from .hyper import Hyperparams
from .hyper import RunSchedule
from .hyper import sync_session
from .peer import recv_request


# =====
class DealerRole:
    """ Serves correlated randomness item by item, in the order of the material plan. """

    def __init__(
        self,
        hyper: Hyperparams,
        meter: ByteMeter,
        client: Channel,
        servers: list[Channel],
        tape_path: (str | None)=None,
    ) -> None:

        self.__hyper = hyper
        self.__cfg = hyper.fixed_point
        self.__meter = meter
        self.__client = client
        self.__servers = servers
        self.__tape_path = tape_path
        self.__tape: (TapeWriter | None) = None
        self.__codec = MaterialCodec(self.__cfg.ring_bits)
        self.__dealer = Dealer(self.__cfg, np.random.default_rng([hyper.seed, 2]))
        self.items = 0

    async def sync(self) -> RunSchedule:
        session = await sync_session(self.__client, self.__hyper)
        for server in self.__servers:
            await sync_session(server, self.__hyper, session_id=session)
        return RunSchedule.from_dict(await self.__client.recv_json(MsgType.SYNC))

    async def run(self) -> None:
        logger = get_logger(0)
        hyper = self.__hyper
        schedule = await self.sync()
        self.__meter.phase = "preprocessing"
        async with contextlib.AsyncExitStack() as stack:
            if self.__tape_path:
                self.__tape = await stack.enter_async_context(TapeWriter(self.__tape_path, self.__cfg.ring_bits))

            specs = (hyper.arch.server_layers if hyper.vanilla else hyper.arch.layers)
            params = select_params(init_params(hyper.arch, hyper.seed), specs)
            await self.__serve(MaterialRequest(MaterialKind.PARAMS, ()), (None, *self.__dealer.make_params(params)))

            train_plan = variant_plan(hyper.variant, hyper.arch, hyper.batch_size, True, hyper.relu_chunk, hyper.reveal_loss)
            train_bytes = 0
            for epoch in range(schedule.passes):
                if epoch < schedule.epochs:
                    for _ in range(schedule.train_batches):
                        before = self.__meter.get("sent", "preprocessing")
                        for request in train_plan:
                            await self.__serve(request)
                        train_bytes += self.__meter.get("sent", "preprocessing") - before
                for size in schedule.test_sizes:
                    for request in variant_plan(hyper.variant, hyper.arch, size, False, hyper.relu_chunk):
                        await self.__serve(request)
                logger.info("Dealer: epoch %d served, %d items so far", epoch + 1, self.items)

        batches = schedule.epochs * schedule.train_batches
        await self.__client.send_json(MsgType.METRIC, {
            "party": "dealer",
            "meter": self.__meter.dump(),
            "preprocessing_per_batch": (train_bytes / batches if batches else 0.0),
        })

    async def __serve(self, request: MaterialRequest, parts: (tuple[(Material | None), Material, Material] | None)=None) -> None:
        parties = ([(0, self.__client)] if request.for_client else [])
        parties += [(index + 1, server) for (index, server) in enumerate(self.__servers)]
        await asyncio.gather(*[
            recv_request(channel, self.__codec, request)
            for (_, channel) in parties
        ])
        if parts is None:
            parts = self.__dealer.generate(request)
        msg_type = (MsgType.KEY_BLOB if request.with_keys else MsgType.TRIPLE_BLOB)
        for (index, channel) in parties:
            part = parts[index]
            assert part is not None
            record = self.__codec.encode(part)
            await channel.send_msg(msg_type, record)
            if self.__tape is not None:
                await self.__tape.write(index, record)
        self.items += 1
