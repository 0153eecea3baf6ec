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


import time
import asyncio
import dataclasses

import numpy as np

from ..logging import get_logger
from ..errors import ProtocolError
from ..ring import FixedPointConfig
from ..ring.model import PlainStack
from ..ring.model import init_params
from ..ring.model import encode_params
from ..ring.model import select_params
from ..ring.model import batch_mean
from ..ring.optim import SgdMomentum
from ..transport import MsgType
from ..transport import Channel
from ..transport import ByteMeter
from ..mnist import Dataset
from ..mnist import batches
from ..mnist import batch_count
from ..mpc import MaterialKind
from ..mpc import MaterialRequest
from ..mpc import MaterialCodec
from ..mpc import Mask
from ..mpc import share

from .hyper import Hyperparams
from .hyper import RunSchedule
from .hyper import sync_session
from .hyper import new_session_id
from .peer import DealerFeed


# =====
@dataclasses.dataclass
class EpochRecord:
    epoch: int
    accuracy: float
    train_time: float
    test_time: float
    train_batches: int
    mean_loss: (float | None) = None


@dataclasses.dataclass
class ClientResult:
    epochs: list[EpochRecord]
    meters: dict[str, dict[str, dict[str, int]]]
    preprocessing_per_batch: (float | None)
    session_id: int


class ClientState:
    def __init__(self, hyper: Hyperparams) -> None:
        cfg = hyper.fixed_point
        specs = hyper.arch.client_layers
        params = encode_params(select_params(init_params(hyper.arch, hyper.seed), specs), cfg)
        self.stack = PlainStack(specs, params, cfg)
        self.optimizer = SgdMomentum(hyper.lr, hyper.momentum, cfg)

    @property
    def params(self) -> dict[str, np.ndarray]:
        return self.stack.params


def share_labels(y: np.ndarray, rng: np.random.Generator, cfg: FixedPointConfig) -> tuple[np.ndarray, np.ndarray]:
    (first, second) = share(y, rng, cfg)
    return (first.tensor, second.tensor)


# =====
class ClientRole:
    """ The data owner: runs the client layers in plaintext and drives every round. """

    def __init__(
        self,
        hyper: Hyperparams,
        train_set: Dataset,
        test_set: Dataset,
        meter: ByteMeter,
        servers: list[Channel],
        dealer: (Channel | None)=None,
    ) -> None:

        if len(servers) != (2 if hyper.private else 1):
            raise ProtocolError(f"Variant {hyper.variant} needs {2 if hyper.private else 1} server(s), got {len(servers)}")
        if hyper.private and dealer is None:
            raise ProtocolError(f"Variant {hyper.variant} needs the dealer")
        self.__hyper = hyper
        self.__cfg = hyper.fixed_point
        self.__train_set = train_set
        self.__test_set = test_set
        self.__meter = meter
        self.__servers = servers
        self.__dealer = dealer
        self.__feed = (DealerFeed(dealer, MaterialCodec(self.__cfg.ring_bits)) if dealer is not None else None)
        self.__rng = np.random.default_rng([hyper.seed, 1])
        self.state = ClientState(hyper)
        self.losses: list[float] = []

    @property
    def schedule(self) -> RunSchedule:
        hyper = self.__hyper
        train_batches = batch_count(len(self.__train_set), hyper.batch_size)
        if hyper.max_batches is not None:
            train_batches = min(train_batches, hyper.max_batches)
        test_count = batch_count(len(self.__test_set), hyper.batch_size, drop_last=False)
        if hyper.max_test_batches is not None:
            test_count = min(test_count, hyper.max_test_batches)
        test_sizes = [
            min(hyper.batch_size, len(self.__test_set) - index * hyper.batch_size)
            for index in range(test_count)
        ]
        return RunSchedule(hyper.epochs, train_batches, tuple(test_sizes))

    def __iter_test(self):  # type: ignore
        return batches(
            self.__test_set, self.__hyper.batch_size, None, self.__cfg,
            drop_last=False, limit=self.__hyper.max_test_batches,
        )

    async def sync(self) -> tuple[int, RunSchedule]:
        session = new_session_id()
        for channel in [*self.__servers, *([self.__dealer] if self.__dealer is not None else [])]:
            await sync_session(channel, self.__hyper, session_id=session)
        schedule = self.schedule
        for channel in [*self.__servers, *([self.__dealer] if self.__dealer is not None else [])]:
            await channel.send_json(MsgType.SYNC, schedule.as_dict())
        return (session, schedule)

    async def run(self) -> ClientResult:
        logger = get_logger(0)
        hyper = self.__hyper
        (session, schedule) = await self.sync()
        records: list[EpochRecord] = []
        for epoch in range(schedule.passes):
            train_time = 0.0
            losses_before = len(self.losses)
            if epoch < schedule.epochs:
                self.__meter.phase = "training"
                started = time.monotonic()
                for (x, y, _) in batches(self.__train_set, hyper.batch_size, hyper.seed, self.__cfg, epoch, limit=schedule.train_batches):
                    await self.train_batch(x, y)
                await self.__wait_trained(epoch + 1)
                train_time = time.monotonic() - started

            self.__meter.phase = "testing"
            started = time.monotonic()
            correct = total = 0
            for (x, _, labels) in self.__iter_test():
                predicted = await self.test_batch(x)
                correct += int(np.sum(predicted == labels))
                total += len(labels)
            test_time = time.monotonic() - started

            losses = self.losses[losses_before:]
            record = EpochRecord(
                epoch=(epoch + 1 if epoch < schedule.epochs else 0),
                accuracy=(correct / total if total else 0.0),
                train_time=train_time,
                test_time=test_time,
                train_batches=(schedule.train_batches if epoch < schedule.epochs else 0),
                mean_loss=(float(np.mean(losses)) if losses else None),
            )
            records.append(record)
            logger.info("Epoch %d: accuracy %.4f, train %.1fs, test %.1fs, sent %d bytes",
                        record.epoch, record.accuracy, train_time, test_time, self.__meter.get("sent", "training"))

        meters = {self.__meter.party: self.__meter.dump()}
        preprocessing: (float | None) = None
        for channel in [*self.__servers, *([self.__dealer] if self.__dealer is not None else [])]:
            metric = await channel.recv_json(MsgType.METRIC)
            meters[str(metric["party"])] = metric["meter"]
            if "preprocessing_per_batch" in metric:
                preprocessing = float(metric["preprocessing_per_batch"])
        return ClientResult(records, meters, preprocessing, session)

    # =====

    async def __take_mask(self, shape: tuple[int, ...]) -> np.ndarray:
        assert self.__feed is not None
        mask = await self.__feed.take(MaterialRequest(MaterialKind.MASK, shape))
        assert isinstance(mask, Mask)
        mask.use()
        return mask.alpha

    async def client_forward(self, x: np.ndarray) -> None:
        """ Sends the batch to the servers in the form the variant prescribes. """

        hyper = self.__hyper
        dtype = self.__cfg.dtype
        if hyper.vanilla:
            atm = self.state.stack.forward(x)
            if hyper.private:
                x_pub = atm + await self.__take_mask(atm.shape)
                await asyncio.gather(*[
                    server.send_arrays(MsgType.X_PUB, [x_pub], dtype)
                    for server in self.__servers
                ])
            else:
                await self.__servers[0].send_arrays(MsgType.X_PUB, [atm], dtype)
        elif hyper.private:
            (x0, x1) = share(x, self.__rng, self.__cfg)
            await self.__servers[0].send_arrays(MsgType.INPUT_SHARE, [x0.tensor], dtype)
            await self.__servers[1].send_arrays(MsgType.INPUT_SHARE, [x1.tensor], dtype)
        else:
            await self.__servers[0].send_arrays(MsgType.INPUT_SHARE, [x], dtype)

    async def __send_labels(self, y: np.ndarray) -> None:
        dtype = self.__cfg.dtype
        if not self.__hyper.private or self.__hyper.plaintext_labels:
            await self.__servers[0].send_arrays(MsgType.LABEL_SHARE, [y], dtype)
        else:
            (y0, y1) = share_labels(y, self.__rng, self.__cfg)
            await self.__servers[0].send_arrays(MsgType.LABEL_SHARE, [y0], dtype)
            await self.__servers[1].send_arrays(MsgType.LABEL_SHARE, [y1], dtype)

    async def __wait_trained(self, epoch: int) -> None:
        # Each server acks once its training pass is done
        acks = await asyncio.gather(*[server.recv_json(MsgType.SYNC) for server in self.__servers])
        for ack in acks:
            if ack.get("epoch") != epoch:
                raise ProtocolError(f"Server finished epoch {ack.get('epoch')!r}, expected {epoch}")

    async def __recv_sum(self, msg_type: MsgType, shape: tuple[int, ...]) -> np.ndarray:
        parts = await asyncio.gather(*[
            server.recv_arrays(msg_type, [shape], self.__cfg.dtype)
            for server in self.__servers
        ])
        return sum((part[0] for part in parts[1:]), parts[0][0])

    async def client_backward(self, grad: np.ndarray) -> None:
        cfg = self.__cfg
        (_, grads) = self.state.stack.backward(grad, need_input_grad=False)
        self.state.optimizer.step(self.state.params, batch_mean(grads, grad.shape[0], cfg))

    async def train_batch(self, x: np.ndarray, y: np.ndarray) -> None:
        hyper = self.__hyper
        await self.client_forward(x)
        await self.__send_labels(y)
        if hyper.reveal_loss:
            loss = float(self.__cfg.decode(await self.__recv_sum(MsgType.LOSS_SHARE, (1,)))[0])
            self.losses.append(loss)
            get_logger(0).info("Batch loss: %.6f", loss)
        if hyper.vanilla:
            grad = await self.__recv_sum(MsgType.GRAD_SHARE, (x.shape[0], *hyper.arch.split_shape))
            await self.client_backward(grad)

    async def test_batch(self, x: np.ndarray) -> np.ndarray:
        await self.client_forward(x)
        y_hat = await self.__recv_sum(MsgType.OUTPUT_SHARE, (x.shape[0], self.__hyper.arch.classes))
        return np.argmax(self.__cfg.to_signed(y_hat), axis=1)
