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


import numpy as np

from ..logging import get_logger
from ..errors import ProtocolError
from ..ring import FixedPointConfig
from ..ring.model import PlainStack
from ..ring.model import init_params
from ..ring.model import encode_params
from ..ring.model import select_params
from ..ring.model import mse_grad
from ..ring.model import batch_mean
from ..ring.optim import SgdMomentum
from ..transport import MsgType
from ..transport import Channel
from ..transport import ByteMeter
from ..mpc import MaterialKind
from ..mpc import MaterialRequest
from ..mpc import MaterialCodec
from ..mpc import Mask
from ..mpc import ParamShares
from ..mpc import ShareArith
from ..mpc import SecureOps
from ..mpc import SecureStack
from ..mpc import public_term

from .hyper import Hyperparams
from .hyper import RunSchedule
from .hyper import sync_session
from .peer import ChannelPeer
from .peer import DealerFeed


# =====
class ServerState:
    def __init__(self, party: int, stack: (PlainStack | SecureStack), optimizer: SgdMomentum) -> None:
        self.party = party
        self.stack = stack
        self.optimizer = optimizer

    @property
    def params(self) -> dict[str, np.ndarray]:
        return self.stack.params


class ServerRole:
    """
    One computation server. In public variants only server 0 exists and computes in plaintext;
    in private variants both servers hold additive shares of the server model.
    """

    def __init__(
        self,
        party: int,
        hyper: Hyperparams,
        client: Channel,
        meter: ByteMeter,
        peer: (Channel | None)=None,
        dealer: (Channel | None)=None,
    ) -> None:

        if hyper.private and (peer is None or dealer is None):
            raise ProtocolError(f"Variant {hyper.variant} needs the other server and the dealer")
        self.party = party
        self.role = f"server{party}"
        self.__hyper = hyper
        self.__cfg: FixedPointConfig = hyper.fixed_point
        self.__client = client
        self.__meter = meter
        self.__peer = peer
        self.__dealer = dealer
        self.__feed = (DealerFeed(dealer, MaterialCodec(self.__cfg.ring_bits)) if dealer is not None else None)
        self.__arith = (ShareArith(self.__cfg, party) if hyper.private else self.__cfg)
        self.__ops: (SecureOps | None) = None
        self.state: (ServerState | None) = None
        self.losses: list[float] = []

    @property
    def __specs(self) -> list:
        arch = self.__hyper.arch
        return (arch.server_layers if self.__hyper.vanilla else arch.layers)

    async def sync(self) -> RunSchedule:
        session = await sync_session(self.__client, self.__hyper)
        if self.__peer is not None:
            if self.party == 0:
                await sync_session(self.__peer, self.__hyper, expected_session=session)
            else:
                await sync_session(self.__peer, self.__hyper, session_id=session)
        if self.__dealer is not None:
            await sync_session(self.__dealer, self.__hyper, expected_session=session)
        return RunSchedule.from_dict(await self.__client.recv_json(MsgType.SYNC))

    async def run(self) -> None:
        logger = get_logger(0)
        schedule = await self.sync()
        await self.__init_state()
        for epoch in range(schedule.passes):
            if epoch < schedule.epochs:
                self.__meter.phase = "training"
                for _ in range(schedule.train_batches):
                    await self.train_batch()
                await self.__client.send_json(MsgType.SYNC, {"epoch": epoch + 1, "trained": schedule.train_batches})
            self.__meter.phase = "testing"
            for size in schedule.test_sizes:
                await self.test_batch(size)
            logger.info("%s: epoch %d done", self.role, epoch + 1)
        await self.__client.send_json(MsgType.METRIC, {"party": self.role, "meter": self.__meter.dump()})

    # =====

    async def __init_state(self) -> None:
        hyper = self.__hyper
        specs = self.__specs
        stack: (PlainStack | SecureStack)
        if hyper.private:
            assert self.__feed is not None
            assert self.__peer is not None
            shares = await self.__feed.take(MaterialRequest(MaterialKind.PARAMS, ()))
            assert isinstance(shares, ParamShares)
            shares.use()
            ops = SecureOps(self.__cfg, ChannelPeer(self.__peer, self.party, self.__cfg.dtype), self.__feed, hyper.relu_chunk)
            self.__ops = ops
            stack = SecureStack(specs, shares.params, ops)
        else:
            params = encode_params(select_params(init_params(hyper.arch, hyper.seed), specs), self.__cfg)
            stack = PlainStack(specs, params, self.__cfg)
        self.state = ServerState(self.party, stack, SgdMomentum(hyper.lr, hyper.momentum, self.__arith))

    async def __recv_input(self, size: int) -> np.ndarray:
        cfg = self.__cfg
        arch = self.__hyper.arch
        if self.__hyper.vanilla:
            shape = (size, *arch.split_shape)
            mask_shares: (np.ndarray | None) = None
            if self.__hyper.private:
                assert self.__feed is not None
                mask = await self.__feed.take(MaterialRequest(MaterialKind.MASK, shape))
                assert isinstance(mask, Mask)
                mask.use()
                mask_shares = mask.alpha
            (x_pub,) = await self.__client.recv_arrays(MsgType.X_PUB, [shape], cfg.dtype)
            if mask_shares is None:
                return x_pub
            # Fresh additive shares of the activation map out of the public masked value
            return (public_term(x_pub, self.party) - mask_shares)
        shape = (size, arch.in_channels, arch.image_size, arch.image_size)
        (x,) = await self.__client.recv_arrays(MsgType.INPUT_SHARE, [shape], cfg.dtype)
        return x

    async def __recv_labels(self, size: int) -> np.ndarray:
        shape = (size, self.__hyper.arch.classes)
        if self.__hyper.plaintext_labels and self.party == 1:
            return self.__cfg.zeros(shape)
        (labels,) = await self.__client.recv_arrays(MsgType.LABEL_SHARE, [shape], self.__cfg.dtype)
        return labels

    async def __forward(self, x: np.ndarray) -> np.ndarray:
        assert self.state is not None
        stack = self.state.stack
        if isinstance(stack, SecureStack):
            return (await stack.forward(x))
        return stack.forward(x)

    async def __send_loss(self, y_hat: np.ndarray, y: np.ndarray) -> None:
        cfg = self.__cfg
        err = y_hat - y
        if self.__ops is not None:
            squares = await self.__ops.mul(err, err)
        else:
            squares = cfg.truncate(err * err)
        loss = self.__arith.truncate(cfg.sum(squares, axis=(0, 1)) * cfg.const(1.0 / squares.size))
        await self.__client.send_arrays(MsgType.LOSS_SHARE, [np.asarray(loss).reshape(1)], cfg.dtype)

    # =====

    async def train_batch(self) -> None:
        assert self.state is not None
        hyper = self.__hyper
        size = hyper.batch_size
        x = await self.__recv_input(size)
        y = await self.__recv_labels(size)
        y_hat = await self.__forward(x)
        if hyper.reveal_loss:
            await self.__send_loss(y_hat, y)

        grad = mse_grad(y_hat, y, self.__arith)
        stack = self.state.stack
        if isinstance(stack, SecureStack):
            (dx, grads) = await stack.backward(grad, need_input_grad=hyper.vanilla)
        else:
            (dx, grads) = stack.backward(grad, need_input_grad=hyper.vanilla)
        self.state.optimizer.step(stack.params, batch_mean(grads, size, self.__arith))
        if hyper.vanilla:
            assert dx is not None
            await self.__client.send_arrays(MsgType.GRAD_SHARE, [dx], self.__cfg.dtype)

    async def test_batch(self, size: int) -> None:
        x = await self.__recv_input(size)
        y_hat = await self.__forward(x)
        await self.__client.send_arrays(MsgType.OUTPUT_SHARE, [y_hat], self.__cfg.dtype)
