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


import secrets
import dataclasses

from typing import Any

from ..logging import get_logger
from ..errors import ProtocolError
from ..ring import FixedPointConfig
from ..ring.model import ModelArchitecture
from ..transport import MsgType
from ..transport import Channel

from .. import tools


# =====
VARIANTS = ("public-local", "public-vanilla", "private-local", "private-vanilla")


@dataclasses.dataclass(frozen=True)
class Hyperparams:
    variant: str = "private-vanilla"
    lr: float = 0.002
    momentum: float = 0.9
    batch_size: int = 128
    epochs: int = 10
    max_batches: (int | None) = None
    max_test_batches: (int | None) = None
    seed: int = 0
    reveal_loss: bool = False
    plaintext_labels: bool = False
    relu_chunk: int = 65536
    fixed_point: FixedPointConfig = dataclasses.field(default_factory=FixedPointConfig)
    arch: ModelArchitecture = dataclasses.field(default_factory=ModelArchitecture)

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"Unknown variant: {self.variant}")

    @property
    def private(self) -> bool:
        return self.variant.startswith("private-")

    @property
    def vanilla(self) -> bool:
        return self.variant.endswith("-vanilla")

    def as_dict(self) -> dict[str, Any]:
        return {
            "variant": self.variant,
            "fixed_point": self.fixed_point.as_dict(),
            "model": self.arch.as_dict(),
            "train": {
                "lr": self.lr,
                "momentum": self.momentum,
                "batch_size": self.batch_size,
                "epochs": self.epochs,
                "max_batches": self.max_batches,
                "max_test_batches": self.max_test_batches,
                "seed": self.seed,
                "reveal_loss": self.reveal_loss,
                "plaintext_labels": self.plaintext_labels,
                "relu_chunk": self.relu_chunk,
            },
        }

    @property
    def digest(self) -> str:
        return tools.digest(self.as_dict())


def new_session_id() -> int:
    return (secrets.randbits(64) or 1)


# =====
async def sync_session(
    channel: Channel,
    hyper: Hyperparams,
    session_id: (int | None)=None,
    expected_session: (int | None)=None,
) -> int:
    """
    With session_id: proposes it to the peer and waits for confirmation.
    Without: adopts the peer's proposal (checked against expected_session if given).
    Both ends abort on a hyperparameter digest mismatch. Returns the session id.
    """

    logger = get_logger(0)
    channel.session_id = 0
    digest = hyper.digest
    if session_id is not None:
        await channel.send_json(MsgType.SYNC, {"digest": digest, "session_id": session_id})
        reply = await channel.recv_json(MsgType.SYNC)
    else:
        reply = await channel.recv_json(MsgType.SYNC)
        session_id = int(reply.get("session_id", 0))
        await channel.send_json(MsgType.SYNC, {"digest": digest, "session_id": session_id})

    if reply.get("digest") != digest:
        raise ProtocolError(f"Hyperparameter digest mismatch with {channel.peer}:"
                            f" ours {digest[:16]}, theirs {str(reply.get('digest'))[:16]}")
    if int(reply.get("session_id", 0)) != session_id or session_id == 0:
        raise ProtocolError(f"Session id mismatch with {channel.peer}")
    if expected_session is not None and session_id != expected_session:
        raise ProtocolError(f"Stale session {session_id:016x} from {channel.peer}, current is {expected_session:016x}")

    channel.session_id = session_id
    logger.info("Session %016x established with %s", session_id, channel.peer)
    return session_id


@dataclasses.dataclass(frozen=True)
class RunSchedule:
    """ Sent by the client after session sync: what every party has to run. """

    epochs: int
    train_batches: int
    test_sizes: tuple[int, ...]

    @property
    def passes(self) -> int:
        # E=0 still evaluates the initial model once
        return max(self.epochs, 1)

    def as_dict(self) -> dict[str, Any]:
        return {"epochs": self.epochs, "train_batches": self.train_batches, "test_sizes": list(self.test_sizes)}

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "RunSchedule":
        try:
            return cls(int(raw["epochs"]), int(raw["train_batches"]), tuple(int(size) for size in raw["test_sizes"]))
        except (KeyError, TypeError, ValueError) as err:
            raise ProtocolError(f"Malformed run schedule: {tools.efmt(err)}")
