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

from splitfss.errors import ProtocolError
from splitfss.ring import FixedPointConfig
from splitfss.transport import ByteMeter
from splitfss.transport import Channel
from splitfss.transport import make_loopback_pair
from splitfss.protocol import Hyperparams
from splitfss.protocol import RunSchedule
from splitfss.protocol import sync_session


# =====
def _make_channels() -> tuple[Channel, Channel]:
    (first, second) = make_loopback_pair()
    return (
        Channel(first, ByteMeter("client"), "server0"),
        Channel(second, ByteMeter("server0"), "client"),
    )


# =====
@pytest.mark.parametrize("variant, private, vanilla", [
    ("private-vanilla", True, True),
    ("private-local", True, False),
    ("public-vanilla", False, True),
    ("public-local", False, False),
])
def test_ok__variant_flags(variant: str, private: bool, vanilla: bool) -> None:
    hyper = Hyperparams(variant=variant)
    assert (hyper.private, hyper.vanilla) == (private, vanilla)


def test_fail__variant() -> None:
    with pytest.raises(ValueError):
        Hyperparams(variant="private")


def test_ok__digest() -> None:
    first = Hyperparams()
    assert first.digest == Hyperparams().digest
    assert len(first.digest) == 64
    assert first.as_dict()["fixed_point"] == {"ring_bits": 64, "frac_bits": 16}
    assert first.as_dict()["model"]["split_index"] == 6
    for other in [
        Hyperparams(lr=0.01),
        Hyperparams(variant="private-local"),
        Hyperparams(fixed_point=FixedPointConfig(64, 12)),
        Hyperparams(reveal_loss=True),
        Hyperparams(relu_chunk=1024),
    ]:
        assert other.digest != first.digest


# =====
@pytest.mark.parametrize("epochs, passes", [(0, 1), (1, 1), (10, 10)])
def test_ok__schedule(epochs: int, passes: int) -> None:
    schedule = RunSchedule(epochs, 468, (128, 16))
    assert schedule.passes == passes
    assert RunSchedule.from_dict(schedule.as_dict()) == schedule


@pytest.mark.parametrize("raw", [
    {},
    {"epochs": 1, "train_batches": 2},
    {"epochs": "x", "train_batches": 2, "test_sizes": []},
    {"epochs": 1, "train_batches": 2, "test_sizes": 5},
])
def test_fail__schedule(raw: dict) -> None:
    with pytest.raises(ProtocolError, match="Malformed run schedule"):
        RunSchedule.from_dict(raw)


# =====
@pytest.mark.asyncio
async def test_ok__sync_session() -> None:
    (client, server) = _make_channels()
    hyper = Hyperparams()
    (proposed, adopted) = await asyncio.gather(
        sync_session(client, hyper, session_id=0x1234),
        sync_session(server, hyper),
    )
    assert proposed == adopted == 0x1234
    assert client.session_id == server.session_id == 0x1234


@pytest.mark.asyncio
async def test_fail__sync_session_digest() -> None:
    (client, server) = _make_channels()
    results = await asyncio.gather(
        sync_session(client, Hyperparams(), session_id=7),
        sync_session(server, Hyperparams(lr=0.5)),
        return_exceptions=True,
    )
    for result in results:
        assert isinstance(result, ProtocolError)
        assert "digest mismatch" in str(result)


@pytest.mark.asyncio
async def test_fail__sync_session_stale() -> None:
    (client, server) = _make_channels()
    results = await asyncio.gather(
        sync_session(client, Hyperparams(), session_id=7),
        sync_session(server, Hyperparams(), expected_session=8),
        return_exceptions=True,
    )
    assert results[0] == 7
    assert isinstance(results[1], ProtocolError)
    assert "Stale session" in str(results[1])


@pytest.mark.asyncio
async def test_fail__sync_session_zero() -> None:
    (client, server) = _make_channels()
    results = await asyncio.gather(
        sync_session(client, Hyperparams(), session_id=0),
        sync_session(server, Hyperparams()),
        return_exceptions=True,
    )
    assert all(isinstance(result, ProtocolError) for result in results)
