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
import dataclasses

import numpy as np

from ..logging import get_logger
from ..transport import Channel
from ..transport import ByteMeter
from ..transport import make_loopback_pair
from ..transport import meter_report
from ..mnist import Dataset

from .. import aiotools

from .hyper import Hyperparams
from .client import ClientRole
from .client import ClientResult
from .server import ServerRole
from .dealer import DealerRole


# =====
@dataclasses.dataclass
class TrainResult:
    client: ClientResult
    client_params: dict[str, np.ndarray]
    server_params: dict[str, np.ndarray]
    report: dict

    @property
    def accuracy(self) -> float:
        return self.client.epochs[-1].accuracy


def build_report(meters: dict[str, dict[str, dict[str, int]]]) -> dict:
    loaded: list[ByteMeter] = []
    for (party, dumped) in meters.items():
        meter = ByteMeter(party)
        meter.load(dumped)
        loaded.append(meter)
    return meter_report(*loaded)


async def run_local(
    hyper: Hyperparams,
    train_set: Dataset,
    test_set: Dataset,
    tape_path: (str | None)=None,
) -> TrainResult:
    """ Runs every role of the variant in this event loop, wired with loopback links. """

    names = (["client", "server0", "server1", "dealer"] if hyper.private else ["client", "server0"])
    meters = {name: ByteMeter(name) for name in names}
    channels: dict[tuple[str, str], Channel] = {}

    def connect(first: str, second: str) -> None:
        phase = ("preprocessing" if "dealer" in (first, second) else None)
        (link_a, link_b) = make_loopback_pair()
        channels[(first, second)] = Channel(link_a, meters[first], second, phase=phase)
        channels[(second, first)] = Channel(link_b, meters[second], first, phase=phase)

    connect("client", "server0")
    if hyper.private:
        for (first, second) in [("client", "server1"), ("server0", "server1"), ("dealer", "client"), ("dealer", "server0"), ("dealer", "server1")]:
            connect(first, second)

    servers = [
        ServerRole(
            party=party,
            hyper=hyper,
            client=channels[(f"server{party}", "client")],
            meter=meters[f"server{party}"],
            peer=channels.get((f"server{party}", f"server{1 - party}")),
            dealer=channels.get((f"server{party}", "dealer")),
        )
        for party in range(2 if hyper.private else 1)
    ]
    client = ClientRole(
        hyper=hyper,
        train_set=train_set,
        test_set=test_set,
        meter=meters["client"],
        servers=[channels[("client", server.role)] for server in servers],
        dealer=channels.get(("client", "dealer")),
    )
    coros = [client.run(), *[server.run() for server in servers]]
    if hyper.private:
        dealer = DealerRole(
            hyper=hyper,
            meter=meters["dealer"],
            client=channels[("dealer", "client")],
            servers=[channels[("dealer", "server0")], channels[("dealer", "server1")]],
            tape_path=tape_path,
        )
        coros.append(dealer.run())

    get_logger(0).info("Local simulation of %s with %s", hyper.variant, ", ".join(names))
    try:
        results = await aiotools.gather_or_cancel(*coros)
    finally:
        for channel in channels.values():
            await channel.close(graceful=False)

    client_result: ClientResult = results[0]
    cfg = hyper.fixed_point
    states = [server.state for server in servers]
    assert all(state is not None for state in states)
    server_params = {
        name: cfg.decode(sum((state.params[name] for state in states[1:]), states[0].params[name]))  # type: ignore[union-attr]
        for name in states[0].params  # type: ignore[union-attr]
    }
    return TrainResult(
        client=client_result,
        client_params=(
            {name: cfg.decode(value) for (name, value) in client.state.params.items()}
            if hyper.vanilla else {}
        ),
        server_params=server_params,
        report=build_report(client_result.meters),
    )


def train(
    hyper: Hyperparams,
    train_set: Dataset,
    test_set: Dataset,
    tape_path: (str | None)=None,
) -> TrainResult:

    return asyncio.run(run_local(hyper, train_set, test_set, tape_path))
