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
import time

from ...logging import get_logger
from ...yamlconf import ConfigError
from ...yamlconf import Section
from ...transport import TransportConnectionError
from ...transport import ByteMeter
from ...transport import Channel
from ...transport import connect_channel
from ...transport import accept_channels
from ...mnist import Dataset
from ...mnist import load_dataset
from ...protocol import Hyperparams
from ...protocol import TrainResult
from ...protocol import ClientRole
from ...protocol import ServerRole
from ...protocol import DealerRole
from ...protocol import build_report

from .. import make_hyperparams

from .metrics import write_metrics


# =====
_DEALER_PHASE = "preprocessing"


def load_datasets(config: Section) -> tuple[Dataset, Dataset]:
    return (
        load_dataset(config.data.dir, "train", verify=config.data.verify),
        load_dataset(config.data.dir, "test", verify=config.data.verify),
    )


async def _connect(config: Section, role: str, peer: str, meter: ByteMeter) -> Channel:
    """ Keeps retrying refused connections: the peer may not be listening yet. """

    net = config.network
    endpoint = net[peer]
    deadline = time.monotonic() + net.connect_timeout
    while True:
        try:
            return (await connect_channel(
                host=endpoint.host,
                port=endpoint.port,
                role=role,
                peer=peer,
                meter=meter,
                timeout=net.connect_timeout,
                phase=(_DEALER_PHASE if peer == "dealer" else None),
            ))
        except TransportConnectionError as err:
            if time.monotonic() >= deadline:
                raise
            get_logger(0).debug("Can't reach %s yet: %s; retrying ...", peer, err)
            await asyncio.sleep(1)


async def _accept(config: Section, role: str, peers: list[str], meter: ByteMeter) -> dict[str, Channel]:
    endpoint = config.network[role]
    return (await accept_channels(
        host=endpoint.host,
        port=endpoint.port,
        role=role,
        peers={peer: (_DEALER_PHASE if "dealer" in (role, peer) else None) for peer in peers},
        meter=meter,
        timeout=config.network.connect_timeout,
    ))


async def _close_all(channels: list[Channel]) -> None:
    for channel in channels:
        await channel.close()


# =====
async def run_client(config: Section, hyper: (Hyperparams | None)=None) -> TrainResult:
    hyper = (hyper or make_hyperparams(config))
    (train_set, test_set) = load_datasets(config)
    meter = ByteMeter("client")
    peers = (["server0", "server1", "dealer"] if hyper.private else ["server0"])
    channels = list(await asyncio.gather(*[_connect(config, "client", peer, meter) for peer in peers]))
    try:
        client = ClientRole(
            hyper=hyper,
            train_set=train_set,
            test_set=test_set,
            meter=meter,
            servers=channels[:(2 if hyper.private else 1)],
            dealer=(channels[2] if hyper.private else None),
        )
        client_result = await client.run()
    finally:
        await _close_all(channels)

    cfg = hyper.fixed_point
    result = TrainResult(
        client=client_result,
        client_params=(
            {name: cfg.decode(value) for (name, value) in client.state.params.items()}
            if hyper.vanilla else {}
        ),
        server_params={},
        report=build_report(client_result.meters),
    )
    await write_metrics(hyper, result, config.output.metrics, config.output.summary)
    return result


async def run_server(config: Section, party: int, hyper: (Hyperparams | None)=None) -> None:
    hyper = (hyper or make_hyperparams(config))
    role = f"server{party}"
    meter = ByteMeter(role)
    if not hyper.private:
        if party != 0:
            raise ConfigError(f"Variant {hyper.variant} has no {role}")
        accepted = await _accept(config, role, ["client"], meter)
        (peer, dealer) = (None, None)
    elif party == 0:
        (accepted, dealer) = await asyncio.gather(
            _accept(config, role, ["client", "server1"], meter),
            _connect(config, role, "dealer", meter),
        )
        peer = accepted["server1"]
    else:
        (accepted, peer, dealer) = await asyncio.gather(
            _accept(config, role, ["client"], meter),
            _connect(config, role, "server0", meter),
            _connect(config, role, "dealer", meter),
        )

    channels = [*accepted.values(), *filter(None, [peer, dealer])]
    try:
        await ServerRole(
            party=party,
            hyper=hyper,
            client=accepted["client"],
            meter=meter,
            peer=peer,
            dealer=dealer,
        ).run()
    finally:
        await _close_all(channels)


async def run_dealer(config: Section, hyper: (Hyperparams | None)=None) -> None:
    hyper = (hyper or make_hyperparams(config))
    if not hyper.private:
        raise ConfigError(f"Variant {hyper.variant} doesn't use a dealer")
    meter = ByteMeter("dealer")
    accepted = await _accept(config, "dealer", ["client", "server0", "server1"], meter)
    try:
        await DealerRole(
            hyper=hyper,
            meter=meter,
            client=accepted["client"],
            servers=[accepted["server0"], accepted["server1"]],
            tape_path=(config.output.tape or None),
        ).run()
    finally:
        await _close_all(list(accepted.values()))
