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


from .hyper import VARIANTS
from .hyper import Hyperparams
from .hyper import RunSchedule
from .hyper import sync_session
from .peer import ChannelPeer
from .peer import DealerFeed
from .client import EpochRecord
from .client import ClientResult
from .client import ClientState
from .client import ClientRole
from .client import share_labels
from .server import ServerState
from .server import ServerRole
from .dealer import DealerRole
from .train import TrainResult
from .train import build_report
from .train import run_local
from .train import train


__all__ = [
    "VARIANTS",
    "Hyperparams",
    "RunSchedule",
    "sync_session",
    "ChannelPeer",
    "DealerFeed",
    "EpochRecord",
    "ClientResult",
    "ClientState",
    "ClientRole",
    "share_labels",
    "ServerState",
    "ServerRole",
    "DealerRole",
    "TrainResult",
    "build_report",
    "run_local",
    "train",
]
