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


import collections

from .. import tools


# =====
PHASES = ("preprocessing", "training", "testing")
DIRECTIONS = ("sent", "recv")


class ByteMeter:
    """ Bytes on the wire (frame headers included), keyed by (party, direction, phase). """

    def __init__(self, party: str) -> None:
        self.party = party
        self.phase = "training"
        self.__counters: collections.Counter[tuple[str, str, str]] = collections.Counter()

    def count(self, direction: str, size: int, phase: (str | None)=None) -> None:
        phase = (phase or self.phase)
        assert direction in DIRECTIONS, direction
        assert phase in PHASES, phase
        self.__counters[(self.party, direction, phase)] += size

    def get(self, direction: str, phase: str) -> int:
        return self.__counters[(self.party, direction, phase)]

    @property
    def counters(self) -> dict[tuple[str, str, str], int]:
        return dict(self.__counters)

    def merge(self, counters: dict[tuple[str, str, str], int]) -> None:
        self.__counters.update(counters)

    def dump(self) -> dict[str, dict[str, int]]:
        return {
            phase: {direction: self.get(direction, phase) for direction in DIRECTIONS}
            for phase in PHASES
        }

    def load(self, dumped: dict[str, dict[str, int]]) -> None:
        for (phase, directions) in dumped.items():
            for (direction, size) in directions.items():
                self.__counters[(self.party, direction, phase)] = int(size)


def meter_report(*meters: ByteMeter) -> dict:
    parties: dict[str, dict] = {}
    totals = {phase: {direction: 0 for direction in DIRECTIONS} for phase in PHASES}
    for meter in meters:
        record: dict[str, dict] = {}
        for phase in PHASES:
            sent = meter.get("sent", phase)
            recv = meter.get("recv", phase)
            record[phase] = {
                "sent": sent,
                "recv": recv,
                "sent_mb": tools.fmt_mb(sent),
                "recv_mb": tools.fmt_mb(recv),
            }
            totals[phase]["sent"] += sent
            totals[phase]["recv"] += recv
        parties[meter.party] = record
    return {"parties": parties, "total": totals}
