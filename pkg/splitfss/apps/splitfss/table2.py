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


import dataclasses

from typing import Any

from ...logging import get_logger
from ...yamlconf import Section
from ...protocol import VARIANTS
from ...protocol import TrainResult
from ...protocol import run_local

from ... import tools

from .. import make_hyperparams

from .metrics import write_metrics
from .roles import load_datasets


# =====
DESK_EPOCHS = 1
DESK_BATCHES = 100


@dataclasses.dataclass(frozen=True)
class VariantRow:
    variant: str
    accuracy: float
    train_time: float
    client_train_sent: int
    client_train_bytes: int
    party_bytes: dict[str, int]
    preprocessing_per_batch: (float | None)


@dataclasses.dataclass(frozen=True)
class Table2Report:
    rows: dict[str, VariantRow]
    ratios: dict[str, (float | None)]

    def as_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def _party_bytes(report: dict, party: str, phases: tuple[str, ...], directions: tuple[str, ...]=("sent", "recv")) -> int:
    record = report["parties"].get(party, {})
    return sum(record.get(phase, {}).get(direction, 0) for phase in phases for direction in directions)


def make_row(variant: str, result: TrainResult) -> VariantRow:
    report = result.report
    return VariantRow(
        variant=variant,
        accuracy=result.accuracy,
        train_time=sum(epoch.train_time for epoch in result.client.epochs),
        client_train_sent=_party_bytes(report, "client", ("training",), ("sent",)),
        client_train_bytes=_party_bytes(report, "client", ("training",)),
        party_bytes={
            party: _party_bytes(report, party, ("training", "testing", "preprocessing"))
            for party in report["parties"]
        },
        preprocessing_per_batch=result.client.preprocessing_per_batch,
    )


def _ratio(num: (float | None), den: (float | None)) -> (float | None):
    if num is None or not den:
        return None
    return num / den


def make_report(rows: dict[str, VariantRow]) -> Table2Report:
    def get(variant: str, field: str) -> (float | None):
        row = rows.get(variant)
        return (getattr(row, field) if row is not None else None)

    gap: (float | None) = None
    if "public-vanilla" in rows and "private-vanilla" in rows:
        gap = rows["public-vanilla"].accuracy - rows["private-vanilla"].accuracy
    return Table2Report(rows, {
        "client_comm_private_local_vs_vanilla": _ratio(get("private-local", "client_train_sent"), get("private-vanilla", "client_train_sent")),
        "client_comm_public_local_vs_vanilla": _ratio(get("public-local", "client_train_sent"), get("public-vanilla", "client_train_sent")),
        "preprocessing_private_local_vs_vanilla": _ratio(get("private-local", "preprocessing_per_batch"), get("private-vanilla", "preprocessing_per_batch")),
        "train_time_private_local_vs_vanilla": _ratio(get("private-local", "train_time"), get("private-vanilla", "train_time")),
        "accuracy_gap_public_vs_private": gap,
    })


def format_report(report: Table2Report) -> str:
    header = f"{'variant':<16} {'accuracy':>9} {'train s':>9} {'client sent':>12} {'client MB':>10} {'prep MB/batch':>14}  parties MB"
    lines = [header, "-" * len(header)]
    for row in report.rows.values():
        prep = ("-" if row.preprocessing_per_batch is None else f"{tools.fmt_mb(int(row.preprocessing_per_batch)):.3f}")
        parties = ", ".join(f"{party}={tools.fmt_mb(size):.2f}" for (party, size) in tools.sorted_kvs(row.party_bytes))
        lines.append(
            f"{row.variant:<16} {row.accuracy * 100:>8.2f}% {row.train_time:>9.1f}"
            f" {tools.fmt_mb(row.client_train_sent):>12.3f} {tools.fmt_mb(row.client_train_bytes):>10.3f} {prep:>14}  {parties}"
        )
    lines.append("")
    for (name, value) in report.ratios.items():
        lines.append(f"{name:<42} {('-' if value is None else f'{value:.3f}')}")
    return "\n".join(lines)


async def run_table2(config: Section, variants: tuple[str, ...]=VARIANTS) -> Table2Report:
    """ Runs the variants one after another with a shared seed and compares them. """

    logger = get_logger(0)
    override: dict[str, Any] = {}
    if not config.train.full_scale:
        override = {
            "epochs": min(config.train.epochs, DESK_EPOCHS),
            "max_batches": (config.train.max_batches or DESK_BATCHES),
        }
    else:
        logger.warning("Full scale run of %s: private-local alone takes many hours", ", ".join(variants))

    (train_set, test_set) = load_datasets(config)
    rows: dict[str, VariantRow] = {}
    for variant in variants:
        hyper = make_hyperparams(config, variant=variant, **override)
        logger.info("Running %s: %d epoch(s), %s batches per epoch", variant, hyper.epochs, (hyper.max_batches or "all"))
        result = await run_local(hyper, train_set, test_set)
        await write_metrics(hyper, result, config.output.metrics, config.output.summary)
        rows[variant] = make_row(variant, result)
    return make_report(rows)
