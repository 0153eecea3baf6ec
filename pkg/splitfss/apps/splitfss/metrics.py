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


import os
import io
import csv
import json
import time
import dataclasses

from typing import Any

import aiofiles

from ...logging import get_logger
from ...protocol import Hyperparams
from ...protocol import TrainResult

from ... import __version__


# =====
SUMMARY_FIELDS = (
    "time", "variant", "config_hash", "version", "ring_bits", "frac_bits", "epochs", "accuracy",
    "train_time", "client_train_mb", "preprocessing_per_batch_mb",
)


@dataclasses.dataclass(frozen=True)
class MetricsRecord:
    variant: str
    config_hash: str
    version: str
    fixed_point: dict[str, int]
    session_id: str
    epoch: int
    accuracy: float
    train_time: float
    test_time: float
    train_batches: int
    mean_loss: (float | None)
    communication: dict
    preprocessing_per_batch: (float | None)

    def as_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def make_records(hyper: Hyperparams, result: TrainResult) -> list[MetricsRecord]:
    return [
        MetricsRecord(
            variant=hyper.variant,
            config_hash=hyper.digest,
            version=__version__,
            fixed_point=hyper.fixed_point.as_dict(),
            session_id=f"{result.client.session_id:016x}",
            epoch=epoch.epoch,
            accuracy=epoch.accuracy,
            train_time=epoch.train_time,
            test_time=epoch.test_time,
            train_batches=epoch.train_batches,
            mean_loss=epoch.mean_loss,
            # The report is cumulative, so it's attached to the last record only
            communication=(result.report if index == len(result.client.epochs) - 1 else {}),
            preprocessing_per_batch=result.client.preprocessing_per_batch,
        )
        for (index, epoch) in enumerate(result.client.epochs)
    ]


def make_summary_row(hyper: Hyperparams, result: TrainResult) -> dict[str, Any]:
    client = result.report["parties"].get("client", {}).get("training", {})
    return {
        "time": int(time.time()),
        "variant": hyper.variant,
        "config_hash": hyper.digest,
        "version": __version__,
        "ring_bits": hyper.fixed_point.ring_bits,
        "frac_bits": hyper.fixed_point.frac_bits,
        "epochs": hyper.epochs,
        "accuracy": round(result.accuracy, 6),
        "train_time": round(sum(epoch.train_time for epoch in result.client.epochs), 3),
        "client_train_mb": round(client.get("sent_mb", 0.0) + client.get("recv_mb", 0.0), 6),
        "preprocessing_per_batch_mb": round((result.client.preprocessing_per_batch or 0.0) / 1_000_000, 6),
    }


async def write_metrics(hyper: Hyperparams, result: TrainResult, metrics_path: str, summary_path: str) -> None:
    logger = get_logger(0)
    if metrics_path:
        _make_parent(metrics_path)
        async with aiofiles.open(metrics_path, "a") as file:
            for record in make_records(hyper, result):
                await file.write(json.dumps(record.as_dict(), sort_keys=True) + "\n")
        logger.info("Metrics appended to %s", metrics_path)

    if summary_path:
        _make_parent(summary_path)
        text = io.StringIO()
        writer = csv.DictWriter(text, fieldnames=SUMMARY_FIELDS)
        if not os.path.exists(summary_path) or os.path.getsize(summary_path) == 0:
            writer.writeheader()
        writer.writerow(make_summary_row(hyper, result))
        async with aiofiles.open(summary_path, "a") as file:
            await file.write(text.getvalue())
        logger.info("Summary appended to %s", summary_path)


def _make_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
