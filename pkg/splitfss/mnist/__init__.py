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
import gzip
import struct
import dataclasses

from typing import Generator

import numpy as np

from ..logging import get_logger
from ..errors import SplitFssError
from ..ring import FixedPointConfig


# =====
class IdxFormatError(SplitFssError):
    pass


class ChecksumError(SplitFssError):
    pass


IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801

CLASSES = 10

# split -> (images file, labels file, count)
FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte", 60000),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte", 10000),
}

GZ_SIZES = {
    "train-images-idx3-ubyte.gz": 9912422,
    "train-labels-idx1-ubyte.gz": 28881,
    "t10k-images-idx3-ubyte.gz": 1648877,
    "t10k-labels-idx1-ubyte.gz": 4542,
}


@dataclasses.dataclass(frozen=True, eq=False)
class Dataset:
    images: np.ndarray  # [count, size, size] uint8
    labels: np.ndarray  # [count] uint8
    split: str

    def __post_init__(self) -> None:
        if self.images.shape[0] != self.labels.shape[0]:
            raise IdxFormatError(f"{self.images.shape[0]} images vs {self.labels.shape[0]} labels")
        if self.images.ndim != 3 or self.images.shape[1] != self.images.shape[2]:
            raise IdxFormatError(f"Images must be square, got {self.images.shape[1:]}")

    def __len__(self) -> int:
        return self.labels.shape[0]

    def head(self, count: int) -> "Dataset":
        return Dataset(self.images[:count], self.labels[:count], self.split)


# =====
def parse_idx(data: bytes) -> np.ndarray:
    if data[:2] == b"\x1f\x8b":
        data = gzip.decompress(data)
    if len(data) < 8:
        raise IdxFormatError(f"IDX file is too short: {len(data)} bytes")
    (magic,) = struct.unpack(">I", data[:4])
    if magic == IMAGES_MAGIC:
        ndim = 3
    elif magic == LABELS_MAGIC:
        ndim = 1
    else:
        raise IdxFormatError(f"Bad IDX magic: 0x{magic:08x}")
    header = 4 + 4 * ndim
    if len(data) < header:
        raise IdxFormatError("Truncated IDX header")
    dims = struct.unpack(f">{ndim}I", data[4:header])
    expected = int(np.prod(dims, dtype=np.int64))
    if len(data) - header != expected:
        raise IdxFormatError(f"IDX body has {len(data) - header} bytes, dims {dims} need {expected}")
    array = np.frombuffer(data, dtype=np.uint8, offset=header).reshape(dims)
    if ndim == 1 and array.size and array.max() >= CLASSES:
        raise IdxFormatError(f"Label out of range 0..{CLASSES - 1}: {array.max()}")
    return array


def _find(data_dir: str, name: str) -> str:
    for candidate in [name + ".gz", name]:
        path = os.path.join(data_dir, candidate)
        if os.path.exists(path):
            return path
    raise FileNotFoundError(f"MNIST file {name}[.gz] not found in {data_dir}")


def verify_checksums(data_dir: str) -> None:
    for (name, size) in GZ_SIZES.items():
        path = os.path.join(data_dir, name)
        if os.path.exists(path) and os.path.getsize(path) != size:
            raise ChecksumError(f"{path} has {os.path.getsize(path)} bytes, expected {size}")


def load_dataset(data_dir: str, split: str, verify: bool=True) -> Dataset:
    if verify:
        verify_checksums(data_dir)
    (images_name, labels_name, count) = FILES[split]
    parts = []
    for name in [images_name, labels_name]:
        with open(_find(data_dir, name), "rb") as file:
            parts.append(parse_idx(file.read()))
    dataset = Dataset(parts[0], parts[1], split)
    if len(dataset) != count:
        raise IdxFormatError(f"MNIST {split} split must have {count} samples, got {len(dataset)}")
    get_logger(0).info("Loaded MNIST %s: %d samples from %s", split, len(dataset), data_dir)
    return dataset


# =====
def encode_images(images: np.ndarray, cfg: FixedPointConfig) -> np.ndarray:
    return cfg.encode(images[:, None, :, :].astype(np.float64) / 255.0)


def one_hot(labels: np.ndarray, cfg: FixedPointConfig) -> np.ndarray:
    eye = np.eye(CLASSES, dtype=np.float64)
    return cfg.encode(eye[labels.astype(np.intp)])


def batch_count(size: int, batch_size: int, drop_last: bool=True) -> int:
    return (size // batch_size if drop_last else -(-size // batch_size))


def batches(
    dataset: Dataset,
    batch_size: int,
    seed: (int | None),
    cfg: FixedPointConfig,
    epoch: int=0,
    drop_last: bool=True,
    limit: (int | None)=None,
) -> Generator[tuple[np.ndarray, np.ndarray, np.ndarray], None, None]:
    """
    Yields (x [n, 1, 28, 28], one-hot y [n, 10], raw labels [n]).
    With a seed the order is a fresh seeded permutation per epoch, otherwise the file order.
    """

    order = np.arange(len(dataset))
    if seed is not None:
        order = np.random.default_rng([seed, epoch]).permutation(len(dataset))
    count = batch_count(len(dataset), batch_size, drop_last)
    if limit is not None:
        count = min(count, limit)
    for index in range(count):
        chunk = order[index * batch_size:(index + 1) * batch_size]
        labels = dataset.labels[chunk]
        yield (encode_images(dataset.images[chunk], cfg), one_hot(labels, cfg), labels)
