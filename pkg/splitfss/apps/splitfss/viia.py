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
import warnings
import dataclasses

from typing import Any

import numpy as np
import scipy.stats

from PIL import Image

from ...logging import get_logger
from ...yamlconf import Section
from ...ring import FixedPointConfig
from ...ring.model import ModelArchitecture
from ...ring.model import PlainStack
from ...ring.model import init_params
from ...ring.model import encode_params
from ...ring.model import select_params
from ...mnist import encode_images
from ...protocol import run_local

from .. import make_hyperparams

from .roles import load_datasets


# =====
MODES = ("plaintext", "masked")


@dataclasses.dataclass(frozen=True)
class ViiaReport:
    mode: str
    layer: str
    images: int
    channels: int
    mean_abs_rho: float
    dumped: list[str]

    def as_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def client_activations(
    images: np.ndarray,
    params: dict[str, np.ndarray],
    arch: ModelArchitecture,
    cfg: FixedPointConfig,
    layer: str,
    mode: str,
    rng: np.random.Generator,
    zero_mask: bool=False,
) -> np.ndarray:
    """
    Runs the client layers up to (and including) the named one on raw uint8 images.
    In masked mode the ring output gets a uniform mask first, which is what the servers see.
    """

    specs = arch.client_layers
    names = [spec.name for spec in specs]
    if layer not in names:
        raise ValueError(f"Layer {layer!r} is not a client layer; available: {', '.join(names)}")
    specs = specs[:names.index(layer) + 1]
    stack = PlainStack(specs, encode_params(select_params(params, specs), cfg), cfg)
    out = stack.forward(encode_images(images, cfg))
    if mode == "masked":
        alpha = (cfg.zeros(out.shape) if zero_mask else cfg.random(out.shape, rng))
        out = out + alpha
    return cfg.decode(out)


def downsample(image: np.ndarray, size: tuple[int, int]) -> np.ndarray:
    (height, width) = size
    resized = Image.fromarray(image.astype(np.float32)).resize((width, height), Image.Resampling.BILINEAR)
    return np.asarray(resized, dtype=np.float64)


def mean_abs_correlation(images: np.ndarray, activations: np.ndarray) -> float:
    """ Mean |Pearson rho| between each downsampled raw image and each of its activation channels. """

    rhos: list[float] = []
    for (image, channels) in zip(images, activations):
        raw = downsample(image, channels.shape[-2:]).ravel()
        if np.std(raw) == 0:
            continue
        for channel in channels:
            flat = channel.ravel()
            if np.std(flat) == 0:
                continue
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                rho = scipy.stats.pearsonr(raw, flat)[0]
            if np.isfinite(rho):
                rhos.append(abs(float(rho)))
    return (float(np.mean(rhos)) if rhos else 0.0)


def rescale_u8(array: np.ndarray) -> np.ndarray:
    array = array.astype(np.float64)
    (low, high) = (array.min(), array.max())
    if high == low:
        return np.zeros(array.shape, dtype=np.uint8)
    return np.rint((array - low) * (255.0 / (high - low))).astype(np.uint8)


def dump_images(image_dir: str, prefix: str, images: np.ndarray, activations: np.ndarray, count: int) -> list[str]:
    os.makedirs(image_dir, exist_ok=True)
    paths: list[str] = []
    for index in range(min(count, len(images))):
        items = [("raw", images[index])] + [(f"ch{channel:02d}", activations[index, channel]) for channel in range(activations.shape[1])]
        for (name, array) in items:
            path = os.path.join(image_dir, f"{prefix}-{index:03d}-{name}.pgm")
            Image.fromarray(rescale_u8(array)).save(path)
            paths.append(path)
    return paths


def analyse(
    images: np.ndarray,
    params: dict[str, np.ndarray],
    arch: ModelArchitecture,
    cfg: FixedPointConfig,
    mode: str,
    layer: str="conv1",
    seed: int=0,
    zero_mask: bool=False,
    image_dir: str="",
    dump_count: int=4,
) -> ViiaReport:

    if mode not in MODES:
        raise ValueError(f"Unknown mode {mode!r}, expected one of {', '.join(MODES)}")
    rng = np.random.default_rng([seed, 3])
    activations = client_activations(images, params, arch, cfg, layer, mode, rng, zero_mask)
    dumped: list[str] = []
    if image_dir:
        dumped = dump_images(image_dir, f"{mode}-{layer}", images, activations, dump_count)
    return ViiaReport(
        mode=mode,
        layer=layer,
        images=len(images),
        channels=activations.shape[1],
        mean_abs_rho=mean_abs_correlation(images, activations),
        dumped=dumped,
    )


async def run_viia(
    config: Section,
    mode: str,
    layer: str,
    count: int,
    train_batches: int,
    zero_mask: bool=False,
) -> ViiaReport:

    logger = get_logger(0)
    hyper = make_hyperparams(config)
    (train_set, test_set) = load_datasets(config)
    if train_batches > 0:
        logger.info("Training the client model on %d public-vanilla batches first ...", train_batches)
        trained = await run_local(
            make_hyperparams(config, variant="public-vanilla", epochs=1, max_batches=train_batches, max_test_batches=1),
            train_set, test_set,
        )
        params = trained.client_params
    else:
        params = init_params(hyper.arch, hyper.seed)
    report = analyse(
        images=test_set.images[:count],
        params=params,
        arch=hyper.arch,
        cfg=hyper.fixed_point,
        mode=mode,
        layer=layer,
        seed=hyper.seed,
        zero_mask=zero_mask,
        image_dir=config.output.images,
    )
    logger.info("VIIA %s %s over %d images: mean |rho| = %.4f, %d images dumped",
                mode, layer, report.images, report.mean_abs_rho, len(report.dumped))
    return report
