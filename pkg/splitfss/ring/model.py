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

import numpy as np

from . import Numerics
from . import FixedPointConfig
from . import layers


# =====
class ForwardCacheError(RuntimeError):
    pass


# =====
@dataclasses.dataclass(frozen=True)
class LayerSpec:
    kind: str  # conv2d | maxpool2 | relu | fc
    name: str
    in_shape: tuple[int, ...]
    out_shape: tuple[int, ...]
    params: dict[str, tuple[int, ...]] = dataclasses.field(default_factory=dict)

    @property
    def fan_in(self) -> int:
        if self.kind == "conv2d":
            (_, in_c, kernel, _) = self.params["weight"]
            return in_c * kernel * kernel
        if self.kind == "fc":
            return self.params["weight"][1]
        return 0


@dataclasses.dataclass(frozen=True)
class ModelArchitecture:
    in_channels: int = 1
    image_size: int = 28
    conv1_channels: int = 16
    conv2_channels: int = 16
    kernel: int = 5
    fc1_units: int = 100
    classes: int = 10
    split_index: int = 6

    @property
    def layers(self) -> list[LayerSpec]:
        specs: list[LayerSpec] = []
        shape: tuple[int, ...] = (self.in_channels, self.image_size, self.image_size)

        def add(kind: str, name: str, out_shape: tuple[int, ...], **params: tuple[int, ...]) -> None:
            nonlocal shape
            specs.append(LayerSpec(kind, name, shape, out_shape, params))
            shape = out_shape

        for (index, out_c) in enumerate([self.conv1_channels, self.conv2_channels], 1):
            (in_c, size) = (shape[0], shape[1] - self.kernel + 1)
            add("conv2d", f"conv{index}", (out_c, size, size), weight=(out_c, in_c, self.kernel, self.kernel), bias=(out_c,))
            add("maxpool2", f"pool{index}", (out_c, size // 2, size // 2))
            add("relu", f"relu{index}", shape)
        for (index, units) in enumerate([self.fc1_units, self.classes], 1):
            flat = int(np.prod(shape))
            add("fc", f"fc{index}", (units,), weight=(units, flat), bias=(units,))
            add("relu", f"relu{index + 2}", shape)
        return specs

    @property
    def client_layers(self) -> list[LayerSpec]:
        return self.layers[:self.split_index]

    @property
    def server_layers(self) -> list[LayerSpec]:
        return self.layers[self.split_index:]

    @property
    def split_shape(self) -> tuple[int, ...]:
        return self.layers[self.split_index - 1].out_shape

    def as_dict(self) -> dict[str, int]:
        return dataclasses.asdict(self)


# =====
def init_params(arch: ModelArchitecture, seed: int) -> dict[str, np.ndarray]:
    """ Uniform in ±sqrt(1/fan_in), drawn layer by layer (weight, then bias) from one seeded generator. """

    rng = np.random.default_rng(seed)
    params: dict[str, np.ndarray] = {}
    for spec in arch.layers:
        if spec.params:
            bound = np.sqrt(1.0 / spec.fan_in)
            for (pname, pshape) in spec.params.items():
                params[f"{spec.name}.{pname}"] = rng.uniform(-bound, bound, size=pshape)
    return params


def encode_params(params: dict[str, np.ndarray], cfg: FixedPointConfig) -> dict[str, np.ndarray]:
    return {name: cfg.encode(value) for (name, value) in params.items()}


def select_params(params: dict[str, Any], specs: list[LayerSpec]) -> dict[str, Any]:
    names = {spec.name for spec in specs}
    return {key: value for (key, value) in params.items() if key.split(".")[0] in names}


# =====
class PlainStack:
    """ Plaintext forward/backward over a slice of the architecture (ring or float numerics). """

    def __init__(self, specs: list[LayerSpec], params: dict[str, np.ndarray], num: Numerics) -> None:
        self.__specs = specs
        self.params = params
        self.__num = num
        self.__cache: (list[Any] | None) = None

    @property
    def specs(self) -> list[LayerSpec]:
        return self.__specs

    def forward(self, x: np.ndarray) -> np.ndarray:
        cache: list[Any] = []
        for spec in self.__specs:
            cache.append(x)
            if spec.kind == "conv2d":
                (x, cols) = layers.conv2d(x, self.params[f"{spec.name}.weight"], self.params[f"{spec.name}.bias"], self.__num)
                cache[-1] = (cache[-1].shape, cols)
            elif spec.kind == "maxpool2":
                (x, index) = layers.maxpool2(x, self.__num)
                cache[-1] = (cache[-1].shape, index)
            elif spec.kind == "relu":
                x = layers.relu(x, self.__num)
            else:  # fc
                x = layers.fc(x, self.params[f"{spec.name}.weight"], self.params[f"{spec.name}.bias"], self.__num)
        self.__cache = cache
        return x

    def backward(self, dy: np.ndarray, need_input_grad: bool=True) -> tuple[(np.ndarray | None), dict[str, np.ndarray]]:
        """ Returns (input gradient, batch-summed parameter gradients); consumes the forward cache. """

        if self.__cache is None:
            raise ForwardCacheError("Backward pass without a cached forward pass")
        (cache, self.__cache) = (self.__cache, None)
        grads: dict[str, np.ndarray] = {}
        for (index, spec) in reversed(list(enumerate(self.__specs))):
            need = (need_input_grad or index > 0)
            if spec.kind == "conv2d":
                (x_shape, cols) = cache[index]
                (dx, grads[f"{spec.name}.weight"], grads[f"{spec.name}.bias"]) = layers.conv2d_backward(
                    dy, cols, self.params[f"{spec.name}.weight"], x_shape, self.__num, need,
                )
            elif spec.kind == "maxpool2":
                (x_shape, pool_index) = cache[index]
                dx = layers.maxpool2_backward(dy, pool_index)
            elif spec.kind == "relu":
                dx = layers.relu_backward(dy, cache[index], self.__num)
            else:  # fc
                (dx, grads[f"{spec.name}.weight"], grads[f"{spec.name}.bias"]) = layers.fc_backward(
                    dy, cache[index], self.params[f"{spec.name}.weight"], self.__num, need,
                )
            if dx is None:
                break
            dy = dx
        return ((dy if need_input_grad else None), grads)


# =====
def mse_loss(y_hat: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(np.sum((y_hat - y) ** 2, axis=-1) / y.shape[-1]))


def mse_grad(y_hat: np.ndarray, y: np.ndarray, num: Numerics) -> np.ndarray:
    """ Per-sample 2 * (y_hat - y) / n_out, linear so it also runs share-locally. """

    return num.truncate((y_hat - y) * num.const(2.0 / y.shape[-1]))


def batch_mean(grads: dict[str, np.ndarray], batch_size: int, num: Numerics) -> dict[str, np.ndarray]:
    scale = num.const(1.0 / batch_size)
    return {name: num.truncate(grad * scale) for (name, grad) in grads.items()}
